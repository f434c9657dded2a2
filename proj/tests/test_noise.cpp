#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "gtrace/graph.hpp"
#include "gtrace/isomorphism.hpp"
#include "gtrace/io.hpp"
#include "gtrace/noise.hpp"

using namespace gtrace;

TEST_CASE("generate_trace") {
    SECTION("noiseless deletion trace is isomorphic to G with full provenance") {
        auto g = random_graph(10, 2);
        Rng rng(3);
        auto t = generate_trace(g, deletion_params(1.0, 1.0), rng);
        REQUIRE(t.observed().vertex_count() == 10);
        REQUIRE(small_graph_isomorphic(t.observed(), g));
        // provenance maps the observation back onto G exactly
        for (int u = 0; u < 10; ++u)
            for (int v = u + 1; v < 10; ++v)
                REQUIRE(t.observed().has_edge(u, v) ==
                        g.has_edge(t.provenance()[u], t.provenance()[v]));
    }
    SECTION("p_v = 0 gives the empty trace") {
        auto g = random_graph(10, 2);
        Rng rng(4);
        auto t = generate_trace(g, deletion_params(0.0, 1.0), rng);
        REQUIRE(t.observed().vertex_count() == 0);
    }
    SECTION("K100 at p_e = 0.5 keeps about half the edges") {
        auto k100 = complement(LabeledGraph(100));
        Rng rng(5);
        auto t = generate_trace(k100, deletion_params(1.0, 0.5), rng);
        const double mean = 4950.0 / 2.0;
        const double sigma = std::sqrt(4950.0 * 0.25);
        REQUIRE(std::abs(t.observed().edge_count() - mean) <= 3.0 * sigma);
    }
    SECTION("expected trace size is p_v n") {
        auto g = random_graph(50, 6);
        Rng rng(7);
        const int reps = 10000;
        long long total = 0;
        for (int i = 0; i < reps; ++i) {
            auto t = generate_trace(g, deletion_params(0.3, 1.0), rng);
            total += t.observed().vertex_count();
        }
        const double mean = 0.3 * 50 * reps;
        const double sigma = std::sqrt(50 * 0.3 * 0.7 * reps);
        REQUIRE(std::abs(total - mean) <= 3.0 * sigma);
    }
    SECTION("flip trace at f_e = 1/2 has uniform edge density whatever G is") {
        auto g = path(60);  // very sparse input
        Rng rng(8);
        long long edges = 0, pairs = 0;
        for (int i = 0; i < 200; ++i) {
            auto t = generate_trace(g, flip_params(1.0, 0.5), rng);
            edges += t.observed().edge_count();
            const long long m = t.observed().vertex_count();
            pairs += m * (m - 1) / 2;
        }
        const double sigma = std::sqrt(pairs * 0.25);
        REQUIRE(std::abs(edges - pairs * 0.5) <= 3.0 * sigma);
    }
    SECTION("provenance is injective") {
        auto g = random_graph(30, 9);
        Rng rng(10);
        auto t = generate_trace(g, deletion_params(0.7, 0.6), rng);
        std::vector<char> seen(30, 0);
        for (int orig : t.provenance()) {
            REQUIRE(orig >= 0);
            REQUIRE(orig < 30);
            REQUIRE_FALSE(seen[orig]);
            seen[orig] = 1;
        }
    }
}

TEST_CASE("normalize_deletion") {
    SECTION("p_e = 0.5 passes traces through untouched") {
        auto g = random_graph(20, 11);
        Rng rng(12);
        std::vector<Trace> traces{generate_trace(g, deletion_params(1.0, 0.5), rng)};
        auto before = traces[0].observed();
        REQUIRE(normalize_deletion(traces, 0.5, rng) == 0.5);
        REQUIRE(traces[0].observed() == before);
    }
    SECTION("p_e = 0 rejected") {
        std::vector<Trace> traces;
        Rng rng(13);
        REQUIRE_THROWS_AS(normalize_deletion(traces, 0.0, rng), std::invalid_argument);
    }
    SECTION("p_e = 1 deletes about half of the observed edges") {
        auto k = complement(LabeledGraph(120));
        Rng rng(14);
        std::vector<Trace> traces{generate_trace(k, deletion_params(1.0, 1.0), rng)};
        const double before = static_cast<double>(traces[0].observed().edge_count());
        REQUIRE(normalize_deletion(traces, 1.0, rng) == 0.5);
        const double after = static_cast<double>(traces[0].observed().edge_count());
        const double sigma = std::sqrt(before * 0.25);
        REQUIRE(std::abs(after - before / 2.0) <= 3.0 * sigma);
    }
    SECTION("p_e = 0.75 deletes with probability 1/3") {
        auto k = complement(LabeledGraph(120));
        Rng rng(15);
        std::vector<Trace> traces{generate_trace(k, deletion_params(1.0, 1.0), rng)};
        const double before = static_cast<double>(traces[0].observed().edge_count());
        REQUIRE(normalize_deletion(traces, 0.75, rng) == 0.5);
        const double after = static_cast<double>(traces[0].observed().edge_count());
        const double sigma = std::sqrt(before * (1.0 / 3.0) * (2.0 / 3.0));
        REQUIRE(std::abs(after - before * 2.0 / 3.0) <= 3.0 * sigma);
    }
    SECTION("post-processing matches the parameter rewrite in distribution") {
        auto g = random_graph(80, 16);
        Rng rng(17);
        // route 1: generate at p_e = 0.8, then normalize
        long long edges1 = 0;
        for (int i = 0; i < 300; ++i) {
            std::vector<Trace> tr{generate_trace(g, deletion_params(1.0, 0.8), rng)};
            normalize_deletion(tr, 0.8, rng);
            edges1 += tr[0].observed().edge_count();
        }
        // route 2: rewrite parameters up front
        auto rewritten = normalized_params(deletion_params(1.0, 0.8));
        REQUIRE(rewritten.p_e == 0.5);
        long long edges2 = 0;
        for (int i = 0; i < 300; ++i)
            edges2 += generate_trace(g, rewritten, rng).observed().edge_count();
        const double pairs = 300.0 * g.edge_count();
        const double sigma = std::sqrt(2.0 * pairs * 0.25);
        REQUIRE(std::abs(edges1 - edges2) <= 4.0 * sigma);
    }
}

TEST_CASE("normalize_flip") {
    SECTION("f_e = 0.25 unchanged") {
        auto g = random_graph(20, 18);
        Rng rng(19);
        std::vector<Trace> traces{generate_trace(g, flip_params(1.0, 0.25), rng)};
        auto before = traces[0].observed();
        REQUIRE(normalize_flip(traces, 0.25, rng) == 0.25);
        REQUIRE(traces[0].observed() == before);
    }
    SECTION("f_e = 1/2 rejected") {
        std::vector<Trace> traces;
        Rng rng(20);
        REQUIRE_THROWS_AS(normalize_flip(traces, 0.5, rng), std::invalid_argument);
    }
    SECTION("f_e = 0 flips each pair with probability 1/4") {
        auto g = LabeledGraph(100);  // empty graph: every flipped pair becomes an edge
        Rng rng(21);
        std::vector<Trace> traces{generate_trace(g, flip_params(1.0, 0.0), rng)};
        REQUIRE(traces[0].observed().edge_count() == 0);
        REQUIRE(normalize_flip(traces, 0.0, rng) == 0.25);
        const double pairs = 4950.0;
        const double sigma = std::sqrt(pairs * 0.25 * 0.75);
        REQUIRE(std::abs(traces[0].observed().edge_count() - pairs * 0.25) <= 3.0 * sigma);
    }
    SECTION("f_e = 0.6 inverts every pair deterministically") {
        auto g = random_graph(25, 22);
        Rng rng(23);
        std::vector<Trace> traces{generate_trace(g, flip_params(1.0, 0.6), rng)};
        auto before = traces[0].observed();
        REQUIRE(normalize_flip(traces, 0.6, rng) == Catch::Approx(0.4));
        REQUIRE(traces[0].observed() == complement(before));
    }
}

TEST_CASE("trace batch files") {
    auto g = random_graph(25, 30);
    Rng rng(31);
    std::vector<Trace> traces;
    for (int i = 0; i < 5; ++i) traces.push_back(generate_trace(g, deletion_params(0.8, 0.5), rng));

    std::stringstream batch, sidecar;
    write_trace_batch(batch, traces);
    write_provenance_sidecar(sidecar, traces);

    auto loaded = read_trace_batch(batch);
    REQUIRE(loaded.size() == traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i) {
        REQUIRE(loaded[i].observed() == traces[i].observed());
        REQUIRE_FALSE(loaded[i].provenance_available());  // withheld until the sidecar is attached
        REQUIRE_THROWS_AS(loaded[i].provenance(), std::logic_error);
    }
    attach_provenance(sidecar, loaded);
    for (std::size_t i = 0; i < traces.size(); ++i)
        REQUIRE(loaded[i].provenance() == traces[i].provenance());
}
