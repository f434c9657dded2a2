#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gtrace/bounds.hpp"
#include "gtrace/graph.hpp"
#include "gtrace/isomorphism.hpp"

using namespace gtrace;

TEST_CASE("cycle_pair_instance") {
    SECTION("n = 6 gives C6 against C3 + C3") {
        auto [g1, g2] = cycle_pair_instance(6);
        REQUIRE(small_graph_isomorphic(g1, cycle(6)));
        REQUIRE(small_graph_isomorphic(g2, disjoint_union(cycle(3), cycle(3))));
        REQUIRE_FALSE(small_graph_isomorphic(g1, g2));
    }
    SECTION("both sides have n edges") {
        for (int n : {6, 10, 14}) {
            auto [g1, g2] = cycle_pair_instance(n);
            REQUIRE(g1.edge_count() == n);
            REQUIRE(g2.edge_count() == n);
        }
    }
    SECTION("odd or tiny n rejected") {
        REQUIRE_THROWS_AS(cycle_pair_instance(7), std::invalid_argument);
        REQUIRE_THROWS_AS(cycle_pair_instance(4), std::invalid_argument);
    }
}

TEST_CASE("coupled_deletion_sample") {
    SECTION("collision implies isomorphism, enforced sample by sample") {
        Rng rng(180);
        int collisions = 0;
        const int samples = 3000;
        for (int s = 0; s < samples; ++s) {
            auto cs = coupled_deletion_sample(10, rng);  // throws if the invariant breaks
            if (cs.collision) {
                ++collisions;
                REQUIRE(small_graph_isomorphic(cs.trace1, cs.trace2));
            }
        }
        const double want = 1.0 - std::pow(0.75, 5);
        const double sigma = std::sqrt(want * (1.0 - want) / samples);
        REQUIRE(std::abs(collisions / static_cast<double>(samples) - want) <= 4.0 * sigma);
    }
    SECTION("collision flag matches the d vector") {
        Rng rng(181);
        for (int s = 0; s < 200; ++s) {
            auto cs = coupled_deletion_sample(8, rng);
            bool any = false;
            for (auto d : cs.d) any = any || d;
            REQUIRE(cs.collision == any);
        }
    }
    SECTION("per-edge marginal survival is one half") {
        Rng rng(182);
        const int n = 10, samples = 20000;
        std::vector<long long> surv1(n, 0), surv2(n, 0);
        for (int s = 0; s < samples; ++s) {
            auto cs = coupled_deletion_sample(n, rng);
            for (int i = 0; i < n; ++i) {
                if (cs.trace1.has_edge(i, (i + 1) % n)) ++surv1[i];
                const int h = n / 2;
                const int cyc = i < h ? 0 : 1;
                const int idx = i < h ? i : i - h;
                if (cs.trace2.has_edge(cyc * h + idx, cyc * h + (idx + 1) % h)) ++surv2[i];
            }
        }
        const double sigma = std::sqrt(0.25 / samples);
        for (int i = 0; i < n; ++i) {
            REQUIRE(std::abs(surv1[i] / double(samples) - 0.5) <= 4.0 * sigma);
            REQUIRE(std::abs(surv2[i] / double(samples) - 0.5) <= 4.0 * sigma);
        }
    }
}

TEST_CASE("path_complement_instance") {
    SECTION("r = 2: 24 vertices, four special edges per side") {
        auto inst = path_complement_instance(2);
        REQUIRE(inst.g1.vertex_count() == 24);
        REQUIRE(inst.g2.vertex_count() == 24);
        REQUIRE(inst.e1.size() == 4);
        REQUIRE(inst.e2.size() == 4);
    }
    SECTION("sides are not isomorphic (checked on the sparse complements)") {
        auto inst = path_complement_instance(2);
        REQUIRE_FALSE(small_graph_isomorphic(inst.g1_sparse, inst.g2_sparse));
    }
    SECTION("every special edge really is an edge of the dense graph") {
        for (int r : {2, 3}) {
            auto inst = path_complement_instance(r);
            for (auto [u, v] : inst.e1) REQUIRE(inst.g1.has_edge(u, v));
            for (auto [u, v] : inst.e2) REQUIRE(inst.g2.has_edge(u, v));
        }
    }
    SECTION("sparse side composition: n = 16r - 8 and path components only") {
        for (int r : {2, 3, 4}) {
            auto inst = path_complement_instance(r);
            REQUIRE(inst.g1_sparse.vertex_count() == 16 * r - 8);
            // P2 count shows up as the number of degree-1-degree-1 edges
            REQUIRE(static_cast<int>(inst.u.size()) == r);
            REQUIRE(static_cast<int>(inst.v.size()) == r);
            REQUIRE(static_cast<int>(inst.w.size()) == r);
            REQUIRE(static_cast<int>(inst.x.size()) == r);
        }
    }
    SECTION("r < 2 rejected") {
        REQUIRE_THROWS_AS(path_complement_instance(1), std::invalid_argument);
    }
}

TEST_CASE("single_edge_removal_isomorphic") {
    SECTION("all 16 index tuples at r = 2") {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l) REQUIRE(single_edge_removal_isomorphic(2, i, j, k, l));
    }
    SECTION("spot checks at r = 3") {
        Rng rng(183);
        for (int trial = 0; trial < 10; ++trial) {
            const int i = static_cast<int>(rng.uniform_int(3));
            const int j = static_cast<int>(rng.uniform_int(3));
            const int k = static_cast<int>(rng.uniform_int(3));
            const int l = static_cast<int>(rng.uniform_int(3));
            REQUIRE(single_edge_removal_isomorphic(3, i, j, k, l));
        }
    }
    SECTION("bad indices rejected") {
        REQUIRE_THROWS_AS(single_edge_removal_isomorphic(2, 0, 0, 0, 2), std::invalid_argument);
    }
}

TEST_CASE("two_cut_special_count") {
    SECTION("the path-complement family counts (r, r-1)") {
        for (int r : {2, 3, 4}) {
            auto inst = path_complement_instance(r);
            const int n = 16 * r - 8;
            REQUIRE(two_cut_special_count(inst.g1, n) == r);
            REQUIRE(two_cut_special_count(inst.g2, n) == r - 1);
        }
    }
    SECTION("complete graphs: every pair") {
        for (int n : {4, 7}) {
            auto kn = complement(LabeledGraph(n));
            REQUIRE(two_cut_special_count(kn, n) == 1LL * n * (n - 1) / 2);
        }
    }
    SECTION("n must match the graph") {
        REQUIRE_THROWS_AS(two_cut_special_count(cycle(5), 4), std::invalid_argument);
    }
}

TEST_CASE("sample_noisy_cut") {
    SECTION("empty graph always gives zero") {
        Rng rng(184);
        LabeledGraph g(6);
        for (int s = 0; s < 50; ++s) REQUIRE(sample_noisy_cut(g, rng) == 0);
    }
    SECTION("K4 samples Bin(4, 1/2)") {
        Rng rng(185);
        auto k4 = complement(LabeledGraph(4));
        const int samples = 20000;
        std::vector<long long> hist(5, 0);
        for (int s = 0; s < samples; ++s) {
            auto c = sample_noisy_cut(k4, rng);
            REQUIRE(c >= 0);
            REQUIRE(c <= 4);
            ++hist[c];
        }
        const double probs[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
        for (int v = 0; v <= 4; ++v) {
            const double sigma = std::sqrt(probs[v] * (1 - probs[v]) / samples);
            REQUIRE(std::abs(hist[v] / double(samples) - probs[v]) <= 4.0 * sigma);
        }
    }
    SECTION("mean is half the mean of the 2-cut distribution") {
        Rng rng(186);
        auto inst = path_complement_instance(2);
        auto dist = two_cut_distribution(inst.g1);
        double mean_cut = 0;
        for (long long c : dist) mean_cut += static_cast<double>(c);
        mean_cut /= static_cast<double>(dist.size());
        const int samples = 20000;
        double total = 0, totalsq = 0;
        for (int s = 0; s < samples; ++s) {
            auto c = static_cast<double>(sample_noisy_cut(inst.g1, rng));
            total += c;
            totalsq += c * c;
        }
        const double mean = total / samples;
        const double var = totalsq / samples - mean * mean;
        const double sigma = std::sqrt(var / samples);
        REQUIRE(std::abs(mean - mean_cut / 2.0) <= 4.0 * sigma);
    }
}
