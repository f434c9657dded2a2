#include <catch2/catch_amalgamated.hpp>

#include "gtrace/graph.hpp"
#include "gtrace/isomorphism.hpp"
#include "gtrace/rng.hpp"

using namespace gtrace;

namespace {

LabeledGraph relabel(const LabeledGraph& g, Rng& rng) {
    const int n = g.vertex_count();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    LabeledGraph h(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (g.has_edge(u, v)) h.set_edge(perm[u], perm[v]);
    return h;
}

}  // namespace

TEST_CASE("small_graph_isomorphic") {
    SECTION("graph vs itself") {
        auto g = random_graph(10, 4);
        REQUIRE(small_graph_isomorphic(g, g));
    }
    SECTION("C6 vs C3 + C3 differ") {
        REQUIRE_FALSE(small_graph_isomorphic(cycle(6), disjoint_union(cycle(3), cycle(3))));
    }
    SECTION("relabeled path(4)") {
        Rng rng(1);
        auto p = path(4);
        REQUIRE(small_graph_isomorphic(p, relabel(p, rng)));
    }
    SECTION("relabeled random graphs match, perturbed ones do not") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            auto g = random_graph(9, 1000 + trial);
            auto h = relabel(g, rng);
            REQUIRE(small_graph_isomorphic(g, h));
            // flip one pair's state; edge count separates the two graphs
            auto damaged = h;
            damaged.set_edge(0, 1, !damaged.has_edge(0, 1));
            REQUIRE_FALSE(small_graph_isomorphic(g, damaged));
        }
    }
    SECTION("same degree sequence, non-isomorphic") {
        // C6 vs two triangles have identical degree sequences
        REQUIRE_FALSE(small_graph_isomorphic(cycle(6), disjoint_union(cycle(3), cycle(3))));
        // bull-free check: path P4 + isolated vs star K1,3: degrees {1,1,2,2,0} vs {3,1,1,1,0}
        LabeledGraph star(5);
        star.set_edge(0, 1);
        star.set_edge(0, 2);
        star.set_edge(0, 3);
        auto p4 = disjoint_union(path(4), LabeledGraph(1));
        REQUIRE_FALSE(small_graph_isomorphic(p4, star));
    }
    SECTION("large path/cycle unions are fine, large dense components rejected") {
        auto big = disjoint_union(cycle(40), path(25));
        Rng rng(2);
        REQUIRE(small_graph_isomorphic(big, relabel(big, rng)));
        auto dense = random_graph(20, 6);  // one big non-path component, above the guard
        REQUIRE_THROWS_AS(small_graph_isomorphic(dense, dense), std::length_error);
    }
    SECTION("path/cycle multisets compared exactly") {
        auto a = disjoint_union(disjoint_union(path(3), path(5)), cycle(4));
        auto b = disjoint_union(disjoint_union(path(5), path(3)), cycle(4));
        REQUIRE(small_graph_isomorphic(a, b));
        auto c = disjoint_union(disjoint_union(path(4), path(4)), cycle(4));
        REQUIRE_FALSE(small_graph_isomorphic(a, c));
    }
}
