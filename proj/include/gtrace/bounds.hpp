#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gtrace/graph.hpp"
#include "gtrace/isomorphism.hpp"
#include "gtrace/noise.hpp"
#include "gtrace/rng.hpp"

namespace gtrace {

// The lower-bound pair: an n-cycle against two disjoint (n/2)-cycles.
inline std::pair<LabeledGraph, LabeledGraph> cycle_pair_instance(int n) {
    if (n % 2 != 0 || n < 6)
        throw std::invalid_argument("cycle_pair_instance: n must be even and >= 6");
    return {cycle(n), disjoint_union(cycle(n / 2), cycle(n / 2))};
}

struct CoupledSample {
    LabeledGraph trace1;  // deletion trace of C_n
    LabeledGraph trace2;  // deletion trace of C_{n/2} + C_{n/2}
    std::vector<std::uint8_t> d;
    bool collision = false;
};

// Coupled generation of one p_v=1, p_e=1/2 deletion trace from each of the
// two graphs. Edge index i of the big cycle is grouped with index n/2+i and
// with edge i of each small cycle. d_i=1 (probability 1/4) deletes all four;
// otherwise with probability 2/3 one big-cycle edge and one small-cycle edge
// are deleted together. Which small cycle accompanies which half is crossed
// for indices before the first d_i=1 so that a collision cuts both sides into
// identically-indexed arcs; both marginals stay i.i.d. 1/2 deletion either
// way. Whenever the collision flag is set the two traces are verified
// isomorphic at runtime.
inline CoupledSample coupled_deletion_sample(int n, Rng& rng) {
    auto [g1, g2] = cycle_pair_instance(n);
    const int h = n / 2;

    CoupledSample out;
    out.d.resize(h);
    int istar = -1;
    for (int i = 0; i < h; ++i) {
        out.d[i] = rng.bernoulli(0.25) ? 1 : 0;
        if (out.d[i] && istar < 0) istar = i;
    }
    out.collision = istar >= 0;

    auto big_edge = [n](int idx) { return std::pair<int, int>{idx, (idx + 1) % n}; };
    auto small_edge = [h](int cyc, int idx) {
        return std::pair<int, int>{cyc * h + idx, cyc * h + (idx + 1) % h};
    };

    auto del = [](LabeledGraph& g, std::pair<int, int> e) { g.set_edge(e.first, e.second, false); };

    for (int i = 0; i < h; ++i) {
        if (out.d[i]) {
            del(g1, big_edge(i));
            del(g1, big_edge(h + i));
            del(g2, small_edge(0, i));
            del(g2, small_edge(1, i));
        } else if (rng.bernoulli(2.0 / 3.0)) {
            const bool crossed = istar >= 0 && i < istar;
            if (rng.bernoulli(0.5)) {
                del(g1, big_edge(i));
                del(g2, small_edge(crossed ? 1 : 0, i));
            } else {
                del(g1, big_edge(h + i));
                del(g2, small_edge(crossed ? 0 : 1, i));
            }
        }
    }

    out.trace1 = std::move(g1);
    out.trace2 = std::move(g2);
    if (out.collision && !small_graph_isomorphic(out.trace1, out.trace2))
        throw std::logic_error("coupled_deletion_sample: collision without isomorphic traces");
    return out;
}

// The path-complement family: sparse unions of short paths whose complements
// differ only in how many of a special edge class they carry.
struct PathComplementInstance {
    LabeledGraph g1, g2;          // dense complements
    LabeledGraph g1_sparse, g2_sparse;
    std::vector<std::pair<int, int>> e1, e2;  // the r^2 special edges of each side
    std::vector<int> u, v, w, x;  // anchor vertices (see builder)
};

namespace detail {

struct SparseBuild {
    LabeledGraph graph;
    std::vector<int> anchors_a;  // leaves
    std::vector<int> anchors_b;  // middles
};

// builds the disjoint union of n2 P2's, n3 P3's, n5 P5's and n6 P6's;
// anchors_a are leaves of the `leaf_len` paths, anchors_b the middle vertices
// of the `mid_len` paths.
inline SparseBuild build_path_family(int n2, int n3, int n5, int n6, int leaf_len, int mid_len) {
    const int counts[4] = {n2, n3, n5, n6};
    const int lens[4] = {2, 3, 5, 6};
    int total = 0;
    for (int c = 0; c < 4; ++c) total += counts[c] * lens[c];
    SparseBuild out;
    out.graph = LabeledGraph(total);
    int base = 0;
    for (int c = 0; c < 4; ++c) {
        for (int copy = 0; copy < counts[c]; ++copy) {
            for (int i = 0; i + 1 < lens[c]; ++i) out.graph.set_edge(base + i, base + i + 1);
            if (lens[c] == leaf_len) out.anchors_a.push_back(base);  // endpoint, a leaf
            if (lens[c] == mid_len) out.anchors_b.push_back(base + 2);  // third vertex
            base += lens[c];
        }
    }
    return out;
}

}  // namespace detail

// n = 16r - 8 vertices per side. Side 1: r P2's, r-1 P3's, r-1 P5's, r P6's;
// u_i a leaf of the i-th P2, v_j a middle vertex of the j-th P6. Side 2:
// r-1 P2's, r P3's, r P5's, r-1 P6's; w_k a leaf of the k-th P3, x_l the
// middle vertex of the l-th P5. The dense graphs are the complements; e1/e2
// collect the r^2 special edges (u_i, v_j) and (w_k, x_l).
inline PathComplementInstance path_complement_instance(int r) {
    if (r < 2) throw std::invalid_argument("path_complement_instance: r must be >= 2");
    auto side1 = detail::build_path_family(r, r - 1, r - 1, r, 2, 6);
    auto side2 = detail::build_path_family(r - 1, r, r, r - 1, 3, 5);

    PathComplementInstance inst;
    inst.g1_sparse = side1.graph;
    inst.g2_sparse = side2.graph;
    inst.g1 = complement(side1.graph);
    inst.g2 = complement(side2.graph);
    inst.u = side1.anchors_a;
    inst.v = side1.anchors_b;
    inst.w = side2.anchors_a;
    inst.x = side2.anchors_b;
    for (int ui : inst.u)
        for (int vj : inst.v) inst.e1.emplace_back(ui, vj);
    for (int wk : inst.w)
        for (int xl : inst.x) inst.e2.emplace_back(wk, xl);
    return inst;
}

// G1 - e1 isomorphic to G2 - e2, checked on the sparse complements: adding
// (u_i, v_j) to side 1 and (w_k, x_l) to side 2 must give isomorphic graphs.
inline bool single_edge_removal_isomorphic(int r, int i, int j, int k, int l) {
    auto inst = path_complement_instance(r);
    if (i < 0 || i >= static_cast<int>(inst.u.size()) || j < 0 ||
        j >= static_cast<int>(inst.v.size()) || k < 0 || k >= static_cast<int>(inst.w.size()) ||
        l < 0 || l >= static_cast<int>(inst.x.size()))
        throw std::invalid_argument("single_edge_removal_isomorphic: index out of range");
    LabeledGraph a = inst.g1_sparse;
    LabeledGraph b = inst.g2_sparse;
    a.set_edge(inst.u[i], inst.v[j]);
    b.set_edge(inst.w[k], inst.x[l]);
    return small_graph_isomorphic(a, b);
}

// Number of vertex pairs S with cut(S) = 2(n - 2).
inline long long two_cut_special_count(const LabeledGraph& g, int n) {
    if (n != g.vertex_count())
        throw std::invalid_argument("two_cut_special_count: n must equal |V(G)|");
    std::vector<int> deg(n);
    for (int v = 0; v < n; ++v) deg[v] = g.degree(v);
    const long long target = 2LL * (n - 2);
    long long count = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (deg[a] + deg[b] - 2 * (g.has_edge(a, b) ? 1 : 0) == target) ++count;
    return count;
}

// One draw of the noisy cut statistic: take a p_v=1, p_e=1/2 deletion trace,
// choose a uniform vertex pair, return the observed cut. Distributed as the
// mixture Bin(c(S), 1/2) over the 2-cut distribution.
inline long long sample_noisy_cut(const LabeledGraph& g, Rng& rng) {
    const int n = g.vertex_count();
    if (n < 2) throw std::invalid_argument("sample_noisy_cut: n must be >= 2");
    Trace t = generate_trace(g, deletion_params(1.0, 0.5), rng);
    const LabeledGraph& obs = t.observed();
    const int a = static_cast<int>(rng.uniform_int(n));
    int b;
    do { b = static_cast<int>(rng.uniform_int(n)); } while (b == a);
    return obs.degree(a) + obs.degree(b) - 2 * (obs.has_edge(a, b) ? 1 : 0);
}

}  // namespace gtrace
