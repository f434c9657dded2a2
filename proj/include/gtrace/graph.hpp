#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtrace/rng.hpp"

namespace gtrace {

using VertexId = int;

// Undirected graph with dense vertex ids 0..n-1 and a symmetric bit-matrix
// adjacency. No self-loops. Immutable in practice once built; builders below
// are the only writers.
class LabeledGraph {
public:
    LabeledGraph() = default;

    explicit LabeledGraph(int n) : n_(n), words_((n + 63) / 64), bits_(std::size_t(n) * words_, 0) {
        if (n < 0) throw std::invalid_argument("LabeledGraph: negative vertex count");
    }

    int vertex_count() const { return n_; }
    int words_per_row() const { return words_; }

    bool has_edge(int u, int v) const {
        check_vertex(u);
        check_vertex(v);
        if (u == v) return false;
        return (bits_[row_offset(u) + v / 64] >> (v % 64)) & 1u;
    }

    void set_edge(int u, int v, bool present = true) {
        check_vertex(u);
        check_vertex(v);
        if (u == v) throw std::invalid_argument("LabeledGraph: self-loop rejected");
        set_bit(u, v, present);
        set_bit(v, u, present);
    }

    std::span<const std::uint64_t> row(int v) const {
        check_vertex(v);
        return {bits_.data() + row_offset(v), static_cast<std::size_t>(words_)};
    }

    int degree(int v) const {
        int d = 0;
        for (std::uint64_t w : row(v)) d += std::popcount(w);
        return d;
    }

    long long edge_count() const {
        long long twice = 0;
        for (std::uint64_t w : bits_) twice += std::popcount(w);
        return twice / 2;
    }

    bool operator==(const LabeledGraph& o) const { return n_ == o.n_ && bits_ == o.bits_; }

private:
    void check_vertex(int v) const {
        if (v < 0 || v >= n_) throw std::out_of_range("LabeledGraph: vertex id out of range");
    }
    std::size_t row_offset(int v) const { return std::size_t(v) * words_; }
    void set_bit(int u, int v, bool present) {
        std::uint64_t& w = bits_[row_offset(u) + v / 64];
        const std::uint64_t mask = std::uint64_t{1} << (v % 64);
        if (present) w |= mask; else w &= ~mask;
    }

    int n_ = 0;
    int words_ = 0;
    std::vector<std::uint64_t> bits_;
};

// Erdos-Renyi G(n, 1/2): each unordered pair is an edge independently with
// probability 1/2, driven deterministically by the seed.
inline LabeledGraph random_graph(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("random_graph: n must be >= 1");
    Rng rng(seed);
    LabeledGraph g(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.bernoulli(0.5)) g.set_edge(u, v);
    return g;
}

inline LabeledGraph cycle(int n) {
    if (n < 3) throw std::invalid_argument("cycle: n must be >= 3");
    LabeledGraph g(n);
    for (int i = 0; i < n; ++i) g.set_edge(i, (i + 1) % n);
    return g;
}

inline LabeledGraph path(int n) {
    if (n < 1) throw std::invalid_argument("path: n must be >= 1");
    LabeledGraph g(n);
    for (int i = 0; i + 1 < n; ++i) g.set_edge(i, i + 1);
    return g;
}

inline LabeledGraph complement(const LabeledGraph& g) {
    const int n = g.vertex_count();
    LabeledGraph h(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (!g.has_edge(u, v)) h.set_edge(u, v);
    return h;
}

// Relabels vertex ids densely: graph i's vertex v becomes offset_i + v.
inline LabeledGraph disjoint_union(std::span<const LabeledGraph> parts) {
    int total = 0;
    for (const auto& g : parts) total += g.vertex_count();
    LabeledGraph out(total);
    int base = 0;
    for (const auto& g : parts) {
        const int n = g.vertex_count();
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (g.has_edge(u, v)) out.set_edge(base + u, base + v);
        base += n;
    }
    return out;
}

inline LabeledGraph disjoint_union(const LabeledGraph& a, const LabeledGraph& b) {
    const LabeledGraph parts[] = {a, b};
    return disjoint_union(std::span<const LabeledGraph>(parts, 2));
}

// Induced subgraph on keep (which must be distinct vertices of g); vertex i of
// the result is keep[i].
inline LabeledGraph induced_subgraph(const LabeledGraph& g, std::span<const int> keep) {
    std::vector<char> seen(g.vertex_count(), 0);
    for (int v : keep) {
        if (v < 0 || v >= g.vertex_count())
            throw std::invalid_argument("induced_subgraph: vertex outside V");
        if (seen[v]) throw std::invalid_argument("induced_subgraph: duplicate vertex");
        seen[v] = 1;
    }
    LabeledGraph out(static_cast<int>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = i + 1; j < keep.size(); ++j)
            if (g.has_edge(keep[i], keep[j])) out.set_edge(int(i), int(j));
    return out;
}

// Number of edges with exactly one endpoint in s.
inline long long cut_size(const LabeledGraph& g, std::span<const int> s) {
    const int n = g.vertex_count();
    std::vector<std::uint64_t> mask((n + 63) / 64, 0);
    for (int v : s) {
        if (v < 0 || v >= n) throw std::invalid_argument("cut_size: S not a subset of V");
        mask[v / 64] |= std::uint64_t{1} << (v % 64);
    }
    long long cut = 0;
    for (int v : s) {
        auto r = g.row(v);
        for (std::size_t w = 0; w < mask.size(); ++w)
            cut += std::popcount(r[w] & ~mask[w]);
    }
    return cut;
}

using CutDistribution = std::vector<long long>;

// Multiset { cut({u,v}) : all unordered pairs }, sorted ascending.
// cut({u,v}) = deg(u) + deg(v) - 2*[u~v].
inline CutDistribution two_cut_distribution(const LabeledGraph& g) {
    const int n = g.vertex_count();
    if (n < 2) throw std::invalid_argument("two_cut_distribution: n must be >= 2");
    std::vector<int> deg(n);
    for (int v = 0; v < n; ++v) deg[v] = g.degree(v);
    CutDistribution out;
    out.reserve(std::size_t(n) * (n - 1) / 2);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            out.push_back(deg[u] + deg[v] - 2 * (g.has_edge(u, v) ? 1 : 0));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace gtrace
