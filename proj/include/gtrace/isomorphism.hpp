#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "gtrace/graph.hpp"

namespace gtrace {

namespace detail {

struct Component {
    std::vector<int> vertices;        // ids in the parent graph
    LabeledGraph graph;               // induced subgraph
    long long edges = 0;
    std::vector<int> degree_sequence; // sorted
};

inline std::vector<Component> connected_components(const LabeledGraph& g) {
    const int n = g.vertex_count();
    std::vector<int> comp_of(n, -1);
    std::vector<Component> comps;
    for (int s = 0; s < n; ++s) {
        if (comp_of[s] != -1) continue;
        std::vector<int> stack{s}, members;
        comp_of[s] = static_cast<int>(comps.size());
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int u = 0; u < n; ++u) {
                if (comp_of[u] == -1 && g.has_edge(v, u)) {
                    comp_of[u] = comp_of[s];
                    stack.push_back(u);
                }
            }
        }
        std::sort(members.begin(), members.end());
        Component c;
        c.vertices = members;
        c.graph = induced_subgraph(g, members);
        c.edges = c.graph.edge_count();
        for (int i = 0; i < c.graph.vertex_count(); ++i)
            c.degree_sequence.push_back(c.graph.degree(i));
        std::sort(c.degree_sequence.begin(), c.degree_sequence.end());
        comps.push_back(std::move(c));
    }
    return comps;
}

// Path with k vertices <-> ("P", k); cycle <-> ("C", k); anything else -> nullopt-ish.
enum class SimpleKind { Path, Cycle, Other };

inline SimpleKind classify_simple(const Component& c) {
    const int k = c.graph.vertex_count();
    int deg_le1 = 0;
    for (int d : c.degree_sequence) {
        if (d > 2) return SimpleKind::Other;
        if (d <= 1) ++deg_le1;
    }
    if (c.edges == k && deg_le1 == 0 && k >= 3) return SimpleKind::Cycle;
    if (c.edges == k - 1) return SimpleKind::Path;  // connected, max degree 2, tree
    return SimpleKind::Other;
}

// Exact isomorphism between two small graphs by backtracking with degree
// pruning; callers guarantee vertex counts match and are small.
inline bool backtrack_isomorphic(const LabeledGraph& a, const LabeledGraph& b) {
    const int n = a.vertex_count();
    if (n != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
    std::vector<int> deg_a(n), deg_b(n);
    for (int v = 0; v < n; ++v) { deg_a[v] = a.degree(v); deg_b[v] = b.degree(v); }
    {
        auto sa = deg_a, sb = deg_b;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) return false;
    }
    // order a's vertices: highest degree first, then by connectivity to earlier picks
    std::vector<int> order;
    std::vector<char> placed(n, 0);
    for (int step = 0; step < n; ++step) {
        int best = -1, best_conn = -1, best_deg = -1;
        for (int v = 0; v < n; ++v) {
            if (placed[v]) continue;
            int conn = 0;
            for (int u : order) conn += a.has_edge(v, u);
            if (conn > best_conn || (conn == best_conn && deg_a[v] > best_deg)) {
                best = v; best_conn = conn; best_deg = deg_a[v];
            }
        }
        order.push_back(best);
        placed[best] = 1;
    }
    std::vector<int> image(n, -1);
    std::vector<char> used(n, 0);
    auto rec = [&](auto&& self, int depth) -> bool {
        if (depth == n) return true;
        const int v = order[depth];
        for (int w = 0; w < n; ++w) {
            if (used[w] || deg_b[w] != deg_a[v]) continue;
            bool ok = true;
            for (int d = 0; d < depth && ok; ++d)
                if (a.has_edge(v, order[d]) != b.has_edge(w, image[order[d]])) ok = false;
            if (!ok) continue;
            image[v] = w;
            used[w] = 1;
            if (self(self, depth + 1)) return true;
            used[w] = 0;
            image[v] = -1;
        }
        return false;
    };
    return rec(rec, 0);
}

}  // namespace detail

// Exact isomorphism test for small instances. Guard: every connected component
// must either be a path/cycle (any size) or have at most 12 vertices.
inline bool small_graph_isomorphic(const LabeledGraph& g1, const LabeledGraph& g2) {
    if (g1.vertex_count() != g2.vertex_count()) return false;
    if (g1.edge_count() != g2.edge_count()) return false;

    auto c1 = detail::connected_components(g1);
    auto c2 = detail::connected_components(g2);
    if (c1.size() != c2.size()) return false;

    // paths/cycles match by (kind, size); everything else must be small
    std::map<std::pair<char, int>, int> tally;
    std::vector<const detail::Component*> other1, other2;
    auto bucket = [&](std::vector<detail::Component>& comps,
                      std::vector<const detail::Component*>& others, int sign) {
        for (auto& c : comps) {
            switch (detail::classify_simple(c)) {
                case detail::SimpleKind::Path:
                    tally[{'P', c.graph.vertex_count()}] += sign;
                    break;
                case detail::SimpleKind::Cycle:
                    tally[{'C', c.graph.vertex_count()}] += sign;
                    break;
                case detail::SimpleKind::Other:
                    if (c.graph.vertex_count() > 12)
                        throw std::length_error(
                            "small_graph_isomorphic: component exceeds the exact-search guard "
                            "(12 vertices) and is not a path or cycle");
                    others.push_back(&c);
                    break;
            }
        }
    };
    bucket(c1, other1, +1);
    bucket(c2, other2, -1);
    for (const auto& [key, count] : tally)
        if (count != 0) return false;
    if (other1.size() != other2.size()) return false;

    // multiset matching of the remaining small components
    std::vector<char> used(other2.size(), 0);
    for (const auto* a : other1) {
        bool matched = false;
        for (std::size_t j = 0; j < other2.size() && !matched; ++j) {
            if (used[j]) continue;
            const auto* b = other2[j];
            if (a->degree_sequence != b->degree_sequence || a->edges != b->edges) continue;
            if (detail::backtrack_isomorphic(a->graph, b->graph)) {
                used[j] = 1;
                matched = true;
            }
        }
        if (!matched) return false;
    }
    return true;
}

}  // namespace gtrace
