#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "gtrace/graph.hpp"
#include "gtrace/noise.hpp"
#include "gtrace/rng.hpp"

namespace gtrace {

// Threshold constants: gamma_1..gamma_4 for the deletion model,
// rho_1..rho_4 for the flip model. c2 and c3 split [c1, c4] in thirds.
struct ModelConstants {
    NoiseModel model;
    double c1, c2, c3, c4;
};

// Deletion: requires normalized p_e in (0, 1/2]. Flip: f_e in [1/4, 1/2).
inline ModelConstants model_constants(const NoiseParams& params) {
    if (params.model == NoiseModel::EdgeDeletion) {
        const double p = params.p_e;
        if (!(p > 0.0 && p <= 0.5))
            throw std::invalid_argument(
                "model_constants: p_e outside (0, 1/2]; normalize the traces first");
        const double c1 = p * (1.0 - p);
        const double c4 = p * (1.0 - p / 2.0);
        return {NoiseModel::EdgeDeletion, c1, (2.0 * c1 + c4) / 3.0, (c1 + 2.0 * c4) / 3.0, c4};
    }
    const double f = params.f_e;
    if (!(f >= 0.25 && f < 0.5))
        throw std::invalid_argument(
            "model_constants: f_e outside [1/4, 1/2); normalize the traces first");
    const double c1 = 2.0 * f * (1.0 - f);
    const double c4 = 0.5;
    return {NoiseModel::EdgeFlip, c1, (2.0 * c1 + c4) / 3.0, (c1 + 2.0 * c4) / 3.0, c4};
}

// (S, T, pi) with pi positional: s[i] in trace 1 is matched to t[i] in trace 2.
struct PairingTriple {
    std::vector<int> s;
    std::vector<int> t;
    long long delta = 0;

    int k() const { return static_cast<int>(s.size()); }
};

namespace detail {

inline void check_triple(const LabeledGraph& g1, const LabeledGraph& g2, const PairingTriple& tr) {
    if (tr.s.size() != tr.t.size()) throw std::invalid_argument("PairingTriple: |S| != |T|");
    std::vector<char> seen1(g1.vertex_count(), 0), seen2(g2.vertex_count(), 0);
    for (int v : tr.s) {
        if (v < 0 || v >= g1.vertex_count() || seen1[v])
            throw std::invalid_argument("PairingTriple: S is not a vertex subset of trace 1");
        seen1[v] = 1;
    }
    for (int v : tr.t) {
        if (v < 0 || v >= g2.vertex_count() || seen2[v])
            throw std::invalid_argument("PairingTriple: T is not a vertex subset of trace 2");
        seen2[v] = 1;
    }
}

// canonical presentation for tie-breaking: positions ordered by s, giving
// (sorted S, T as a set, pi image sequence)
inline std::tuple<std::vector<int>, std::vector<int>, std::vector<int>>
canonical_key(const PairingTriple& tr) {
    const int k = tr.k();
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return tr.s[a] < tr.s[b]; });
    std::vector<int> s(k), pi(k), tset(tr.t);
    for (int i = 0; i < k; ++i) { s[i] = tr.s[idx[i]]; pi[i] = tr.t[idx[i]]; }
    std::sort(tset.begin(), tset.end());
    return {std::move(s), std::move(tset), std::move(pi)};
}

inline bool lex_less(const PairingTriple& a, const PairingTriple& b) {
    return canonical_key(a) < canonical_key(b);
}

}  // namespace detail

// Delta_pi over all position pairs of the triple: the number of pairs whose
// edge state disagrees between the traces under the bijection.
inline long long delta(const LabeledGraph& g1, const LabeledGraph& g2, const PairingTriple& tr) {
    detail::check_triple(g1, g2, tr);
    const int k = tr.k();
    long long d = 0;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (g1.has_edge(tr.s[i], tr.s[j]) != g2.has_edge(tr.t[i], tr.t[j])) ++d;
    return d;
}

// Restricted variant: counts disagreement only over `restrict`, a set of
// unordered trace-1 vertex pairs that must lie within C(S, 2).
inline long long delta(const LabeledGraph& g1, const LabeledGraph& g2, const PairingTriple& tr,
                       std::span<const std::pair<int, int>> restrict_pairs) {
    detail::check_triple(g1, g2, tr);
    std::unordered_map<int, int> pos;
    for (int i = 0; i < tr.k(); ++i) pos[tr.s[i]] = i;
    long long d = 0;
    for (auto [u, v] : restrict_pairs) {
        auto iu = pos.find(u), iv = pos.find(v);
        if (u == v || iu == pos.end() || iv == pos.end())
            throw std::invalid_argument("delta: restrict pair outside C(S,2)");
        if (g1.has_edge(u, v) != g2.has_edge(tr.t[iu->second], tr.t[iv->second])) ++d;
    }
    return d;
}

struct Alg1Params {
    double r;
    int k;
};

// Step 1 of the pairing algorithm: r = sqrt(33 p_v^2 n ln n); k = n when
// p_v = 1, otherwise ceil(p_v^2 n - r). Rejects configurations with k <= 0.
inline Alg1Params algorithm1_params(int n, double p_v) {
    if (n < 2) throw std::invalid_argument("algorithm1_params: n must be >= 2");
    if (p_v < 0.0 || p_v > 1.0) throw std::invalid_argument("algorithm1_params: p_v outside [0,1]");
    const double r = std::sqrt(33.0 * p_v * p_v * n * std::log(static_cast<double>(n)));
    int k;
    if (p_v == 1.0) {
        k = n;
    } else {
        k = static_cast<int>(std::ceil(p_v * p_v * n - r));
    }
    if (k <= 0)
        throw std::domain_error("algorithm1_params: parameters outside reconstructible regime");
    return {r, k};
}

namespace detail {

// enumeration guard for the exact search
inline bool exact_guard_ok(int n1, int n2, int k, double limit = 1e8) {
    auto choose = [](int n, int k) {
        double c = 1.0;
        for (int i = 1; i <= k; ++i) {
            c *= double(n - k + i) / double(i);
            if (c > 1e17) return 1e17;
        }
        return c;
    };
    double total = choose(n1, k) * choose(n2, k);
    for (int i = 2; i <= k; ++i) {
        total *= i;
        if (total > limit) return false;
    }
    return total <= limit;
}

inline bool next_combination(std::vector<int>& comb, int n) {
    const int k = static_cast<int>(comb.size());
    for (int i = k - 1; i >= 0; --i) {
        if (comb[i] < n - k + i) {
            ++comb[i];
            for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace detail

// Step 2, exact: global minimizer of Delta over all (S, T, pi), feasible only
// under the enumeration guard C(n1,k) * C(n2,k) * k! <= 1e8. Ties broken by
// lexicographic order on (sorted S, sorted T, pi as an image sequence), which
// is exactly the enumeration order here.
inline PairingTriple best_triple_exact(const LabeledGraph& g1, const LabeledGraph& g2, int k) {
    const int n1 = g1.vertex_count(), n2 = g2.vertex_count();
    if (k < 1 || k > n1 || k > n2)
        throw std::invalid_argument("best_triple_exact: k outside [1, min(|V1|,|V2|)]");
    if (!detail::exact_guard_ok(n1, n2, k))
        throw std::length_error(
            "best_triple_exact: enumeration guard exceeded; use best_triple_heuristic");

    PairingTriple best;
    long long best_delta = std::numeric_limits<long long>::max();
    std::vector<int> s(k), tcomb(k);
    for (int i = 0; i < k; ++i) s[i] = i;
    do {
        for (int i = 0; i < k; ++i) tcomb[i] = i;
        do {
            std::vector<int> t = tcomb;  // lexicographically first arrangement
            do {
                long long d = 0;
                for (int i = 0; i < k && d < best_delta; ++i)
                    for (int j = i + 1; j < k; ++j)
                        if (g1.has_edge(s[i], s[j]) != g2.has_edge(t[i], t[j])) ++d;
                if (d < best_delta) {
                    best_delta = d;
                    best = {s, t, d};
                }
            } while (std::next_permutation(t.begin(), t.end()));
        } while (detail::next_combination(tcomb, n2));
    } while (detail::next_combination(s, n1));
    return best;
}

struct SearchDiagnostics {
    long long evaluations = 0;
    int restarts = 0;
    // (evaluation index, best delta) at each improvement of the global best
    std::vector<std::pair<long long, long long>> trajectory;
};

namespace detail {

// degree + neighbor-degree-sum profile; used for the greedy initial alignment
inline std::vector<std::pair<long long, int>> degree_profile_order(const LabeledGraph& g) {
    const int n = g.vertex_count();
    std::vector<int> deg(n);
    for (int v = 0; v < n; ++v) deg[v] = g.degree(v);
    std::vector<std::pair<long long, int>> key(n);
    for (int v = 0; v < n; ++v) {
        long long nbr = 0;
        for (int u = 0; u < n; ++u)
            if (g.has_edge(v, u)) nbr += deg[u];
        key[v] = {static_cast<long long>(deg[v]) * 100000 + nbr, v};
    }
    std::sort(key.begin(), key.end(), std::greater<>());
    return key;
}

class TripleState {
public:
    TripleState(const LabeledGraph& g1, const LabeledGraph& g2) : g1_(g1), g2_(g2) {}

    void reset(std::vector<int> s, std::vector<int> t) {
        s_ = std::move(s);
        t_ = std::move(t);
        in_s_.assign(g1_.vertex_count(), 0);
        in_t_.assign(g2_.vertex_count(), 0);
        for (int v : s_) in_s_[v] = 1;
        for (int v : t_) in_t_[v] = 1;
        delta_ = 0;
        const int k = static_cast<int>(s_.size());
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) delta_ += disagree(i, j);
    }

    long long current_delta() const { return delta_; }
    const std::vector<int>& s() const { return s_; }
    const std::vector<int>& t() const { return t_; }
    bool in_s(int v) const { return in_s_[v]; }
    bool in_t(int v) const { return in_t_[v]; }

    long long swap_gain(int i, int j) const {
        // exchange images t[i] <-> t[j]; the (i,j) pair itself is unaffected
        long long g = 0;
        const int k = static_cast<int>(s_.size());
        for (int x = 0; x < k; ++x) {
            if (x == i || x == j) continue;
            g -= disagree(i, x) + disagree(j, x);
            g += (g1_.has_edge(s_[i], s_[x]) != g2_.has_edge(t_[j], t_[x])) ? 1 : 0;
            g += (g1_.has_edge(s_[j], s_[x]) != g2_.has_edge(t_[i], t_[x])) ? 1 : 0;
        }
        return g;
    }

    long long replace_s_gain(int i, int cand) const {
        long long g = 0;
        const int k = static_cast<int>(s_.size());
        for (int x = 0; x < k; ++x) {
            if (x == i) continue;
            g -= disagree(i, x);
            g += (g1_.has_edge(cand, s_[x]) != g2_.has_edge(t_[i], t_[x])) ? 1 : 0;
        }
        return g;
    }

    long long replace_t_gain(int i, int cand) const {
        long long g = 0;
        const int k = static_cast<int>(s_.size());
        for (int x = 0; x < k; ++x) {
            if (x == i) continue;
            g -= disagree(i, x);
            g += (g1_.has_edge(s_[i], s_[x]) != g2_.has_edge(cand, t_[x])) ? 1 : 0;
        }
        return g;
    }

    void apply_swap(int i, int j, long long gain) {
        std::swap(t_[i], t_[j]);
        delta_ += gain;
    }
    void apply_replace_s(int i, int cand, long long gain) {
        in_s_[s_[i]] = 0;
        in_s_[cand] = 1;
        s_[i] = cand;
        delta_ += gain;
    }
    void apply_replace_t(int i, int cand, long long gain) {
        in_t_[t_[i]] = 0;
        in_t_[cand] = 1;
        t_[i] = cand;
        delta_ += gain;
    }

private:
    int disagree(int i, int j) const {
        return (g1_.has_edge(s_[i], s_[j]) != g2_.has_edge(t_[i], t_[j])) ? 1 : 0;
    }

    const LabeledGraph& g1_;
    const LabeledGraph& g2_;
    std::vector<int> s_, t_;
    std::vector<char> in_s_, in_t_;
    long long delta_ = 0;
};

}  // namespace detail

// Step 2, practical: local search over triples. Starts from a greedy
// degree-profile alignment, then hill-climbs with three move kinds (swap two
// images of pi, replace a member of S, replace a member of T), accepting
// strict Delta decreases only, restarting on stagnation. `budget` counts move
// evaluations; 0 returns the greedy initialization unchanged.
inline PairingTriple best_triple_heuristic(const LabeledGraph& g1, const LabeledGraph& g2, int k,
                                           long long budget, Rng& rng,
                                           SearchDiagnostics* diag = nullptr) {
    const int n1 = g1.vertex_count(), n2 = g2.vertex_count();
    if (k < 1 || k > n1 || k > n2)
        throw std::invalid_argument("best_triple_heuristic: k outside [1, min(|V1|,|V2|)]");

    const auto prof1 = detail::degree_profile_order(g1);
    const auto prof2 = detail::degree_profile_order(g2);
    std::vector<int> s0(k), t0(k);
    for (int i = 0; i < k; ++i) { s0[i] = prof1[i].second; t0[i] = prof2[i].second; }

    detail::TripleState state(g1, g2);
    state.reset(s0, t0);

    PairingTriple best{state.s(), state.t(), state.current_delta()};
    if (diag) diag->trajectory.emplace_back(0, best.delta);

    long long evals = 0;
    const long long stall_limit = std::max<long long>(200, 40LL * k);
    long long stall = 0;

    auto consider_best = [&](const detail::TripleState& st) {
        if (st.current_delta() < best.delta) {
            best = {st.s(), st.t(), st.current_delta()};
            if (diag) diag->trajectory.emplace_back(evals, best.delta);
        } else if (st.current_delta() == best.delta) {
            PairingTriple cand{st.s(), st.t(), st.current_delta()};
            if (detail::lex_less(cand, best)) best = std::move(cand);
        }
    };

    while (evals < budget) {
        // propose one move
        bool can_grow_s = k < n1, can_grow_t = k < n2;
        int kinds = 1 + (can_grow_s ? 1 : 0) + (can_grow_t ? 1 : 0);
        int kind = (k >= 2) ? static_cast<int>(rng.uniform_int(kinds)) : (can_grow_s ? 1 : 2);
        if (k < 2 && !can_grow_s && !can_grow_t) break;  // nothing to move
        ++evals;
        ++stall;
        if (kind == 0 && k >= 2) {
            int i = static_cast<int>(rng.uniform_int(k));
            int j = static_cast<int>(rng.uniform_int(k - 1));
            if (j >= i) ++j;
            long long gain = state.swap_gain(i, j);
            if (gain < 0) {
                state.apply_swap(i, j, gain);
                stall = 0;
                consider_best(state);
            }
        } else if ((kind == 1 && can_grow_s) || (kind != 0 && !can_grow_t)) {
            int i = static_cast<int>(rng.uniform_int(k));
            int cand;
            do { cand = static_cast<int>(rng.uniform_int(n1)); } while (state.in_s(cand));
            long long gain = state.replace_s_gain(i, cand);
            if (gain < 0) {
                state.apply_replace_s(i, cand, gain);
                stall = 0;
                consider_best(state);
            }
        } else if (can_grow_t) {
            int i = static_cast<int>(rng.uniform_int(k));
            int cand;
            do { cand = static_cast<int>(rng.uniform_int(n2)); } while (state.in_t(cand));
            long long gain = state.replace_t_gain(i, cand);
            if (gain < 0) {
                state.apply_replace_t(i, cand, gain);
                stall = 0;
                consider_best(state);
            }
        }
        if (stall >= stall_limit && evals < budget) {
            // restart from a random triple; the global best is kept
            std::vector<int> rs(n1), rt(n2);
            for (int i = 0; i < n1; ++i) rs[i] = i;
            for (int i = 0; i < n2; ++i) rt[i] = i;
            rng.shuffle(rs);
            rng.shuffle(rt);
            rs.resize(k);
            rt.resize(k);
            state.reset(std::move(rs), std::move(rt));
            consider_best(state);
            stall = 0;
            if (diag) ++diag->restarts;
        }
    }
    if (diag) diag->evaluations = evals;
    return best;
}

// Signature of a vertex against an ordered anchor list: bit j set iff anchor j
// is adjacent to the vertex. Packed little-endian into 64-bit words.
using Signature = std::vector<std::uint64_t>;

inline std::vector<Signature> signatures(const LabeledGraph& g, std::span<const int> anchors) {
    const int n = g.vertex_count();
    const int k = static_cast<int>(anchors.size());
    for (int a : anchors)
        if (a < 0 || a >= n) throw std::invalid_argument("signatures: anchor outside trace");
    const int words = (k + 63) / 64;
    std::vector<Signature> sig(n, Signature(words, 0));
    for (int v = 0; v < n; ++v)
        for (int j = 0; j < k; ++j)
            if (g.has_edge(v, anchors[j]))
                sig[v][j / 64] |= std::uint64_t{1} << (j % 64);
    return sig;
}

inline int hamming(const Signature& a, const Signature& b) {
    int h = 0;
    for (std::size_t w = 0; w < a.size(); ++w) h += std::popcount(a[w] ^ b[w]);
    return h;
}

// Step 4 threshold: k (c1 + c4) / 2 - 1.
inline double pairing_threshold(int k, const ModelConstants& constants) {
    if (k < 1) throw std::invalid_argument("pairing_threshold: k must be >= 1");
    return k * (constants.c1 + constants.c4) / 2.0 - 1.0;
}

// Partial bijection between two traces' vertices plus diagnostics.
struct Matching {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> ambiguous_left;   // trace-1 vertices with several qualifying partners
    std::vector<int> ambiguous_right;  // trace-2 vertices with several qualifying partners
};

// Step 4: pair v and v' iff their signature Hamming distance is at most the
// threshold. A vertex qualifying against several partners is dropped and
// reported as ambiguous rather than tie-broken.
inline Matching pair_vertices(const LabeledGraph& g1, const LabeledGraph& g2,
                              const PairingTriple& triple, const ModelConstants& constants) {
    detail::check_triple(g1, g2, triple);
    const int n1 = g1.vertex_count(), n2 = g2.vertex_count();
    const double theta = pairing_threshold(triple.k(), constants);
    const auto sig1 = signatures(g1, triple.s);
    const auto sig2 = signatures(g2, triple.t);

    std::vector<int> count1(n1, 0), count2(n2, 0), partner1(n1, -1), partner2(n2, -1);
    for (int v = 0; v < n1; ++v) {
        for (int w = 0; w < n2; ++w) {
            if (hamming(sig1[v], sig2[w]) <= theta) {
                ++count1[v];
                ++count2[w];
                partner1[v] = w;
                partner2[w] = v;
            }
        }
    }
    Matching m;
    for (int v = 0; v < n1; ++v)
        if (count1[v] > 1) m.ambiguous_left.push_back(v);
    for (int w = 0; w < n2; ++w)
        if (count2[w] > 1) m.ambiguous_right.push_back(w);
    for (int v = 0; v < n1; ++v)
        if (count1[v] == 1 && count2[partner1[v]] == 1) m.pairs.emplace_back(v, partner1[v]);
    return m;
}

// Ground-truth matching from provenance; evaluation only.
inline Matching oracle_pairing(const Trace& t1, const Trace& t2) {
    if (!t1.provenance_available() || !t2.provenance_available())
        throw std::logic_error("oracle_pairing: provenance withheld");
    std::unordered_map<int, int> where2;
    for (int w = 0; w < t2.observed().vertex_count(); ++w) where2[t2.provenance()[w]] = w;
    Matching m;
    for (int v = 0; v < t1.observed().vertex_count(); ++v) {
        auto it = where2.find(t1.provenance()[v]);
        if (it != where2.end()) m.pairs.emplace_back(v, it->second);
    }
    return m;
}

}  // namespace gtrace
