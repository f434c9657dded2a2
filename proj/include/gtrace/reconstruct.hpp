#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtrace/graph.hpp"
#include "gtrace/noise.hpp"
#include "gtrace/pairing.hpp"
#include "gtrace/rng.hpp"

namespace gtrace {

// Trace-count bounds: ceil(4 p_v^-2 p_e^-1 ln n) for deletion,
// ceil(12 p_v^-2 (1/2 - f_e)^-2 ln n) for flips.
inline int required_traces(const NoiseParams& params, int n) {
    params.validate();
    if (n < 2) throw std::invalid_argument("required_traces: n must be >= 2");
    if (params.p_v <= 0.0) throw std::invalid_argument("required_traces: p_v must be positive");
    const double logn = std::log(static_cast<double>(n));
    double t;
    if (params.model == NoiseModel::EdgeDeletion) {
        if (params.p_e <= 0.0) throw std::invalid_argument("required_traces: p_e must be positive");
        t = 4.0 / (params.p_v * params.p_v) / params.p_e * logn;
    } else {
        if (params.f_e == 0.5)
            throw std::invalid_argument("required_traces: f_e = 1/2 leaves no recoverable signal");
        const double gap = 0.5 - params.f_e;
        t = 12.0 / (params.p_v * params.p_v) / (gap * gap) * logn;
    }
    return static_cast<int>(std::ceil(t));
}

// Per-trace class labels: class_of[i][v] is the class of vertex v of trace i.
struct LabelAssignment {
    std::vector<std::vector<int>> class_of;
    int class_count = 0;
};

struct PlanPair {
    int i, j;
};

// Default plan: pair every trace against ceil(log2 t) + 1 designated
// reference traces (the first ones).
inline std::vector<PlanPair> log_pairing_plan(int t) {
    std::vector<PlanPair> plan;
    if (t < 2) return plan;
    int refs = static_cast<int>(std::ceil(std::log2(static_cast<double>(t)))) + 1;
    refs = std::min(refs, t - 1);
    for (int r = 0; r < refs; ++r)
        for (int i = r + 1; i < t; ++i) plan.push_back({r, i});
    return plan;
}

inline std::vector<PlanPair> all_pairs_plan(int t) {
    std::vector<PlanPair> plan;
    for (int i = 0; i < t; ++i)
        for (int j = i + 1; j < t; ++j) plan.push_back({i, j});
    return plan;
}

namespace detail {

// Union-find whose classes refuse to absorb two vertices of the same trace.
class TraceUnionFind {
public:
    explicit TraceUnionFind(std::span<const int> trace_sizes) {
        offsets_.reserve(trace_sizes.size() + 1);
        offsets_.push_back(0);
        for (int sz : trace_sizes) offsets_.push_back(offsets_.back() + sz);
        const int total = offsets_.back();
        parent_.resize(total);
        std::iota(parent_.begin(), parent_.end(), 0);
        rank_.assign(total, 0);
        occupancy_.resize(total);
        for (std::size_t trace = 0; trace < trace_sizes.size(); ++trace)
            for (int v = 0; v < trace_sizes[trace]; ++v)
                occupancy_[offsets_[trace] + v] = {static_cast<int>(trace)};
    }

    int element(int trace, int v) const { return offsets_[trace] + v; }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    // Returns false (and leaves the structure untouched) when the merge would
    // put two vertices of one trace into the same class.
    bool merge(int a, int b) {
        int ra = find(a), rb = find(b);
        if (ra == rb) return true;
        if (collides(ra, rb)) return false;
        if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
        parent_[rb] = ra;
        if (rank_[ra] == rank_[rb]) ++rank_[ra];
        auto& occ = occupancy_[ra];
        auto& other = occupancy_[rb];
        occ.insert(occ.end(), other.begin(), other.end());
        std::sort(occ.begin(), occ.end());
        other.clear();
        other.shrink_to_fit();
        return true;
    }

    int total() const { return offsets_.back(); }

private:
    bool collides(int ra, int rb) const {
        const auto& a = occupancy_[ra];
        const auto& b = occupancy_[rb];
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i] == b[j]) return true;
            (a[i] < b[j]) ? ++i : ++j;
        }
        return false;
    }

    std::vector<int> offsets_;
    std::vector<int> parent_;
    std::vector<int> rank_;
    std::vector<std::vector<int>> occupancy_;
};

}  // namespace detail

struct ClassBuildResult {
    LabelAssignment labels;
    long long conflicts = 0;
};

// Union-find closure of all matched pairs; unmatched vertices end up as
// singleton classes. A merge that would collide two vertices of one trace is
// refused and counted (first merge kept).
inline ClassBuildResult build_equivalence_classes(std::span<const Matching> matchings,
                                                  std::span<const PlanPair> plan,
                                                  std::span<const int> trace_sizes) {
    if (matchings.size() != plan.size())
        throw std::invalid_argument("build_equivalence_classes: matchings/plan size mismatch");
    detail::TraceUnionFind uf(trace_sizes);
    long long conflicts = 0;
    for (std::size_t p = 0; p < plan.size(); ++p) {
        const auto [i, j] = plan[p];
        for (auto [v, w] : matchings[p].pairs)
            if (!uf.merge(uf.element(i, v), uf.element(j, w))) ++conflicts;
    }
    ClassBuildResult out;
    out.conflicts = conflicts;
    std::vector<int> class_id(uf.total(), -1);
    int next = 0;
    out.labels.class_of.resize(trace_sizes.size());
    for (std::size_t trace = 0; trace < trace_sizes.size(); ++trace) {
        out.labels.class_of[trace].resize(trace_sizes[trace]);
        for (int v = 0; v < trace_sizes[trace]; ++v) {
            int root = uf.find(uf.element(static_cast<int>(trace), v));
            if (class_id[root] == -1) class_id[root] = next++;
            out.labels.class_of[trace][v] = class_id[root];
        }
    }
    out.labels.class_count = next;
    return out;
}

struct ReconstructionReport {
    LabeledGraph reconstructed;
    int class_count = 0;
    long long conflicts = 0;
    long long ambiguous = 0;
    bool structural_failure = false;
    std::string note;
    // flip model only: per class pair (row-major upper triangle), traces
    // containing both classes and traces showing the edge
    std::vector<int> cooccurrence;
    std::vector<int> edge_votes;
    long long flip_ties = 0;
    long long flip_never_cooccurring = 0;
};

// Deletion rule: an edge is placed between two classes iff some trace
// contains both and shows the edge at least once.
inline ReconstructionReport reconstruct_deletion(std::span<const LabeledGraph> observed,
                                                 const LabelAssignment& labels) {
    ReconstructionReport rep;
    rep.class_count = labels.class_count;
    rep.reconstructed = LabeledGraph(labels.class_count);
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const auto& g = observed[i];
        const auto& cls = labels.class_of[i];
        for (int u = 0; u < g.vertex_count(); ++u)
            for (int v = u + 1; v < g.vertex_count(); ++v)
                if (g.has_edge(u, v)) rep.reconstructed.set_edge(cls[u], cls[v]);
    }
    return rep;
}

// Flip rule: among traces containing both classes, place an edge iff strictly
// more traces show it than not; exact ties and never-cooccurring pairs become
// non-edges and are flagged.
inline ReconstructionReport reconstruct_flip(std::span<const LabeledGraph> observed,
                                             const LabelAssignment& labels) {
    ReconstructionReport rep;
    const int c = labels.class_count;
    rep.class_count = c;
    rep.reconstructed = LabeledGraph(c);
    auto at = [c](int a, int b) {
        if (a > b) std::swap(a, b);
        return static_cast<std::size_t>(a) * c + b;
    };
    rep.cooccurrence.assign(static_cast<std::size_t>(c) * c, 0);
    rep.edge_votes.assign(static_cast<std::size_t>(c) * c, 0);
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const auto& g = observed[i];
        const auto& cls = labels.class_of[i];
        for (int u = 0; u < g.vertex_count(); ++u)
            for (int v = u + 1; v < g.vertex_count(); ++v) {
                ++rep.cooccurrence[at(cls[u], cls[v])];
                if (g.has_edge(u, v)) ++rep.edge_votes[at(cls[u], cls[v])];
            }
    }
    for (int a = 0; a < c; ++a)
        for (int b = a + 1; b < c; ++b) {
            const int occ = rep.cooccurrence[at(a, b)];
            const int yes = rep.edge_votes[at(a, b)];
            if (occ == 0) {
                ++rep.flip_never_cooccurring;
            } else if (2 * yes > occ) {
                rep.reconstructed.set_edge(a, b);
            } else if (2 * yes == occ) {
                ++rep.flip_ties;
            }
        }
    return rep;
}

enum class PairingPlanKind { LogReferences, AllPairs };

struct EndToEndOptions {
    long long search_budget = 200000;
    PairingPlanKind plan = PairingPlanKind::LogReferences;
    // all-pairs fallback after a class-count mismatch is skipped above this t
    int all_pairs_fallback_limit = 64;
};

struct EndToEndResult {
    ReconstructionReport report;
    std::vector<Trace> traces;          // provenance retained for evaluation only
    LabelAssignment labels;
    bool used_all_pairs_fallback = false;
};

// Full pipeline: generate t traces, run the pairing algorithm over the plan,
// build classes, apply the model's edge rule. A class count different from n
// is reported as a structural failure, with an all-pairs retry first (when
// affordable). Success evaluation against ground truth lives in evaluate.hpp.
inline EndToEndResult reconstruct_end_to_end(const LabeledGraph& g, const NoiseParams& params,
                                             int t, const EndToEndOptions& options, Rng& rng) {
    params.validate();
    EndToEndResult result;
    if (t == 0) {
        result.report.note = "no traces";
        return result;
    }
    result.traces.reserve(t);
    for (int i = 0; i < t; ++i) {
        Rng trace_rng(derive_seed(rng.next_u64(), static_cast<std::uint64_t>(i)));
        result.traces.push_back(generate_trace(g, params, trace_rng));
    }
    std::vector<PlanPair> plan = options.plan == PairingPlanKind::AllPairs
                                     ? all_pairs_plan(t)
                                     : log_pairing_plan(t);

    // parameter-range reduction before any pairwise work; skipped when there
    // is nothing to pair (a single trace reconstructs by the edge rule alone)
    NoiseParams effective = params;
    ModelConstants constants{};
    Alg1Params alg{};
    if (!plan.empty()) {
        try {
            Rng norm_rng(derive_seed(rng.next_u64(), 0x6e6f726dull));
            if (params.model == NoiseModel::EdgeDeletion) {
                effective.p_e = normalize_deletion(result.traces, params.p_e, norm_rng);
            } else {
                effective.f_e = normalize_flip(result.traces, params.f_e, norm_rng);
                if (effective.f_e < 0.25)
                    effective.f_e = normalize_flip(result.traces, effective.f_e, norm_rng);
            }
            constants = model_constants(effective);
            alg = algorithm1_params(g.vertex_count(), params.p_v);
        } catch (const std::exception& e) {
            result.report.structural_failure = true;
            result.report.note = e.what();
            return result;
        }
    }

    std::vector<const LabeledGraph*> observed;
    std::vector<int> sizes;
    for (const auto& tr : result.traces) {
        observed.push_back(&tr.observed());
        sizes.push_back(tr.observed().vertex_count());
    }

    auto run_plan = [&](const std::vector<PlanPair>& chosen_plan) {
        std::vector<Matching> matchings;
        matchings.reserve(chosen_plan.size());
        long long ambiguous = 0;
        for (const auto& [i, j] : chosen_plan) {
            const LabeledGraph& a = *observed[i];
            const LabeledGraph& b = *observed[j];
            const int k = std::min({alg.k, a.vertex_count(), b.vertex_count()});
            if (k < 1) {
                matchings.emplace_back();
                continue;
            }
            Rng pair_rng(derive_seed(rng.next_u64(), (std::uint64_t(i) << 32) | std::uint64_t(j)));
            PairingTriple triple = best_triple_heuristic(a, b, k, options.search_budget, pair_rng);
            Matching m = pair_vertices(a, b, triple, constants);
            ambiguous += static_cast<long long>(m.ambiguous_left.size() + m.ambiguous_right.size());
            matchings.push_back(std::move(m));
        }
        auto classes = build_equivalence_classes(matchings, chosen_plan, sizes);
        return std::tuple{std::move(classes), ambiguous};
    };

    auto [classes, ambiguous] = run_plan(plan);

    if (classes.labels.class_count != g.vertex_count() &&
        options.plan == PairingPlanKind::LogReferences && t <= options.all_pairs_fallback_limit) {
        auto full = all_pairs_plan(t);
        auto [retry, retry_ambiguous] = run_plan(full);
        if (retry.labels.class_count == g.vertex_count()) {
            classes = std::move(retry);
            ambiguous = retry_ambiguous;
            result.used_all_pairs_fallback = true;
        }
    }

    std::vector<LabeledGraph> obs_copies;
    obs_copies.reserve(observed.size());
    for (const auto* p : observed) obs_copies.push_back(*p);

    ReconstructionReport rep = params.model == NoiseModel::EdgeDeletion
                                   ? reconstruct_deletion(obs_copies, classes.labels)
                                   : reconstruct_flip(obs_copies, classes.labels);
    rep.conflicts = classes.conflicts;
    rep.ambiguous = ambiguous;
    if (rep.class_count != g.vertex_count()) {
        rep.structural_failure = true;
        rep.note = "class count differs from n";
    }
    result.report = std::move(rep);
    result.labels = std::move(classes.labels);
    return result;
}

}  // namespace gtrace
