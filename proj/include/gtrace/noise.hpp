#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gtrace/graph.hpp"
#include "gtrace/rng.hpp"

namespace gtrace {

enum class NoiseModel { EdgeDeletion, EdgeFlip };

struct NoiseParams {
    NoiseModel model = NoiseModel::EdgeDeletion;
    double p_v = 1.0;   // vertex sampling probability
    double p_e = 1.0;   // deletion model: probability an induced edge is KEPT
    double f_e = 0.0;   // flip model: probability a pair's state is inverted

    void validate() const {
        auto in01 = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!in01(p_v)) throw std::invalid_argument("NoiseParams: p_v outside [0,1]");
        if (model == NoiseModel::EdgeDeletion && !in01(p_e))
            throw std::invalid_argument("NoiseParams: p_e outside [0,1]");
        if (model == NoiseModel::EdgeFlip && !in01(f_e))
            throw std::invalid_argument("NoiseParams: f_e outside [0,1]");
    }
};

inline NoiseParams deletion_params(double p_v, double p_e) {
    return NoiseParams{NoiseModel::EdgeDeletion, p_v, p_e, 0.0};
}

inline NoiseParams flip_params(double p_v, double f_e) {
    return NoiseParams{NoiseModel::EdgeFlip, p_v, 1.0, f_e};
}

// One noisy observation of a graph. `observed` uses fresh dense ids in a
// random order; `provenance` maps fresh id -> original vertex id and is only
// for evaluation code. Reconstruction paths receive the observed graph alone.
class Trace {
public:
    Trace() = default;
    Trace(LabeledGraph observed, std::vector<VertexId> provenance)
        : observed_(std::move(observed)), provenance_(std::move(provenance)), withheld_(false) {
        if (static_cast<int>(provenance_.size()) != observed_.vertex_count())
            throw std::invalid_argument("Trace: provenance size mismatch");
    }

    static Trace without_provenance(LabeledGraph observed) {
        Trace t;
        t.observed_ = std::move(observed);
        t.withheld_ = true;
        return t;
    }

    const LabeledGraph& observed() const { return observed_; }
    LabeledGraph& observed_mutable() { return observed_; }

    bool provenance_available() const { return !withheld_; }

    const std::vector<VertexId>& provenance() const {
        if (withheld_) throw std::logic_error("Trace: provenance withheld");
        return provenance_;
    }

    Trace stripped() const { return without_provenance(observed_); }

private:
    LabeledGraph observed_;
    std::vector<VertexId> provenance_;
    bool withheld_ = true;
};

// Def-style trace generation: sample V' i.i.d. with p_v, take the induced
// subgraph, apply the model's edge noise, then relabel the surviving vertices
// by a uniformly random permutation so ordering leaks nothing.
inline Trace generate_trace(const LabeledGraph& g, const NoiseParams& params, Rng& rng) {
    params.validate();
    const int n = g.vertex_count();
    std::vector<int> sampled;
    for (int v = 0; v < n; ++v)
        if (rng.bernoulli(params.p_v)) sampled.push_back(v);

    LabeledGraph sub = induced_subgraph(g, sampled);
    const int m = sub.vertex_count();
    if (params.model == NoiseModel::EdgeDeletion) {
        for (int u = 0; u < m; ++u)
            for (int v = u + 1; v < m; ++v)
                if (sub.has_edge(u, v) && !rng.bernoulli(params.p_e)) sub.set_edge(u, v, false);
    } else {
        for (int u = 0; u < m; ++u)
            for (int v = u + 1; v < m; ++v)
                if (rng.bernoulli(params.f_e)) sub.set_edge(u, v, !sub.has_edge(u, v));
    }

    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    rng.shuffle(order);
    // fresh id i corresponds to sub vertex order[i]
    LabeledGraph obs(m);
    std::vector<VertexId> prov(m);
    for (int i = 0; i < m; ++i) prov[i] = sampled[order[i]];
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (sub.has_edge(order[i], order[j])) obs.set_edge(i, j);
    return Trace(std::move(obs), std::move(prov));
}

// Parameter-range reduction for the deletion model: when p_e > 1/2, delete
// every observed edge with probability (p_e - 1/2)/p_e so the effective keep
// probability becomes exactly 1/2. Identity for p_e <= 1/2.
inline double normalize_deletion(std::vector<Trace>& traces, double p_e, Rng& rng) {
    if (p_e == 0.0)
        throw std::invalid_argument("normalize_deletion: p_e = 0 carries no edges to normalize");
    if (p_e < 0.0 || p_e > 1.0) throw std::invalid_argument("normalize_deletion: p_e outside (0,1]");
    if (p_e <= 0.5) return p_e;
    const double drop = (p_e - 0.5) / p_e;
    for (Trace& t : traces) {
        LabeledGraph& g = t.observed_mutable();
        const int m = g.vertex_count();
        for (int u = 0; u < m; ++u)
            for (int v = u + 1; v < m; ++v)
                if (g.has_edge(u, v) && rng.bernoulli(drop)) g.set_edge(u, v, false);
    }
    return 0.5;
}

// Flip model reductions: f_e < 1/4 lifts the flip probability to exactly 1/4
// by flipping every pair's state with probability (1/4 - f_e)/(1 - 2 f_e);
// f_e > 1/2 inverts every pair deterministically (effective 1 - f_e).
// f_e = 1/2 is rejected: the observed state is independent of the graph.
inline double normalize_flip(std::vector<Trace>& traces, double f_e, Rng& rng) {
    if (f_e < 0.0 || f_e > 1.0) throw std::invalid_argument("normalize_flip: f_e outside [0,1]");
    if (f_e == 0.5)
        throw std::invalid_argument("normalize_flip: f_e = 1/2 leaves no recoverable signal");
    if (f_e > 0.5) {
        for (Trace& t : traces) {
            LabeledGraph& g = t.observed_mutable();
            const int m = g.vertex_count();
            for (int u = 0; u < m; ++u)
                for (int v = u + 1; v < m; ++v)
                    g.set_edge(u, v, !g.has_edge(u, v));
        }
        return 1.0 - f_e;
    }
    if (f_e >= 0.25) return f_e;
    const double q = (0.25 - f_e) / (1.0 - 2.0 * f_e);
    for (Trace& t : traces) {
        LabeledGraph& g = t.observed_mutable();
        const int m = g.vertex_count();
        for (int u = 0; u < m; ++u)
            for (int v = u + 1; v < m; ++v)
                if (rng.bernoulli(q)) g.set_edge(u, v, !g.has_edge(u, v));
    }
    return 0.25;
}

// Equivalent parameter rewrite applied before generation instead of after;
// mirrors the single-step trace post-processing above.
inline NoiseParams normalized_params(const NoiseParams& params) {
    params.validate();
    NoiseParams out = params;
    if (params.model == NoiseModel::EdgeDeletion) {
        if (params.p_e == 0.0)
            throw std::invalid_argument("normalized_params: p_e = 0 cannot be normalized");
        if (out.p_e > 0.5) out.p_e = 0.5;
    } else {
        if (params.f_e == 0.5)
            throw std::invalid_argument("normalized_params: f_e = 1/2 leaves no recoverable signal");
        if (out.f_e > 0.5) out.f_e = 1.0 - out.f_e;
        else if (out.f_e < 0.25) out.f_e = 0.25;
    }
    return out;
}

}  // namespace gtrace
