#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gtrace/noise.hpp"
#include "gtrace/pairing.hpp"
#include "gtrace/rng.hpp"

namespace gtrace {

// A labeled bijection is given by the labels of the domain elements and the
// labels of their images. Element i (label domain_labels[i]) maps to a vertex
// labeled image_labels[i]. Labels are distinct on each side.
struct NonfixedCounts {
    int nonfixed_points = 0;       // b
    long long nonfixed_pairs = 0;  // m
};

inline NonfixedCounts count_nonfixed(std::span<const int> domain_labels,
                                     std::span<const int> image_labels) {
    if (domain_labels.size() != image_labels.size())
        throw std::invalid_argument("count_nonfixed: size mismatch");
    const int n = static_cast<int>(domain_labels.size());
    NonfixedCounts out;
    for (int i = 0; i < n; ++i)
        if (domain_labels[i] != image_labels[i]) ++out.nonfixed_points;
    auto key = [](int a, int b) {
        if (a > b) std::swap(a, b);
        return std::pair<int, int>{a, b};
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (key(domain_labels[i], domain_labels[j]) != key(image_labels[i], image_labels[j]))
                ++out.nonfixed_pairs;
    return out;
}

// Permutation convenience form: element i carries label i.
inline NonfixedCounts count_nonfixed(std::span<const int> permutation) {
    std::vector<int> identity(permutation.size());
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
    return count_nonfixed(identity, permutation);
}

inline std::vector<std::pair<int, int>> nonfixed_pair_set(std::span<const int> domain_labels,
                                                          std::span<const int> image_labels) {
    const int n = static_cast<int>(domain_labels.size());
    auto key = [](int a, int b) {
        if (a > b) std::swap(a, b);
        return std::pair<int, int>{a, b};
    };
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (key(domain_labels[i], domain_labels[j]) != key(image_labels[i], image_labels[j]))
                out.emplace_back(i, j);
    return out;
}

// Three independent, nearly-equal-sized parts of the non-fixed pair set.
struct PairPartition {
    std::array<std::vector<std::pair<int, int>>, 3> parts;
};

// Decomposes the functional graph on the non-fixed pairs (arc p -> sigma(p)
// whenever the image pair is itself in N) into directed paths and cycles, and
// colors it with the four-case rule, resorting the parts by size after every
// component so the sizes stay within one of each other.
inline PairPartition partition_nonfixed_pairs(std::span<const int> domain_labels,
                                              std::span<const int> image_labels,
                                              std::span<const std::pair<int, int>> nonfixed) {
    const int n = static_cast<int>(domain_labels.size());
    if (image_labels.size() != domain_labels.size())
        throw std::invalid_argument("partition_nonfixed_pairs: size mismatch");

    // check N is exactly the non-fixed set
    {
        auto expected = nonfixed_pair_set(domain_labels, image_labels);
        std::vector<std::pair<int, int>> given(nonfixed.begin(), nonfixed.end());
        for (auto& [a, b] : given)
            if (a > b) std::swap(a, b);
        std::sort(given.begin(), given.end());
        if (given != expected)
            throw std::invalid_argument(
                "partition_nonfixed_pairs: N is not the non-fixed pair set of the bijection");
    }

    const int m = static_cast<int>(nonfixed.size());
    std::map<std::pair<int, int>, int> node_of;  // label pair (sorted) -> node
    auto label_key = [&](int i, int j) {
        int a = domain_labels[i], b = domain_labels[j];
        if (a > b) std::swap(a, b);
        return std::pair<int, int>{a, b};
    };
    std::vector<std::pair<int, int>> nodes(nonfixed.begin(), nonfixed.end());
    for (auto& [a, b] : nodes)
        if (a > b) std::swap(a, b);
    std::sort(nodes.begin(), nodes.end());
    for (int p = 0; p < m; ++p) node_of[label_key(nodes[p].first, nodes[p].second)] = p;

    std::vector<int> succ(m, -1), indeg(m, 0);
    for (int p = 0; p < m; ++p) {
        int a = image_labels[nodes[p].first], b = image_labels[nodes[p].second];
        if (a > b) std::swap(a, b);
        auto it = node_of.find({a, b});
        if (it != node_of.end()) {
            succ[p] = it->second;
            ++indeg[it->second];
        }
    }

    std::array<std::vector<std::pair<int, int>>, 3> parts;  // parts[0] largest after each sort
    auto emit = [&](int part, int node) { parts[part].push_back(nodes[node]); };
    auto resort = [&]() {
        std::stable_sort(parts.begin(), parts.end(),
                         [](const auto& a, const auto& b) { return a.size() > b.size(); });
    };

    std::vector<char> done(m, 0);
    // directed paths: sweep from the in-degree-0 end in order I3, I2, I1
    for (int start = 0; start < m; ++start) {
        if (done[start] || indeg[start] != 0) continue;
        static constexpr int cyclic321[3] = {2, 1, 0};  // I3, I2, I1
        int pos = 0;
        for (int cur = start; cur != -1; cur = succ[cur]) {
            done[cur] = 1;
            emit(cyclic321[pos % 3], cur);
            ++pos;
        }
        resort();
    }
    // remaining components are cycles
    for (int start = 0; start < m; ++start) {
        if (done[start]) continue;
        std::vector<int> cyc;
        for (int cur = start; !done[cur]; cur = succ[cur]) {
            done[cur] = 1;
            cyc.push_back(cur);
        }
        const int len = static_cast<int>(cyc.size());
        if (len % 3 == 0) {
            static constexpr int order[3] = {2, 1, 0};  // I3, I2, I1
            for (int q = 0; q < len; ++q) emit(order[q % 3], cyc[q]);
        } else if (len % 3 == 1) {
            emit(2, cyc[0]);  // I3
            static constexpr int order[3] = {1, 2, 0};  // then I2, I3, I1
            for (int q = 1; q < len; ++q) emit(order[(q - 1) % 3], cyc[q]);
        } else {
            emit(1, cyc[0]);  // I2
            emit(2, cyc[1]);  // I3
            static constexpr int order[3] = {1, 2, 0};  // then I2, I3, I1
            for (int q = 2; q < len; ++q) emit(order[(q - 2) % 3], cyc[q]);
        }
        resort();
    }

    PairPartition out;
    out.parts = std::move(parts);
    return out;
}

struct McEstimate {
    double estimate = 0.0;
    double sigma = 0.0;
    long long samples = 0;
};

// Monte-Carlo estimate of the correlated-bit disagreement probabilities:
// deletion model simulates X_i ~ Ber(1/2), Y_i ~ Ber(p_e) and the event
// X1 Y1 != X2 Y2; flip model simulates Z_i in {-1,1}, W_i = 1 w.p. 1 - f_e
// and the event Z1 W1 != Z2 W2. Conditioning forces X1 = X2 (resp. Z1 = Z2).
inline McEstimate mc_flip_probabilities(const NoiseParams& params, bool conditioned,
                                        long long samples, Rng& rng) {
    params.validate();
    if (samples < 1) throw std::invalid_argument("mc_flip_probabilities: samples must be >= 1");
    long long hits = 0;
    if (params.model == NoiseModel::EdgeDeletion) {
        for (long long s = 0; s < samples; ++s) {
            const bool x1 = rng.bernoulli(0.5);
            const bool x2 = conditioned ? x1 : rng.bernoulli(0.5);
            const bool y1 = rng.bernoulli(params.p_e);
            const bool y2 = rng.bernoulli(params.p_e);
            if ((x1 && y1) != (x2 && y2)) ++hits;
        }
    } else {
        for (long long s = 0; s < samples; ++s) {
            const int z1 = rng.bernoulli(0.5) ? 1 : -1;
            const int z2 = conditioned ? z1 : (rng.bernoulli(0.5) ? 1 : -1);
            const int w1 = rng.bernoulli(1.0 - params.f_e) ? 1 : -1;
            const int w2 = rng.bernoulli(1.0 - params.f_e) ? 1 : -1;
            if (z1 * w1 != z2 * w2) ++hits;
        }
    }
    McEstimate est;
    est.samples = samples;
    est.estimate = static_cast<double>(hits) / static_cast<double>(samples);
    est.sigma = std::sqrt(std::max(est.estimate * (1.0 - est.estimate), 1e-12) /
                          static_cast<double>(samples));
    return est;
}

namespace detail {

// Exact-in-law Bin(N, p) sampler via inverse CDF; the pmf is built once per
// (N, p) with the mode-relative recurrence so large N stays in range.
class BinomialSampler {
public:
    BinomialSampler(long long n, double p) : n_(n) {
        if (n < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("BinomialSampler: bad args");
        cdf_.resize(n + 1);
        std::vector<double> lpmf(n + 1);
        const double lp = (p > 0) ? std::log(p) : -1e300;
        const double lq = (p < 1) ? std::log1p(-p) : -1e300;
        for (long long k = 0; k <= n; ++k) {
            lpmf[k] = std::lgamma(double(n + 1)) - std::lgamma(double(k + 1)) -
                      std::lgamma(double(n - k + 1));
            if (k > 0) lpmf[k] += k * lp;
            if (k < n) lpmf[k] += (n - k) * lq;
            if (p == 0.0) lpmf[k] = (k == 0) ? 0.0 : -1e300;
            if (p == 1.0) lpmf[k] = (k == n) ? 0.0 : -1e300;
        }
        double lmax = lpmf[0];
        for (double v : lpmf) lmax = std::max(lmax, v);
        double total = 0.0;
        for (long long k = 0; k <= n; ++k) {
            total += std::exp(lpmf[k] - lmax);
            cdf_[k] = total;
        }
        for (double& c : cdf_) c /= total;
    }

    long long sample(Rng& rng) const {
        const double u = rng.uniform01();
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) return n_;
        return static_cast<long long>(it - cdf_.begin());
    }

private:
    long long n_;
    std::vector<double> cdf_;
};

}  // namespace detail

struct TailBoundCheck {
    std::string event;
    double empirical = 0.0;
    double bound = 0.0;
    double sigma = 0.0;
    bool violated = false;
};

// Empirical frequencies of the concentration-lemma tail events against the
// printed exponential bounds. A check is flagged when the frequency exceeds
// its bound by more than 3 sigma of sampling error.
inline std::vector<TailBoundCheck> mc_tail_bounds(const NoiseParams& params, long long N,
                                                  long long samples, Rng& rng) {
    if (N < 1) throw std::invalid_argument("mc_tail_bounds: N must be >= 1");
    if (samples < 1) throw std::invalid_argument("mc_tail_bounds: samples must be >= 1");
    const ModelConstants c = model_constants(params);
    double exponent;
    std::string id;
    if (params.model == NoiseModel::EdgeDeletion) {
        exponent = std::pow(params.p_e, 3) * static_cast<double>(N) / 108.0;
        id = "gamma";
    } else {
        exponent = std::pow(0.5 - params.f_e, 4) * static_cast<double>(N) / 4.0;
        id = "rho";
    }
    const double bound = std::exp(-exponent);

    struct Event {
        std::string name;
        double p;       // binomial success probability
        double thresh;  // compared against the count
        bool upper;     // event is count >= thresh (else count <= thresh)
    };
    const std::vector<Event> events = {
        {id + "1_above_" + id + "2", c.c1, c.c2 * static_cast<double>(N), true},
        {id + "4_below_" + id + "3", c.c4, c.c3 * static_cast<double>(N), false},
    };

    std::vector<TailBoundCheck> out;
    for (const auto& ev : events) {
        detail::BinomialSampler sampler(N, ev.p);
        long long hits = 0;
        for (long long s = 0; s < samples; ++s) {
            const long long x = sampler.sample(rng);
            if (ev.upper ? (static_cast<double>(x) >= ev.thresh)
                         : (static_cast<double>(x) <= ev.thresh))
                ++hits;
        }
        TailBoundCheck check;
        check.event = ev.name;
        check.empirical = static_cast<double>(hits) / static_cast<double>(samples);
        check.bound = bound;
        const double var = std::max({check.bound * (1.0 - check.bound),
                                     check.empirical * (1.0 - check.empirical), 1e-12});
        check.sigma = std::sqrt(var / static_cast<double>(samples));
        check.violated = check.empirical > check.bound + 3.0 * check.sigma;
        out.push_back(std::move(check));
    }
    return out;
}

// Event A1: the provenance intersection size lies within r of p_v^2 n.
inline bool check_event_A1(const Trace& t1, const Trace& t2, int n, double p_v) {
    if (!t1.provenance_available() || !t2.provenance_available())
        throw std::logic_error("check_event_A1: provenance withheld");
    const double r = std::sqrt(33.0 * p_v * p_v * n * std::log(static_cast<double>(n)));
    std::vector<char> in1(n, 0);
    for (int v : t1.provenance()) in1[v] = 1;
    long long inter = 0;
    for (int v : t2.provenance())
        if (in1[v]) ++inter;
    const double mean = p_v * p_v * static_cast<double>(n);
    return mean - r <= static_cast<double>(inter) && static_cast<double>(inter) <= mean + r;
}

struct A3Report {
    int m = 0;  // |V1 cap V2|
    bool insufficient_intersection = false;
    long long same_pairs = 0;
    long long same_violations = 0;  // H > c2 * m
    long long diff_pairs = 0;
    long long diff_violations = 0;  // H < c3 * (m - 2)
};

// Event A3: signatures over the true intersection (by provenance) separate
// same-vertex pairs from distinct-vertex pairs at the c2/c3 thresholds.
inline A3Report check_event_A3(const Trace& t1, const Trace& t2, const ModelConstants& constants) {
    if (!t1.provenance_available() || !t2.provenance_available())
        throw std::logic_error("check_event_A3: provenance withheld");
    A3Report rep;

    std::unordered_map<int, int> loc1, loc2;
    for (int v = 0; v < t1.observed().vertex_count(); ++v) loc1[t1.provenance()[v]] = v;
    for (int v = 0; v < t2.observed().vertex_count(); ++v) loc2[t2.provenance()[v]] = v;
    std::vector<int> common;
    for (const auto& [orig, local] : loc1)
        if (loc2.count(orig)) common.push_back(orig);
    std::sort(common.begin(), common.end());
    rep.m = static_cast<int>(common.size());
    if (rep.m < 3) {
        rep.insufficient_intersection = true;
        return rep;
    }
    std::vector<int> anchors1, anchors2;
    for (int orig : common) {
        anchors1.push_back(loc1[orig]);
        anchors2.push_back(loc2[orig]);
    }
    const auto sig1 = signatures(t1.observed(), anchors1);
    const auto sig2 = signatures(t2.observed(), anchors2);

    const double up = constants.c2 * rep.m;
    const double low = constants.c3 * (rep.m - 2);
    for (int v = 0; v < t1.observed().vertex_count(); ++v) {
        const int orig1 = t1.provenance()[v];
        for (int w = 0; w < t2.observed().vertex_count(); ++w) {
            const int h = hamming(sig1[v], sig2[w]);
            if (orig1 == t2.provenance()[w]) {
                ++rep.same_pairs;
                if (static_cast<double>(h) > up) ++rep.same_violations;
            } else {
                ++rep.diff_pairs;
                if (static_cast<double>(h) < low) ++rep.diff_violations;
            }
        }
    }
    return rep;
}

}  // namespace gtrace
