#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gtrace/analysis.hpp"
#include "gtrace/bounds.hpp"
#include "gtrace/csv.hpp"
#include "gtrace/evaluate.hpp"
#include "gtrace/reconstruct.hpp"

namespace gtrace {

// One row of the verification suite: a named check at a parameter point, the
// measured value against its reference (closed form or bound), and a verdict.
struct VerifyRow {
    std::string check;
    std::string params;
    double estimate = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;  // allowed |estimate - reference|, 0 for exact/one-sided
    bool pass = false;
};

inline void write_verify_csv(std::ostream& os, const std::vector<VerifyRow>& rows) {
    CsvWriter csv(os, {"check", "params", "estimate", "reference", "tolerance", "pass"});
    for (const auto& r : rows)
        csv.row(r.check, r.params, r.estimate, r.reference, r.tolerance, r.pass ? 1 : 0);
}

// Correlated-bit closed forms, both models, both conditionings.
inline std::vector<VerifyRow> verify_correlated_bits(long long samples, std::uint64_t seed) {
    std::vector<VerifyRow> rows;
    Rng rng(seed);
    auto add = [&](const NoiseParams& params, bool cond, double closed, const std::string& label) {
        auto est = mc_flip_probabilities(params, cond, samples, rng);
        VerifyRow row;
        row.check = cond ? "correlated_bits_conditioned" : "correlated_bits";
        row.params = label;
        row.estimate = est.estimate;
        row.reference = closed;
        row.tolerance = 3.0 * est.sigma;
        row.pass = std::abs(est.estimate - closed) <= row.tolerance;
        rows.push_back(std::move(row));
    };
    for (double p : {0.1, 0.3, 0.5}) {
        std::ostringstream l;
        l << "deletion p_e=" << p;
        add(deletion_params(1.0, p), false, p * (1 - p / 2), l.str());
        add(deletion_params(1.0, p), true, p * (1 - p), l.str());
    }
    for (double f : {0.25, 0.4, 0.5}) {
        std::ostringstream l;
        l << "flip f_e=" << f;
        add(flip_params(1.0, f), false, 0.5, l.str());
        add(flip_params(1.0, f), true, 2 * f * (1 - f), l.str());
    }
    return rows;
}

// Non-fixed pair lower bound m >= b(n'-1-b/2): exhaustive at n'=6, sampled at
// n' in {10, 50}.
inline std::vector<VerifyRow> verify_nonfixed_bound(std::uint64_t seed) {
    std::vector<VerifyRow> rows;
    {
        std::vector<int> p{0, 1, 2, 3, 4, 5};
        long long violations = 0, cases = 0;
        do {
            auto c = count_nonfixed(p);
            const double b = c.nonfixed_points;
            if (static_cast<double>(c.nonfixed_pairs) < b * (6 - 1 - b / 2.0) - 1e-9) ++violations;
            ++cases;
        } while (std::next_permutation(p.begin(), p.end()));
        rows.push_back({"nonfixed_pair_bound", "exhaustive n'=6 (720 permutations)",
                        static_cast<double>(violations), 0.0, 0.0, violations == 0 && cases == 720});
    }
    Rng rng(seed);
    for (int n : {10, 50}) {
        long long violations = 0;
        for (int trial = 0; trial < 10000; ++trial) {
            std::vector<int> p(n);
            std::iota(p.begin(), p.end(), 0);
            rng.shuffle(p);
            auto c = count_nonfixed(p);
            const double b = c.nonfixed_points;
            if (static_cast<double>(c.nonfixed_pairs) < b * (n - 1 - b / 2.0) - 1e-9) ++violations;
        }
        std::ostringstream l;
        l << "randomized n'=" << n << " (10000 permutations)";
        rows.push_back({"nonfixed_pair_bound", l.str(), static_cast<double>(violations), 0.0, 0.0,
                        violations == 0});
    }
    return rows;
}

// Partition of the non-fixed pairs: independence, balance, and the N/4 bound.
inline std::vector<VerifyRow> verify_pair_partition(int bijections, std::uint64_t seed) {
    Rng rng(seed);
    long long indep_viol = 0, balance_viol = 0, quarter_viol = 0;
    for (int trial = 0; trial < bijections; ++trial) {
        const int n = 4 + static_cast<int>(rng.uniform_int(37));  // n' <= 40
        std::vector<int> perm(n), dom(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::iota(dom.begin(), dom.end(), 0);
        rng.shuffle(perm);
        auto nset = nonfixed_pair_set(dom, perm);
        auto part = partition_nonfixed_pairs(dom, perm, nset);

        std::vector<std::size_t> sizes{part.parts[0].size(), part.parts[1].size(),
                                       part.parts[2].size()};
        auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
        if (*mx - *mn > 1) ++balance_viol;
        if (nset.size() >= 8 && static_cast<double>(*mn) < static_cast<double>(nset.size()) / 4.0)
            ++quarter_viol;

        auto apply = [&](std::pair<int, int> pr) {
            int a = perm[pr.first], b = perm[pr.second];
            if (a > b) std::swap(a, b);
            return std::pair<int, int>{a, b};
        };
        for (const auto& p : part.parts) {
            std::set<std::pair<int, int>> members(p.begin(), p.end());
            for (auto pr : p)
                if (members.count(apply(pr))) ++indep_viol;
        }
    }
    std::ostringstream l;
    l << bijections << " random bijections, n' <= 40";
    std::vector<VerifyRow> rows;
    rows.push_back({"pair_partition_independent", l.str(), static_cast<double>(indep_viol), 0.0,
                    0.0, indep_viol == 0});
    rows.push_back({"pair_partition_balanced", l.str(), static_cast<double>(balance_viol), 0.0, 0.0,
                    balance_viol == 0});
    rows.push_back({"pair_partition_quarter", l.str(), static_cast<double>(quarter_viol), 0.0, 0.0,
                    quarter_viol == 0});
    return rows;
}

// Concentration-bound tail events against their exponential bounds.
inline std::vector<VerifyRow> verify_tail_bounds(long long samples, std::uint64_t seed) {
    std::vector<VerifyRow> rows;
    Rng rng(seed);
    auto add = [&](const NoiseParams& params, long long N, const std::string& label) {
        for (const auto& check : mc_tail_bounds(params, N, samples, rng)) {
            VerifyRow row;
            row.check = "tail_bound_" + check.event;
            row.params = label;
            row.estimate = check.empirical;
            row.reference = check.bound;
            row.tolerance = 3.0 * check.sigma;
            row.pass = !check.violated;
            rows.push_back(std::move(row));
        }
    };
    for (double p : {0.3, 0.5})
        for (long long N : {1000LL, 10000LL}) {
            std::ostringstream l;
            l << "deletion p_e=" << p << " N=" << N;
            add(deletion_params(1.0, p), N, l.str());
        }
    for (double f : {0.25, 0.4})
        for (long long N : {1000LL, 10000LL}) {
            std::ostringstream l;
            l << "flip f_e=" << f << " N=" << N;
            add(flip_params(1.0, f), N, l.str());
        }
    return rows;
}

// Exact vs heuristic triple search on tiny instances.
inline std::vector<VerifyRow> verify_triple_search(int instances, long long budget,
                                                   std::uint64_t seed) {
    int equal = 0, worse = 0, better = 0;
    for (int trial = 0; trial < instances; ++trial) {
        Rng inst(derive_seed(seed, 2 * trial));
        auto g = random_graph(7, derive_seed(seed, 2 * trial + 1));
        Trace t1 = generate_trace(g, deletion_params(0.9, 0.5), inst);
        Trace t2 = generate_trace(g, deletion_params(0.9, 0.5), inst);
        const int k = std::min({6, t1.observed().vertex_count(), t2.observed().vertex_count()});
        if (k < 2) {
            ++equal;  // degenerate draw; nothing to search
            continue;
        }
        auto exact = best_triple_exact(t1.observed(), t2.observed(), k);
        Rng search(derive_seed(seed, 1000000 + trial));
        auto heur = best_triple_heuristic(t1.observed(), t2.observed(), k, budget, search);
        if (heur.delta < exact.delta) ++better;
        else if (heur.delta == exact.delta) ++equal;
        else ++worse;
    }
    std::ostringstream l;
    l << instances << " instances, |V| <= 7-8, budget " << budget;
    std::vector<VerifyRow> rows;
    rows.push_back({"triple_search_never_better_than_exact", l.str(), static_cast<double>(better),
                    0.0, 0.0, better == 0});
    rows.push_back({"triple_search_matches_exact", l.str(), static_cast<double>(equal),
                    std::ceil(0.95 * instances), 0.0,
                    equal >= static_cast<int>(std::ceil(0.95 * instances))});
    return rows;
}

// Coupled-trace checks: collision rate, collision=>isomorphism, and per-edge
// marginal survival.
inline std::vector<VerifyRow> verify_coupling(int n, long long samples, std::uint64_t seed) {
    Rng rng(seed);
    const int h = n / 2;
    long long collisions = 0, iso_ok = 0;
    std::vector<long long> surv1(n, 0), surv2(n, 0);
    for (long long s = 0; s < samples; ++s) {
        auto cs = coupled_deletion_sample(n, rng);  // throws if collision without isomorphism
        if (cs.collision) {
            ++collisions;
            ++iso_ok;  // the sampler asserted it already
        }
        for (int i = 0; i < n; ++i) {
            if (cs.trace1.has_edge(i, (i + 1) % n)) ++surv1[i];
            const int cyc = i < h ? 0 : 1;
            const int idx = i < h ? i : i - h;
            if (cs.trace2.has_edge(cyc * h + idx, cyc * h + (idx + 1) % h)) ++surv2[i];
        }
    }
    std::vector<VerifyRow> rows;
    const double rate = static_cast<double>(collisions) / static_cast<double>(samples);
    const double want = 1.0 - std::pow(0.75, h);
    const double sigma = std::sqrt(want * (1.0 - want) / static_cast<double>(samples));
    std::ostringstream l;
    l << "n=" << n << " samples=" << samples;
    rows.push_back({"coupling_collision_rate", l.str(), rate, want, 3.0 * sigma,
                    std::abs(rate - want) <= 3.0 * sigma});
    rows.push_back({"coupling_collision_isomorphism", l.str(),
                    collisions ? static_cast<double>(iso_ok) / collisions : 1.0, 1.0, 0.0,
                    iso_ok == collisions});
    const double msigma = std::sqrt(0.25 / static_cast<double>(samples));
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(surv1[i] / static_cast<double>(samples) - 0.5));
        worst = std::max(worst, std::abs(surv2[i] / static_cast<double>(samples) - 0.5));
    }
    rows.push_back({"coupling_marginal_survival", l.str(), 0.5 + worst, 0.5, 3.0 * msigma,
                    worst <= 3.0 * msigma});
    return rows;
}

// Cut statistics of the path-complement family.
inline std::vector<VerifyRow> verify_cut_statistics(int r_max = 4) {
    std::vector<VerifyRow> rows;
    for (int r = 2; r <= r_max; ++r) {
        auto inst = path_complement_instance(r);
        const int n = 16 * r - 8;
        const auto c1 = static_cast<double>(two_cut_special_count(inst.g1, n));
        const auto c2 = static_cast<double>(two_cut_special_count(inst.g2, n));
        std::ostringstream l;
        l << "r=" << r;
        rows.push_back({"two_cut_special_count_g1", l.str(), c1, static_cast<double>(r), 0.0,
                        c1 == static_cast<double>(r)});
        rows.push_back({"two_cut_special_count_g2", l.str(), c2, static_cast<double>(r - 1), 0.0,
                        c2 == static_cast<double>(r - 1)});
    }
    {
        long long ok = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    for (int l = 0; l < 2; ++l)
                        if (single_edge_removal_isomorphic(2, i, j, k, l)) ++ok;
        rows.push_back({"single_edge_removal_isomorphic", "r=2, all 16 tuples",
                        static_cast<double>(ok), 16.0, 0.0, ok == 16});
    }
    return rows;
}

// Signature-pairing quality against the provenance oracle (precision/recall).
inline std::vector<VerifyRow> verify_pairing_quality(int n, double p_v, double p_e, int pairs,
                                                     long long budget, std::uint64_t seed) {
    long long matched = 0, correct = 0, oracle_total = 0;
    auto g = random_graph(n, derive_seed(seed, 9001));
    const NoiseParams params = deletion_params(p_v, p_e);
    const auto constants = model_constants(params);
    for (int trial = 0; trial < pairs; ++trial) {
        Rng rng(derive_seed(seed, trial));
        Trace t1 = generate_trace(g, params, rng);
        Trace t2 = generate_trace(g, params, rng);
        auto oracle = oracle_pairing(t1, t2);
        oracle_total += static_cast<long long>(oracle.pairs.size());
        int k;
        try {
            k = algorithm1_params(n, p_v).k;
        } catch (const std::domain_error&) {
            continue;  // no triple can be formed; the pairing contributes nothing
        }
        k = std::min({k, t1.observed().vertex_count(), t2.observed().vertex_count()});
        if (k < 1) continue;
        auto triple = best_triple_heuristic(t1.observed(), t2.observed(), k, budget, rng);
        auto m = pair_vertices(t1.observed(), t2.observed(), triple, constants);
        matched += static_cast<long long>(m.pairs.size());
        for (auto [v, w] : m.pairs)
            if (t1.provenance()[v] == t2.provenance()[w]) ++correct;
    }
    const double precision = matched ? static_cast<double>(correct) / matched : 0.0;
    const double recall = oracle_total ? static_cast<double>(correct) / oracle_total : 0.0;
    std::ostringstream l;
    l << "n=" << n << " p_v=" << p_v << " p_e=" << p_e << " pairs=" << pairs;
    std::vector<VerifyRow> rows;
    rows.push_back({"pairing_precision", l.str(), precision, 0.99, 0.0, precision >= 0.99});
    rows.push_back({"pairing_recall", l.str(), recall, 0.99, 0.0, recall >= 0.99});
    return rows;
}

// ---------------------------------------------------------------------------
// Reconstruction sweep

struct SweepConfig {
    NoiseParams params;
    int n = 50;
    int t = 0;  // 0 resolves via required_traces
    int trials = 10;
    std::uint64_t seed = 1;
    long long budget = 200000;
    PairingPlanKind plan = PairingPlanKind::LogReferences;
    bool timing = true;  // false zeroes the wall-time column for byte-stable output
};

struct SweepRow {
    int n;
    double p_v;
    double noise;  // p_e or f_e
    int t;
    std::uint64_t seed;
    bool success;
    int class_count;
    long long conflicts;
    double wall_ms;
};

inline std::vector<SweepRow> run_reconstruction_sweep(const SweepConfig& config) {
    std::vector<SweepRow> rows;
    const int t = config.t > 0 ? config.t : required_traces(config.params, config.n);
    for (int trial = 0; trial < config.trials; ++trial) {
        const std::uint64_t trial_seed = config.seed ^ static_cast<std::uint64_t>(trial);
        Rng rng(trial_seed);
        auto g = random_graph(config.n, derive_seed(trial_seed, 0xabcdull));
        EndToEndOptions options;
        options.search_budget = config.budget;
        options.plan = config.plan;
        const auto start = std::chrono::steady_clock::now();
        auto run = reconstruct_end_to_end(g, config.params, t, options, rng);
        const auto stop = std::chrono::steady_clock::now();
        const auto eval = evaluate_reconstruction(run, g);
        SweepRow row;
        row.n = config.n;
        row.p_v = config.params.p_v;
        row.noise = config.params.model == NoiseModel::EdgeDeletion ? config.params.p_e
                                                                    : config.params.f_e;
        row.t = t;
        row.seed = trial_seed;
        row.success = eval.exact;
        row.class_count = run.report.class_count;
        row.conflicts = run.report.conflicts;
        row.wall_ms = config.timing
                          ? std::chrono::duration<double, std::milli>(stop - start).count()
                          : 0.0;
        rows.push_back(row);
    }
    return rows;
}

inline void write_sweep_csv(std::ostream& os, NoiseModel model, const std::vector<SweepRow>& rows) {
    const char* noise_col = model == NoiseModel::EdgeDeletion ? "p_e" : "f_e";
    CsvWriter csv(os, {"n", "p_v", noise_col, "t", "seed", "success", "class_count", "conflicts",
                       "wall_ms"});
    for (const auto& r : rows)
        csv.row(r.n, r.p_v, r.noise, r.t, r.seed, r.success ? 1 : 0, r.class_count, r.conflicts,
                r.wall_ms);
}

}  // namespace gtrace
