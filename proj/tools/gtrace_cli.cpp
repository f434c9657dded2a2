// Command-line harness: trace generation, pairwise pairing, reconstruction
// sweeps, the verification matrix, and the lower-bound simulations. Every
// subcommand takes an explicit seed and writes deterministic CSV.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gtrace/harness.hpp"
#include "gtrace/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gtrace;

namespace {

fs::path resolve_output(const std::string& name) {
    fs::path p(name);
    if (p.is_absolute()) return p;
    if (const char* dir = std::getenv("GTRACE_OUT_DIR")) return fs::path(dir) / p;
    return p;
}

std::ofstream open_output(const std::string& name) {
    auto p = resolve_output(name);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot open output file: " + p.string());
    return os;
}

NoiseParams params_from(const std::string& model, double p_v, double p_e, double f_e) {
    if (model == "deletion") return deletion_params(p_v, p_e);
    if (model == "flip") return flip_params(p_v, f_e);
    throw CLI::ValidationError("--model", "expected 'deletion' or 'flip'");
}

// JSON config support: a flat object whose keys mirror the long option names
// ("p-v", "seed", ...). File values act as defaults; explicit flags win.
std::vector<std::string> merge_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (config_path.empty()) return args;
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + config_path);
    json j = json::parse(in);
    std::vector<std::string> merged;
    if (!args.empty()) merged.push_back(args.front());  // subcommand first
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string flag = "--" + it.key();
        bool overridden = false;
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) overridden = true;
        if (overridden) continue;
        std::string value = it.value().is_string() ? it.value().get<std::string>()
                                                   : it.value().dump();
        merged.push_back(flag + "=" + value);
    }
    merged.insert(merged.end(), args.begin() + (args.empty() ? 0 : 1), args.end());
    return merged;
}

int run_gen(const std::string& model, int n, double p_v, double p_e, double f_e, int t,
            std::uint64_t seed, const std::string& out) {
    auto params = params_from(model, p_v, p_e, f_e);
    auto g = random_graph(n, derive_seed(seed, 0xabcdull));
    Rng rng(seed);
    std::vector<Trace> traces;
    for (int i = 0; i < t; ++i) {
        Rng trace_rng(derive_seed(rng.next_u64(), static_cast<std::uint64_t>(i)));
        traces.push_back(generate_trace(g, params, trace_rng));
    }
    auto graph_os = open_output(out + ".graph");
    write_edge_list(graph_os, g);
    auto batch_os = open_output(out + ".traces");
    write_trace_batch(batch_os, traces);
    auto prov_os = open_output(out + ".prov");
    write_provenance_sidecar(prov_os, traces);
    std::cout << "wrote " << t << " traces of a " << n << "-vertex graph to " << out
              << ".{graph,traces,prov}\n";
    return 0;
}

int run_pair(const std::string& traces_file, int i, int j, const std::string& model, int n,
             double p_v, double p_e, double f_e, long long budget, std::uint64_t seed,
             const std::string& out) {
    std::ifstream in(traces_file);
    if (!in) throw std::runtime_error("cannot open trace batch: " + traces_file);
    auto traces = read_trace_batch(in);
    if (i < 0 || j < 0 || i >= static_cast<int>(traces.size()) ||
        j >= static_cast<int>(traces.size()) || i == j)
        throw std::runtime_error("pair: trace indices out of range");
    auto params = params_from(model, p_v, p_e, f_e);
    std::vector<Trace> pairwise{traces[i], traces[j]};
    Rng norm_rng(derive_seed(seed, 0x6e6f726dull));
    NoiseParams effective = params;
    if (params.model == NoiseModel::EdgeDeletion) {
        effective.p_e = normalize_deletion(pairwise, params.p_e, norm_rng);
    } else {
        effective.f_e = normalize_flip(pairwise, params.f_e, norm_rng);
        if (effective.f_e < 0.25) effective.f_e = normalize_flip(pairwise, effective.f_e, norm_rng);
    }
    const auto constants = model_constants(effective);
    auto alg = algorithm1_params(n, p_v);
    const LabeledGraph& a = pairwise[0].observed();
    const LabeledGraph& b = pairwise[1].observed();
    const int k = std::min({alg.k, a.vertex_count(), b.vertex_count()});
    if (k < 1) throw std::runtime_error("pair: empty trace");
    Rng rng(seed);
    SearchDiagnostics diag;
    auto triple = best_triple_heuristic(a, b, k, budget, rng, &diag);
    auto matching = pair_vertices(a, b, triple, constants);

    auto os = open_output(out);
    CsvWriter csv(os, {"record", "field1", "field2"});
    for (auto [evals, delta_value] : diag.trajectory)
        csv.row("delta_trajectory", evals, delta_value);
    csv.row("triple_delta", triple.delta, k);
    csv.row("ambiguous", static_cast<long long>(matching.ambiguous_left.size()),
            static_cast<long long>(matching.ambiguous_right.size()));
    for (auto [v, w] : matching.pairs) csv.row("pair", v, w);
    std::cout << "paired " << matching.pairs.size() << " vertices (delta " << triple.delta
              << ", k " << k << ")\n";
    return 0;
}

int run_reconstruct(const std::string& model, int n, double p_v, double p_e, double f_e, int t,
                    int trials, long long budget, const std::string& plan, std::uint64_t seed,
                    bool timing, const std::string& out) {
    SweepConfig config;
    config.params = params_from(model, p_v, p_e, f_e);
    config.n = n;
    config.t = t;
    config.trials = trials;
    config.seed = seed;
    config.budget = budget;
    config.timing = timing;
    if (plan == "all") config.plan = PairingPlanKind::AllPairs;
    else if (plan == "log") config.plan = PairingPlanKind::LogReferences;
    else throw CLI::ValidationError("--plan", "expected 'log' or 'all'");

    auto rows = run_reconstruction_sweep(config);
    auto os = open_output(out);
    write_sweep_csv(os, config.params.model, rows);
    int successes = 0;
    for (const auto& r : rows) successes += r.success ? 1 : 0;
    std::cout << successes << "/" << rows.size() << " exact reconstructions (t="
              << (rows.empty() ? 0 : rows.front().t) << ")\n";
    return 0;
}

const std::vector<std::string> kVerifyChecks = {
    "correlated_bits", "nonfixed_pairs", "pair_partition", "tail_bounds",
    "triple_search",   "coupling",       "cut_statistics", "pairing_quality",
};

int run_verify(std::vector<std::string> checks, long long samples, std::uint64_t seed,
               const std::string& out) {
    if (samples <= 0) throw CLI::ValidationError("--samples", "must be positive");
    if (checks.empty()) checks = kVerifyChecks;
    std::set<std::string> known(kVerifyChecks.begin(), kVerifyChecks.end());
    for (const auto& c : checks) {
        if (!known.count(c)) {
            std::ostringstream msg;
            msg << "unknown check '" << c << "'; available:";
            for (const auto& k : kVerifyChecks) msg << " " << k;
            throw CLI::ValidationError("--checks", msg.str());
        }
    }
    std::vector<VerifyRow> rows;
    auto append = [&rows](std::vector<VerifyRow> extra) {
        rows.insert(rows.end(), extra.begin(), extra.end());
    };
    for (const auto& c : checks) {
        if (c == "correlated_bits") append(verify_correlated_bits(samples, derive_seed(seed, 1)));
        if (c == "nonfixed_pairs") append(verify_nonfixed_bound(derive_seed(seed, 2)));
        if (c == "pair_partition") append(verify_pair_partition(1000, derive_seed(seed, 3)));
        if (c == "tail_bounds")
            append(verify_tail_bounds(std::min<long long>(samples, 100000), derive_seed(seed, 4)));
        if (c == "triple_search") append(verify_triple_search(100, 100000, derive_seed(seed, 5)));
        if (c == "coupling") append(verify_coupling(10, 100000, derive_seed(seed, 6)));
        if (c == "cut_statistics") append(verify_cut_statistics());
        if (c == "pairing_quality")
            append(verify_pairing_quality(1000, 0.5, 0.5, 10, 200000, derive_seed(seed, 7)));
    }
    auto os = open_output(out);
    write_verify_csv(os, rows);
    int failed = 0;
    for (const auto& r : rows)
        if (!r.pass) ++failed;
    std::cout << rows.size() - failed << "/" << rows.size() << " verification rows pass\n";
    return failed == 0 ? 0 : 1;
}

int run_bounds_coupling(int n, long long samples, std::uint64_t seed, const std::string& out) {
    auto rows = verify_coupling(n, samples, seed);
    auto os = open_output(out);
    write_verify_csv(os, rows);
    int failed = 0;
    for (const auto& r : rows)
        if (!r.pass) ++failed;
    return failed == 0 ? 0 : 1;
}

int run_bounds_cutstats(int r, const std::string& out) {
    auto rows = verify_cut_statistics(r);
    auto os = open_output(out);
    write_verify_csv(os, rows);
    int failed = 0;
    for (const auto& row : rows)
        if (!row.pass) ++failed;
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph reconstruction from noisy random subgraph traces"};
    app.require_subcommand(1);

    std::string model = "deletion", plan = "log", out = "out.csv", traces_file;
    int n = 50, t = 0, trials = 10, trace_i = 0, trace_j = 1, r = 2;
    double p_v = 1.0, p_e = 0.5, f_e = 0.25;
    long long budget = 200000, samples = 1000000;
    std::uint64_t seed = 0;
    bool no_timing = false;
    std::vector<std::string> checks;

    auto add_model_opts = [&](CLI::App* cmd) {
        cmd->add_option("--model", model, "deletion | flip");
        cmd->add_option("--n", n, "vertex count of the hidden graph");
        cmd->add_option("--p-v", p_v, "vertex sampling probability");
        cmd->add_option("--p-e", p_e, "deletion model: edge keep probability");
        cmd->add_option("--f-e", f_e, "flip model: pair flip probability");
    };
    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "base seed (required)")->required();
    };

    auto* gen = app.add_subcommand("gen", "generate a trace batch plus provenance sidecar");
    add_model_opts(gen);
    add_seed(gen);
    gen->add_option("--t", t, "number of traces")->required();
    gen->add_option("--out", out, "output prefix")->required();

    auto* pair = app.add_subcommand("pair", "pair two traces from a batch file");
    add_model_opts(pair);
    add_seed(pair);
    pair->add_option("--traces", traces_file, "trace batch file")->required();
    pair->add_option("--i", trace_i, "first trace index");
    pair->add_option("--j", trace_j, "second trace index");
    pair->add_option("--budget", budget, "search move evaluations");
    pair->add_option("--out", out, "diagnostics CSV");

    auto* rec = app.add_subcommand("reconstruct", "end-to-end reconstruction sweep");
    add_model_opts(rec);
    add_seed(rec);
    rec->add_option("--t", t, "trace count; 0 resolves the required-trace bound");
    rec->add_option("--trials", trials, "independent trials");
    rec->add_option("--budget", budget, "search move evaluations per trace pair");
    rec->add_option("--plan", plan, "pairing plan: log | all");
    rec->add_flag("--no-timing", no_timing, "zero the wall-time column (byte-stable output)");
    rec->add_option("--out", out, "sweep CSV");

    auto* verify = app.add_subcommand("verify", "run the verification matrix");
    add_seed(verify);
    verify->add_option("--samples", samples, "Monte-Carlo samples for the closed-form checks");
    verify->add_option("--checks", checks, "subset of checks to run")->delimiter(',');
    verify->add_option("--out", out, "verification CSV");

    auto* bounds = app.add_subcommand("bounds", "lower-bound constructions and simulations");
    bounds->require_subcommand(1);
    auto* coupling = bounds->add_subcommand("coupling", "coupled deletion traces of the cycle pair");
    coupling->add_option("--n", n, "cycle length (even, >= 6)");
    coupling->add_option("--samples", samples, "number of coupled samples");
    add_seed(coupling);
    coupling->add_option("--out", out, "CSV output");
    auto* cutstats = bounds->add_subcommand("cutstats", "2-cut statistics of the path family");
    cutstats->add_option("--r", r, "family size parameter (>= 2)");
    cutstats->add_option("--out", out, "CSV output");

    try {
        auto args = merge_config_args(argc, argv);
        // CLI11 parses from the back
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (gen->parsed()) return run_gen(model, n, p_v, p_e, f_e, t, seed, out);
        if (pair->parsed())
            return run_pair(traces_file, trace_i, trace_j, model, n, p_v, p_e, f_e, budget, seed,
                            out);
        if (rec->parsed())
            return run_reconstruct(model, n, p_v, p_e, f_e, t, trials, budget, plan, seed,
                                   !no_timing, out);
        if (verify->parsed()) return run_verify(checks, samples, seed, out);
        if (bounds->parsed()) {
            if (coupling->parsed()) return run_bounds_coupling(n, samples, seed, out);
            if (cutstats->parsed()) return run_bounds_cutstats(r, out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
