#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "combpso/harness.hpp"

namespace {

using combpso::ExperimentSpec;
using json = nlohmann::ordered_json;

double round6(double v) {
    const std::string s = combpso::strfmt("%.6g", v);
    return std::strtod(s.c_str(), nullptr);
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in)
        throw combpso::ConfigError(
            combpso::strfmt("cannot open config '%s'", path.c_str()));
    json j;
    try {
        in >> j;
    } catch (const std::exception& ex) {
        throw combpso::ConfigError(
            combpso::strfmt("config '%s': %s", path.c_str(), ex.what()));
    }
    if (!j.is_object())
        throw combpso::ConfigError(
            combpso::strfmt("config '%s': expected a JSON object", path.c_str()));
    return j;
}

// CLI flags bound to an ExperimentSpec plus a seed for single runs.
// A JSON config file supplies defaults; explicitly passed flags win.
struct SpecCli {
    std::string algo = "so-combpso";
    std::string dataset = "syn2";
    std::string csv_path;
    std::uint64_t n_total = 10;
    std::uint64_t m_samples = 200;
    std::string monks_rule = "paper";
    int runs = 10;
    std::uint64_t base_seed = 1;
    double train_fraction = 0.7;
    int folds = 10;
    bool no_stratify = false;
    std::string oracle = "rf";
    int ntree = 100;
    int nodesize = 1;
    bool memoize = false;
    int swarm = 0;
    int iters = 0;
    int theta = 0;
    double gamma = 0.0;
    double alpha = 0.0;
    double lambda = 0.0;
    std::uint64_t capacity = 0;
    double schedule_a = 0.0;
    double schedule_b = 0.0;
    bool per_dim_r = false;
    bool leader_hamming = false;
    double c1 = 0.0;
    double c2 = 0.0;
    int threads = 0;
    std::string config_path;

    std::map<std::string, CLI::Option*> opt;

    void add_options(CLI::App* cmd, bool with_runs) {
        opt["algo"] = cmd->add_option("--algo", algo,
                                      "so-combpso | mo-combpso | bpso | mopso");
        opt["dataset"] =
            cmd->add_option("--dataset", dataset, "monks | syn1 | syn2 | csv");
        opt["csv"] = cmd->add_option("--csv", csv_path, "CSV file path");
        opt["n_total"] =
            cmd->add_option("--n-total", n_total, "total feature count");
        opt["m"] = cmd->add_option("--m", m_samples,
                                   "sample count for syn1/syn2 (default 200)");
        opt["monks_rule"] = cmd->add_option("--monks-rule", monks_rule,
                                            "paper | uci label rule");
        if (with_runs) {
            opt["runs"] = cmd->add_option("--runs", runs, "independent runs");
            opt["base_seed"] =
                cmd->add_option("--base-seed", base_seed,
                                "run r uses seed base_seed + r");
        }
        opt["train_fraction"] = cmd->add_option("--train-fraction",
                                                train_fraction, "default 0.7");
        opt["folds"] = cmd->add_option("--folds", folds, "CV folds, default 10");
        opt["no_stratify"] = cmd->add_flag("--no-stratify", no_stratify,
                                           "disable stratified splitting");
        opt["oracle"] = cmd->add_option("--oracle", oracle, "rf | stump | 1nn");
        opt["ntree"] = cmd->add_option("--ntree", ntree, "forest size");
        opt["nodesize"] =
            cmd->add_option("--nodesize", nodesize, "min terminal node size");
        opt["memoize"] = cmd->add_flag(
            "--memoize", memoize,
            "cache evaluations by mask; function calls then count misses");
        opt["swarm"] = cmd->add_option("--swarm", swarm, "swarm size override");
        opt["iters"] = cmd->add_option("--iters", iters, "iteration override");
        opt["theta"] = cmd->add_option("--theta", theta, "stagnation threshold");
        opt["gamma"] = cmd->add_option("--gamma", gamma, "turbulence fraction");
        opt["alpha"] = cmd->add_option("--alpha", alpha, "fitness weight");
        opt["lambda"] = cmd->add_option("--lambda", lambda,
                                        "velocity asymmetry coefficient");
        opt["capacity"] =
            cmd->add_option("--capacity", capacity, "archive capacity");
        opt["schedule_a"] = cmd->add_option("--schedule-a", schedule_a,
                                            "schedule transition point");
        opt["schedule_b"] =
            cmd->add_option("--schedule-b", schedule_b, "schedule steepness");
        opt["per_dim_r"] = cmd->add_flag("--per-dim-r", per_dim_r,
                                         "draw r1,r2 per dimension");
        opt["leader_hamming"] = cmd->add_flag(
            "--leader-hamming", leader_hamming,
            "leader distance on masks instead of continuous positions");
        opt["c1"] = cmd->add_option("--c1", c1, "baseline cognitive coefficient");
        opt["c2"] = cmd->add_option("--c2", c2, "baseline social coefficient");
        opt["threads"] = cmd->add_option("--threads", threads,
                                         "worker threads (results unaffected)");
        cmd->add_option("--config", config_path,
                        "JSON config mirroring these flags; flags override it");
    }

    bool passed(const std::string& name) const {
        auto it = opt.find(name);
        return it != opt.end() && it->second->count() > 0;
    }

    template <typename T>
    void pick(const json& cfg, const std::string& key, T cli_value, T& out) {
        if (passed(key))
            out = cli_value;
        else if (cfg.contains(key))
            out = cfg.at(key).get<T>();
    }

    template <typename T>
    void pick_opt(const json& cfg, const std::string& key, T cli_value,
                  std::optional<T>& out) {
        if (passed(key))
            out = cli_value;
        else if (cfg.contains(key))
            out = cfg.at(key).get<T>();
    }

    ExperimentSpec to_spec() const {
        const json cfg = load_config(config_path);
        SpecCli merged = *this;  // defaults + CLI values already present

        ExperimentSpec spec;
        std::string algo_s = algo, dataset_s = dataset, monks_s = monks_rule,
                    oracle_s = oracle;
        merged.pick(cfg, "algo", algo, algo_s);
        merged.pick(cfg, "dataset", dataset, dataset_s);
        spec.algo = combpso::algorithm_from_string(algo_s);
        spec.dataset = combpso::dataset_from_string(dataset_s);
        merged.pick(cfg, "csv", csv_path, spec.csv_path);
        std::uint64_t n_total_v = n_total, m_samples_v = m_samples;
        merged.pick(cfg, "n_total", n_total, n_total_v);
        merged.pick(cfg, "m", m_samples, m_samples_v);
        spec.n_total = static_cast<std::size_t>(n_total_v);
        spec.m_samples = static_cast<std::size_t>(m_samples_v);
        merged.pick(cfg, "monks_rule", monks_rule, monks_s);
        if (monks_s == "paper")
            spec.monks_rule = combpso::MonksRule::paper;
        else if (monks_s == "uci")
            spec.monks_rule = combpso::MonksRule::uci;
        else
            throw combpso::ConfigError("monks-rule must be 'paper' or 'uci'");
        merged.pick(cfg, "runs", runs, spec.runs);
        merged.pick(cfg, "base_seed", base_seed, spec.base_seed);
        merged.pick(cfg, "train_fraction", train_fraction, spec.train_fraction);
        merged.pick(cfg, "folds", folds, spec.folds);
        bool nostrat = no_stratify;
        merged.pick(cfg, "no_stratify", no_stratify, nostrat);
        spec.stratified = !nostrat;
        merged.pick(cfg, "oracle", oracle, oracle_s);
        if (oracle_s == "rf")
            spec.oracle.kind = combpso::OracleKind::random_forest;
        else if (oracle_s == "stump")
            spec.oracle.kind = combpso::OracleKind::stump;
        else if (oracle_s == "1nn")
            spec.oracle.kind = combpso::OracleKind::nearest_neighbor;
        else
            throw combpso::ConfigError("oracle must be rf, stump or 1nn");
        merged.pick(cfg, "ntree", ntree, spec.oracle.ntree);
        merged.pick(cfg, "nodesize", nodesize, spec.oracle.nodesize);
        merged.pick(cfg, "memoize", memoize, spec.oracle.memoize);

        merged.pick_opt(cfg, "swarm", swarm, spec.overrides.swarm_size);
        merged.pick_opt(cfg, "iters", iters, spec.overrides.iterations);
        merged.pick_opt(cfg, "theta", theta, spec.overrides.theta);
        merged.pick_opt(cfg, "gamma", gamma, spec.overrides.gamma);
        merged.pick_opt(cfg, "alpha", alpha, spec.overrides.alpha);
        merged.pick_opt(cfg, "lambda", lambda, spec.overrides.lambda);
        std::optional<std::uint64_t> cap;
        merged.pick_opt(cfg, "capacity", capacity, cap);
        if (cap) spec.overrides.archive_capacity = *cap;
        merged.pick_opt(cfg, "schedule_a", schedule_a, spec.overrides.schedule_a);
        merged.pick_opt(cfg, "schedule_b", schedule_b, spec.overrides.schedule_b);
        merged.pick_opt(cfg, "per_dim_r", per_dim_r,
                        spec.overrides.per_dimension_r);
        merged.pick_opt(cfg, "leader_hamming", leader_hamming,
                        spec.overrides.leader_hamming);
        merged.pick_opt(cfg, "c1", c1, spec.overrides.c1);
        merged.pick_opt(cfg, "c2", c2, spec.overrides.c2);

        int th = threads;
        merged.pick(cfg, "threads", threads, th);
        spec.threads = th > 0
                           ? th
                           : static_cast<int>(std::max(
                                 1u, std::thread::hardware_concurrency()));
        return spec;
    }
};

json fitness_json(const combpso::Fitness& f) {
    json j;
    j["scalar"] = round6(f.scalar);
    j["error"] = round6(f.error);
    j["size_fraction"] = round6(f.size_fraction);
    return j;
}

json mask_json(const combpso::Mask& mask) {
    auto arr = json::array();
    for (auto i : combpso::mask_indices(mask)) arr.push_back(i);
    return arr;
}

int cmd_gen_data(const std::string& dataset, std::uint64_t n_total,
                 std::uint64_t m, std::uint64_t seed,
                 const std::string& monks_rule, const std::string& out_path) {
    combpso::Dataset ds;
    if (dataset == "monks") {
        ds = combpso::gen_monks3(n_total, seed,
                                 monks_rule == "uci"
                                     ? combpso::MonksRule::uci
                                     : combpso::MonksRule::paper);
    } else if (dataset == "syn1") {
        ds = combpso::gen_synthetic1(m, n_total, seed);
    } else if (dataset == "syn2") {
        ds = combpso::gen_synthetic2(m, n_total, seed);
    } else {
        throw combpso::ConfigError("gen-data: dataset must be monks, syn1 or syn2");
    }
    combpso::save_csv(ds, out_path);
    std::cout << "wrote " << ds.n_samples() << " x " << ds.n_features()
              << " dataset to " << out_path << "\n";
    return 0;
}

int cmd_run(const SpecCli& cli, std::uint64_t seed, const std::string& out_path) {
    ExperimentSpec spec = cli.to_spec();
    spec.base_seed = seed;  // dataset generation ties to the run seed
    const combpso::Dataset ds = combpso::build_dataset(spec);
    const auto split = combpso::make_split(ds, spec.train_fraction, spec.folds,
                                           seed, spec.stratified);
    combpso::Oracle oracle(ds, split, combpso::make_oracle_config(spec, seed));
    const std::size_t n = ds.n_features();

    json j;
    j["schema"] = "combpso-run-v1";
    j["algorithm"] = combpso::to_string(spec.algo);
    j["dataset"] = combpso::to_string(spec.dataset);
    j["n_total"] = spec.n_total;
    j["seed"] = seed;

    using combpso::AlgorithmId;
    if (spec.algo == AlgorithmId::so_combpso || spec.algo == AlgorithmId::bpso) {
        combpso::SORunResult res;
        if (spec.algo == AlgorithmId::so_combpso) {
            auto cfg = combpso::make_so_config(spec, n, seed);
            cfg.threads = spec.threads;
            res = combpso::run_so(cfg, ds, split, oracle);
        } else {
            auto cfg = combpso::make_baseline_config(spec, n, seed);
            cfg.threads = spec.threads;
            res = combpso::run_bpso(cfg, ds, split, oracle);
        }
        j["mask"] = mask_json(res.best_mask);
        j["fitness"] = fitness_json(res.best_fitness);
        j["cv_error"] = round6(res.cv_error);
        j["test_error"] = round6(res.test_error);
        j["function_calls"] = res.function_calls;
        auto hist = json::array();
        for (double h : res.history) hist.push_back(round6(h));
        j["history"] = hist;
        std::cout << "best mask {";
        bool first = true;
        for (auto i : combpso::mask_indices(res.best_mask)) {
            std::cout << (first ? "" : ",") << i;
            first = false;
        }
        std::cout << "}  F=" << res.best_fitness.scalar
                  << "  cv_error=" << res.cv_error
                  << "  test_error=" << res.test_error
                  << "  calls=" << res.function_calls << "\n";
    } else {
        combpso::MORunResult res;
        if (spec.algo == AlgorithmId::mo_combpso) {
            auto cfg = combpso::make_mo_config(spec, n, seed);
            cfg.threads = spec.threads;
            res = combpso::run_mo(cfg, ds, split, oracle);
        } else {
            auto cfg = combpso::make_baseline_config(spec, n, seed);
            cfg.threads = spec.threads;
            res = combpso::run_mopso(cfg, ds, split, oracle);
        }
        auto arch = json::array();
        for (const auto& e : res.archive) {
            json je;
            je["mask"] = mask_json(e.mask);
            je["f1"] = round6(e.objectives.f1);
            je["f2"] = round6(e.objectives.f2);
            arch.push_back(je);
        }
        j["archive"] = arch;
        j["function_calls"] = res.function_calls;
        std::cout << "archive size " << res.archive.size()
                  << "  calls=" << res.function_calls << "\n";
    }

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out)
            throw combpso::ParseError(
                combpso::strfmt("cannot write '%s'", out_path.c_str()));
        out << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_experiment(const SpecCli& cli, const std::string& format,
                   const std::string& out_path) {
    const ExperimentSpec spec = cli.to_spec();
    const auto report = combpso::run_experiment(spec);
    const auto fmt = format == "csv" ? combpso::ReportFormat::csv
                                     : combpso::ReportFormat::json;
    if (!out_path.empty()) combpso::emit_report(report, fmt, out_path);

    std::cout << combpso::to_string(spec.algo) << " on "
              << combpso::to_string(spec.dataset) << " n=" << spec.n_total
              << " runs=" << spec.runs << ":  <FS>=" << report.mean_fs
              << "  <E_cv>=" << report.mean_error_cv
              << "  <E_test>=" << report.mean_error_test;
    if (report.mean_srf) std::cout << "  <SRF>=" << *report.mean_srf;
    std::cout << "  <FC>=" << report.mean_fc;
    if (!report.merged_front.empty())
        std::cout << "  front=" << report.merged_front.size();
    std::cout << "\n";
    return 0;
}

int cmd_report(const std::string& in_path, const std::string& format,
               const std::string& out_path) {
    std::ifstream in(in_path);
    if (!in)
        throw combpso::ParseError(
            combpso::strfmt("cannot open '%s'", in_path.c_str()));
    json j;
    in >> j;
    std::ofstream out(out_path);
    if (!out)
        throw combpso::ParseError(
            combpso::strfmt("cannot write '%s'", out_path.c_str()));
    if (format == "csv")
        out << combpso::report_csv_from_json(j);
    else
        out << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"COMB-PSO feature selection benchmark suite"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset CSV");
    std::string gd_dataset = "syn2", gd_rule = "paper", gd_out;
    std::uint64_t gd_n = 10, gd_m = 200, gd_seed = 1;
    gen->add_option("--dataset", gd_dataset, "monks | syn1 | syn2")->required();
    gen->add_option("--n-total", gd_n, "total feature count")->required();
    gen->add_option("--m", gd_m, "sample count for syn1/syn2");
    gen->add_option("--seed", gd_seed, "generator seed");
    gen->add_option("--monks-rule", gd_rule, "paper | uci");
    gen->add_option("--out", gd_out, "output CSV path")->required();

    // run
    auto* run = app.add_subcommand("run", "single optimization run");
    SpecCli run_cli;
    std::uint64_t run_seed = 1;
    std::string run_out;
    run_cli.add_options(run, /*with_runs=*/false);
    run->add_option("--seed", run_seed, "run seed");
    run->add_option("--out", run_out, "result JSON path");

    // experiment
    auto* exp = app.add_subcommand("experiment",
                                   "seeded repetition batch with aggregation");
    SpecCli exp_cli;
    std::string exp_format = "json", exp_out;
    exp_cli.add_options(exp, /*with_runs=*/true);
    exp->add_option("--format", exp_format, "json | csv");
    exp->add_option("--out", exp_out, "report output path");

    // report
    auto* rep = app.add_subcommand("report", "convert a report file");
    std::string rep_in, rep_format = "csv", rep_out;
    rep->add_option("--in", rep_in, "report JSON path")->required();
    rep->add_option("--format", rep_format, "json | csv");
    rep->add_option("--out", rep_out, "output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen_data(gd_dataset, gd_n, gd_m, gd_seed, gd_rule, gd_out);
        if (run->parsed()) return cmd_run(run_cli, run_seed, run_out);
        if (exp->parsed()) return cmd_experiment(exp_cli, exp_format, exp_out);
        if (rep->parsed()) return cmd_report(rep_in, rep_format, rep_out);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
