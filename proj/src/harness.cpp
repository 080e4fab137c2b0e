#include "combpso/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>

namespace combpso {

std::string to_string(AlgorithmId a) {
    switch (a) {
        case AlgorithmId::so_combpso: return "so-combpso";
        case AlgorithmId::mo_combpso: return "mo-combpso";
        case AlgorithmId::bpso: return "bpso";
        case AlgorithmId::mopso: return "mopso";
    }
    return "?";
}

std::string to_string(DatasetId d) {
    switch (d) {
        case DatasetId::monks: return "monks";
        case DatasetId::syn1: return "syn1";
        case DatasetId::syn2: return "syn2";
        case DatasetId::csv: return "csv";
    }
    return "?";
}

AlgorithmId algorithm_from_string(const std::string& s) {
    if (s == "so-combpso") return AlgorithmId::so_combpso;
    if (s == "mo-combpso") return AlgorithmId::mo_combpso;
    if (s == "bpso") return AlgorithmId::bpso;
    if (s == "mopso") return AlgorithmId::mopso;
    throw ConfigError(strfmt("unknown algorithm '%s'", s.c_str()));
}

DatasetId dataset_from_string(const std::string& s) {
    if (s == "monks") return DatasetId::monks;
    if (s == "syn1") return DatasetId::syn1;
    if (s == "syn2") return DatasetId::syn2;
    if (s == "csv") return DatasetId::csv;
    throw ConfigError(strfmt("unknown dataset '%s'", s.c_str()));
}

ParamProfile profile_for(std::size_t n_features) {
    if (n_features <= 10)
        return ParamProfile{0.4, 0.6, 1.7, 2.1, 3.0, 1.0 / 3.0, 3.0, 30, 300};
    if (n_features <= 100)
        return ParamProfile{0.4, 0.8, 1.7, 2.1, 4.0, 1.0 / 8.0, 4.0, 100, 1000};
    return ParamProfile{0.4, 1.0, 1.7, 2.1, 6.0, 1.0 / 32.0, 6.0, 300, 3000};
}

void ExperimentSpec::validate() const {
    if (runs < 1) throw ConfigError("experiment: runs must be >= 1");
    if (n_total < 1) throw ConfigError("experiment: n_total must be >= 1");
    if (dataset == DatasetId::csv && csv_path.empty())
        throw ConfigError("experiment: csv dataset requires a path");
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw ConfigError("experiment: train_fraction must be in (0,1)");
    if (folds < 2) throw ConfigError("experiment: folds must be >= 2");
    if (oracle.ntree < 1) throw ConfigError("experiment: ntree must be >= 1");
    if (oracle.nodesize < 1)
        throw ConfigError("experiment: nodesize must be >= 1");
}

Dataset build_dataset(const ExperimentSpec& spec) {
    switch (spec.dataset) {
        case DatasetId::monks:
            return gen_monks3(spec.n_total, spec.base_seed, spec.monks_rule);
        case DatasetId::syn1:
            return gen_synthetic1(spec.m_samples, spec.n_total, spec.base_seed);
        case DatasetId::syn2:
            return gen_synthetic2(spec.m_samples, spec.n_total, spec.base_seed);
        case DatasetId::csv: {
            Dataset ds = load_csv(spec.csv_path);
            if (spec.n_total > ds.n_features())
                ds = expand_with_noise(ds, spec.n_total, spec.base_seed);
            return ds;
        }
    }
    throw ConfigError("experiment: bad dataset id");
}

OracleConfig make_oracle_config(const ExperimentSpec& spec,
                                std::uint64_t seed) {
    OracleConfig cfg;
    cfg.kind = spec.oracle.kind;
    cfg.forest.ntree = spec.oracle.ntree;
    cfg.forest.nodesize = spec.oracle.nodesize;
    cfg.forest.seed = seed;
    cfg.memoize = spec.oracle.memoize;
    return cfg;
}

SOConfig make_so_config(const ExperimentSpec& spec, std::size_t n_features,
                        std::uint64_t seed) {
    const ParamProfile prof = profile_for(n_features);
    const auto& ov = spec.overrides;
    SOConfig cfg;
    cfg.swarm_size = ov.swarm_size.value_or(prof.swarm_size);
    cfg.iterations = ov.iterations.value_or(prof.iterations);
    cfg.bounds = Bounds{-prof.x_abs, prof.x_abs, -prof.v_abs,
                        ov.lambda.value_or(prof.lambda)};
    cfg.schedule = ScheduleParams{prof.omega_min, prof.omega_max,
                                  prof.c_min,     prof.c_max,
                                  ov.schedule_a.value_or(0.5),
                                  ov.schedule_b.value_or(4.0),
                                  cfg.iterations};
    cfg.alpha = ov.alpha.value_or(0.8);
    cfg.theta = ov.theta.value_or(5);
    cfg.gamma = ov.gamma.value_or(0.2);
    cfg.seed = seed;
    cfg.per_dimension_r = ov.per_dimension_r.value_or(false);
    cfg.threads = 1;
    return cfg;
}

MOConfig make_mo_config(const ExperimentSpec& spec, std::size_t n_features,
                        std::uint64_t seed) {
    const ParamProfile prof = profile_for(n_features);
    const auto& ov = spec.overrides;
    MOConfig cfg;
    cfg.swarm_size = ov.swarm_size.value_or(prof.swarm_size);
    cfg.iterations = ov.iterations.value_or(prof.iterations);
    cfg.bounds = Bounds{-prof.x_abs, prof.x_abs, -prof.v_abs,
                        ov.lambda.value_or(prof.lambda)};
    cfg.schedule = ScheduleParams{prof.omega_min, prof.omega_max,
                                  prof.c_min,     prof.c_max,
                                  ov.schedule_a.value_or(0.5),
                                  ov.schedule_b.value_or(4.0),
                                  cfg.iterations};
    cfg.theta = ov.theta.value_or(5);
    cfg.gamma = ov.gamma.value_or(0.2);
    cfg.archive_capacity = ov.archive_capacity.value_or(100);
    cfg.leader_metric = ov.leader_hamming.value_or(false)
                            ? LeaderMetric::hamming
                            : LeaderMetric::euclidean;
    cfg.seed = seed;
    cfg.per_dimension_r = ov.per_dimension_r.value_or(false);
    cfg.threads = 1;
    return cfg;
}

BaselineConfig make_baseline_config(const ExperimentSpec& spec,
                                    std::size_t n_features,
                                    std::uint64_t seed) {
    const ParamProfile prof = profile_for(n_features);
    const auto& ov = spec.overrides;
    BaselineConfig cfg;
    cfg.swarm_size = ov.swarm_size.value_or(prof.swarm_size);
    cfg.iterations = ov.iterations.value_or(prof.iterations);
    cfg.v_abs = prof.v_abs;
    cfg.x_abs = prof.x_abs;
    cfg.omega_min = prof.omega_min;
    cfg.omega_max = prof.omega_max;
    // constant coefficients for the baselines: midpoint of the range shared
    // by all algorithms
    cfg.c1 = ov.c1.value_or((prof.c_min + prof.c_max) / 2.0);
    cfg.c2 = ov.c2.value_or((prof.c_min + prof.c_max) / 2.0);
    cfg.alpha = ov.alpha.value_or(0.8);
    cfg.archive_capacity = ov.archive_capacity.value_or(100);
    cfg.seed = seed;
    cfg.threads = 1;
    return cfg;
}

double srf_coverage(const Mask& mask, const GroundTruth& gt) {
    if (!gt.strongly_relevant.empty()) {
        std::size_t covered = 0;
        for (auto j : gt.strongly_relevant)
            if (j < mask.size() && mask[j]) ++covered;
        return 100.0 * static_cast<double>(covered) /
               static_cast<double>(gt.strongly_relevant.size());
    }
    if (gt.optimal_subsets.empty())
        throw ContractError("srf_coverage: ground truth has no relevance info");
    double best = 0.0;
    for (const auto& sub : gt.optimal_subsets) {
        std::size_t covered = 0;
        for (auto j : sub)
            if (j < mask.size() && mask[j]) ++covered;
        best = std::max(best, static_cast<double>(covered) /
                                  static_cast<double>(sub.size()));
    }
    return 100.0 * best;
}

namespace {

bool lex_less(const Mask& a, const Mask& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// union of per-run archives -> dedup -> dominance filter -> canonical order
std::vector<FrontEntry> merge_fronts(
    const std::vector<std::vector<FrontEntry>>& fronts) {
    std::vector<FrontEntry> all;
    for (const auto& f : fronts) all.insert(all.end(), f.begin(), f.end());

    std::sort(all.begin(), all.end(), [](const FrontEntry& a, const FrontEntry& b) {
        if (a.f1 != b.f1) return a.f1 < b.f1;
        if (a.f2 != b.f2) return a.f2 < b.f2;
        return lex_less(a.mask, b.mask);
    });
    all.erase(std::unique(all.begin(), all.end(),
                          [](const FrontEntry& a, const FrontEntry& b) {
                              return a.f1 == b.f1 && a.f2 == b.f2 &&
                                     a.mask == b.mask;
                          }),
              all.end());

    std::vector<FrontEntry> front;
    for (const auto& cand : all) {
        bool dominated = false;
        for (const auto& other : all) {
            if (dominates(Objectives{other.f1, other.f2},
                          Objectives{cand.f1, cand.f2})) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.push_back(cand);
    }
    return front;
}

double round6(double v) {
    const std::string s = strfmt("%.6g", v);
    return std::strtod(s.c_str(), nullptr);
}

nlohmann::ordered_json mask_to_json(const Mask& mask) {
    auto arr = nlohmann::ordered_json::array();
    for (auto j : mask_indices(mask)) arr.push_back(j);
    return arr;
}

}  // namespace

AggregateReport run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const Dataset ds = build_dataset(spec);
    const std::size_t n = ds.n_features();
    const bool is_mo = spec.algo == AlgorithmId::mo_combpso ||
                       spec.algo == AlgorithmId::mopso;

    AggregateReport report;
    report.spec = spec;
    report.memoized = spec.oracle.memoize;
    report.per_run.resize(static_cast<std::size_t>(spec.runs));
    std::vector<std::vector<FrontEntry>> fronts(
        static_cast<std::size_t>(spec.runs));

    std::string failure;
    std::mutex failure_mutex;

    parallel_for(static_cast<std::size_t>(spec.runs), spec.threads,
                 [&](std::size_t r) {
        try {
            const std::uint64_t seed = spec.base_seed + r;
            const SplitPlan split = make_split(ds, spec.train_fraction,
                                               spec.folds, seed,
                                               spec.stratified);
            Oracle oracle(ds, split, make_oracle_config(spec, seed));
            RunMetrics& m = report.per_run[r];

            if (!is_mo) {
                SORunResult res;
                if (spec.algo == AlgorithmId::so_combpso) {
                    res = run_so(make_so_config(spec, n, seed), ds, split,
                                 oracle);
                } else {
                    res = run_bpso(make_baseline_config(spec, n, seed), ds,
                                   split, oracle);
                }
                m.fs_size = static_cast<double>(mask_count(res.best_mask));
                m.error_cv = res.cv_error;
                m.error_test = res.test_error;
                m.fc = res.function_calls;
                m.best_mask = res.best_mask;
                if (ds.ground_truth)
                    m.srf = srf_coverage(res.best_mask, *ds.ground_truth);
            } else {
                MORunResult res;
                if (spec.algo == AlgorithmId::mo_combpso) {
                    res = run_mo(make_mo_config(spec, n, seed), ds, split,
                                 oracle);
                } else {
                    res = run_mopso(make_baseline_config(spec, n, seed), ds,
                                    split, oracle);
                }
                // per-run metrics are means over the final archive
                double fs = 0.0, ecv = 0.0, etest = 0.0, srf = 0.0;
                for (const auto& e : res.archive) {
                    fs += static_cast<double>(mask_count(e.mask));
                    ecv += e.objectives.f1;
                    etest += oracle.test_error(e.mask);
                    if (ds.ground_truth)
                        srf += srf_coverage(e.mask, *ds.ground_truth);
                    fronts[r].push_back(FrontEntry{e.mask, e.objectives.f1,
                                                   e.objectives.f2});
                }
                const double k = static_cast<double>(res.archive.size());
                m.fs_size = fs / k;
                m.error_cv = ecv / k;
                m.error_test = etest / k;
                if (ds.ground_truth) m.srf = srf / k;
                m.fc = res.function_calls;
                m.front_size = res.archive.size();
            }
        } catch (const std::exception& ex) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (failure.empty())
                failure = strfmt("run %zu failed: %s", r, ex.what());
        }
    });
    if (!failure.empty()) throw std::runtime_error(failure);

    const double R = static_cast<double>(spec.runs);
    double srf_sum = 0.0;
    bool srf_all = true;
    for (const auto& m : report.per_run) {
        report.mean_fs += m.fs_size / R;
        report.mean_error_cv += m.error_cv / R;
        report.mean_error_test += m.error_test / R;
        report.mean_fc += static_cast<double>(m.fc) / R;
        if (m.srf)
            srf_sum += *m.srf / R;
        else
            srf_all = false;
    }
    if (srf_all && !report.per_run.empty()) report.mean_srf = srf_sum;
    if (is_mo) report.merged_front = merge_fronts(fronts);
    return report;
}

nlohmann::ordered_json report_to_json(const AggregateReport& report) {
    using json = nlohmann::ordered_json;
    const auto& spec = report.spec;

    json jspec;
    jspec["algorithm"] = to_string(spec.algo);
    jspec["dataset"] = to_string(spec.dataset);
    if (spec.dataset == DatasetId::csv) jspec["csv_path"] = spec.csv_path;
    jspec["n_total"] = spec.n_total;
    if (spec.dataset == DatasetId::syn1 || spec.dataset == DatasetId::syn2)
        jspec["m_samples"] = spec.m_samples;
    if (spec.dataset == DatasetId::monks)
        jspec["monks_rule"] =
            spec.monks_rule == MonksRule::paper ? "paper" : "uci";
    jspec["runs"] = spec.runs;
    jspec["base_seed"] = spec.base_seed;
    jspec["train_fraction"] = round6(spec.train_fraction);
    jspec["folds"] = spec.folds;
    jspec["stratified"] = spec.stratified;
    json joracle;
    switch (spec.oracle.kind) {
        case OracleKind::random_forest: joracle["kind"] = "rf"; break;
        case OracleKind::stump: joracle["kind"] = "stump"; break;
        case OracleKind::nearest_neighbor: joracle["kind"] = "1nn"; break;
    }
    joracle["ntree"] = spec.oracle.ntree;
    joracle["nodesize"] = spec.oracle.nodesize;
    joracle["memoize"] = spec.oracle.memoize;
    jspec["oracle"] = joracle;

    json jov = json::object();
    const auto& ov = spec.overrides;
    if (ov.swarm_size) jov["swarm_size"] = *ov.swarm_size;
    if (ov.iterations) jov["iterations"] = *ov.iterations;
    if (ov.theta) jov["theta"] = *ov.theta;
    if (ov.gamma) jov["gamma"] = round6(*ov.gamma);
    if (ov.alpha) jov["alpha"] = round6(*ov.alpha);
    if (ov.lambda) jov["lambda"] = round6(*ov.lambda);
    if (ov.schedule_a) jov["schedule_a"] = round6(*ov.schedule_a);
    if (ov.schedule_b) jov["schedule_b"] = round6(*ov.schedule_b);
    if (ov.archive_capacity) jov["archive_capacity"] = *ov.archive_capacity;
    if (ov.per_dimension_r) jov["per_dimension_r"] = *ov.per_dimension_r;
    if (ov.leader_hamming) jov["leader_hamming"] = *ov.leader_hamming;
    if (ov.c1) jov["c1"] = round6(*ov.c1);
    if (ov.c2) jov["c2"] = round6(*ov.c2);
    jspec["overrides"] = jov;

    json j;
    j["schema"] = "combpso-report-v1";
    j["spec"] = jspec;

    json jagg;
    jagg["fs"] = round6(report.mean_fs);
    jagg["error_cv"] = round6(report.mean_error_cv);
    jagg["error_test"] = round6(report.mean_error_test);
    if (report.mean_srf)
        jagg["srf"] = round6(*report.mean_srf);
    else
        jagg["srf"] = nullptr;
    jagg["fc"] = round6(report.mean_fc);
    j["aggregate"] = jagg;

    auto jruns = json::array();
    for (std::size_t r = 0; r < report.per_run.size(); ++r) {
        const auto& m = report.per_run[r];
        json jm;
        jm["run"] = r;
        jm["seed"] = report.spec.base_seed + r;
        jm["fs"] = round6(m.fs_size);
        jm["error_cv"] = round6(m.error_cv);
        jm["error_test"] = round6(m.error_test);
        if (m.srf)
            jm["srf"] = round6(*m.srf);
        else
            jm["srf"] = nullptr;
        jm["fc"] = m.fc;
        if (!m.best_mask.empty()) jm["mask"] = mask_to_json(m.best_mask);
        if (m.front_size > 0) jm["front_size"] = m.front_size;
        jruns.push_back(jm);
    }
    j["runs"] = jruns;

    if (!report.merged_front.empty()) {
        auto jfront = json::array();
        for (const auto& e : report.merged_front) {
            json je;
            je["mask"] = mask_to_json(e.mask);
            je["f1"] = round6(e.f1);
            je["f2"] = round6(e.f2);
            jfront.push_back(je);
        }
        j["merged_front"] = jfront;
    }
    j["memoized"] = report.memoized;
    return j;
}

std::string report_csv_from_json(const nlohmann::ordered_json& j) {
    std::string out =
        "section,run,seed,fs,error_cv,error_test,srf,fc,front_size,mask,f1,f2\n";
    auto num = [](const nlohmann::ordered_json& v) -> std::string {
        if (v.is_null()) return "";
        return strfmt("%.6g", v.get<double>());
    };
    auto mask_cell = [](const nlohmann::ordered_json& v) -> std::string {
        std::string s;
        for (const auto& idx : v) {
            if (!s.empty()) s += ';';
            s += strfmt("%llu",
                        static_cast<unsigned long long>(idx.get<std::uint64_t>()));
        }
        return s;
    };
    for (const auto& run : j.at("runs")) {
        out += strfmt("run,%llu,%llu,",
                      static_cast<unsigned long long>(run.at("run").get<std::uint64_t>()),
                      static_cast<unsigned long long>(run.at("seed").get<std::uint64_t>()));
        out += num(run.at("fs")) + ',' + num(run.at("error_cv")) + ',' +
               num(run.at("error_test")) + ',' + num(run.at("srf")) + ',' +
               num(run.at("fc")) + ',';
        out += run.contains("front_size") ? num(run.at("front_size")) : "";
        out += ',';
        out += run.contains("mask") ? mask_cell(run.at("mask")) : "";
        out += ",,\n";
    }
    const auto& agg = j.at("aggregate");
    out += "aggregate,,," + num(agg.at("fs")) + ',' + num(agg.at("error_cv")) +
           ',' + num(agg.at("error_test")) + ',' + num(agg.at("srf")) + ',' +
           num(agg.at("fc")) + ",,,,\n";
    if (j.contains("merged_front")) {
        for (const auto& e : j.at("merged_front")) {
            out += "front,,,,,,,,," + mask_cell(e.at("mask")) + ',' +
                   num(e.at("f1")) + ',' + num(e.at("f2")) + '\n';
        }
    }
    return out;
}

void emit_report(const AggregateReport& report, ReportFormat format,
                 const std::string& path) {
    const auto j = report_to_json(report);
    std::ofstream out(path);
    if (!out)
        throw ParseError(strfmt("emit_report: cannot write '%s'", path.c_str()));
    if (format == ReportFormat::json)
        out << j.dump(2) << '\n';
    else
        out << report_csv_from_json(j);
    if (!out)
        throw ParseError(strfmt("emit_report: write to '%s' failed",
                                path.c_str()));
}

}  // namespace combpso
