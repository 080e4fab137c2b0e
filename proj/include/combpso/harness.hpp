#pragma once

#include <optional>
#include <string>

#include "combpso/baselines.hpp"
#include "combpso/dataset.hpp"
#include "combpso/mo_engine.hpp"
#include "combpso/so_engine.hpp"

#include "json.hpp"

namespace combpso {

enum class AlgorithmId { so_combpso, mo_combpso, bpso, mopso };
enum class DatasetId { monks, syn1, syn2, csv };

std::string to_string(AlgorithmId a);
std::string to_string(DatasetId d);
AlgorithmId algorithm_from_string(const std::string& s);
DatasetId dataset_from_string(const std::string& s);

/// Default hyper-parameters by feature count (the 10 / 100 / >=10^4
/// regimes). All algorithms share the coefficient and symmetric-velocity
/// rows; lambda, position range, swarm size and iteration count come from
/// the proposed-method rows.
struct ParamProfile {
    double omega_min;
    double omega_max;
    double c_min;
    double c_max;
    double v_abs;    // symmetric velocity bound
    double lambda;   // asymmetry coefficient: v_max = -lambda * v_min
    double x_abs;    // position range
    int swarm_size;
    int iterations;
};

ParamProfile profile_for(std::size_t n_features);

/// Optional per-field overrides of the profile defaults.
struct EngineOverrides {
    std::optional<int> swarm_size;
    std::optional<int> iterations;
    std::optional<int> theta;
    std::optional<double> gamma;
    std::optional<double> alpha;
    std::optional<double> lambda;
    std::optional<double> schedule_a;
    std::optional<double> schedule_b;
    std::optional<std::size_t> archive_capacity;
    std::optional<bool> per_dimension_r;
    std::optional<bool> leader_hamming;
    std::optional<double> c1;  // baselines
    std::optional<double> c2;
};

struct OracleSpec {
    OracleKind kind = OracleKind::random_forest;
    int ntree = 100;
    int nodesize = 1;
    bool memoize = false;
};

struct ExperimentSpec {
    AlgorithmId algo = AlgorithmId::so_combpso;
    DatasetId dataset = DatasetId::syn2;
    std::string csv_path;       // when dataset == csv
    std::size_t n_total = 10;
    std::size_t m_samples = 200;  // synthetic 1/2 sample count
    MonksRule monks_rule = MonksRule::paper;
    int runs = 10;
    std::uint64_t base_seed = 1;  // run r uses seed base_seed + r
    double train_fraction = 0.7;
    int folds = 10;
    bool stratified = true;
    OracleSpec oracle;
    EngineOverrides overrides;
    int threads = 1;  // execution detail; not part of the report

    void validate() const;
};

struct RunMetrics {
    double fs_size;     // |S| (SO) or archive mean (MO)
    double error_cv;
    double error_test;
    std::optional<double> srf;  // absent without ground truth
    std::uint64_t fc;
    Mask best_mask;             // SO only
    std::size_t front_size = 0; // MO only
};

struct FrontEntry {
    Mask mask;
    double f1;
    double f2;
};

struct AggregateReport {
    ExperimentSpec spec;
    std::vector<RunMetrics> per_run;
    double mean_fs = 0.0;
    double mean_error_cv = 0.0;
    double mean_error_test = 0.0;
    std::optional<double> mean_srf;
    double mean_fc = 0.0;
    std::vector<FrontEntry> merged_front;  // MO cells only
    bool memoized = false;
};

/// Percentage of strongly relevant features covered by the mask. When the
/// strongly relevant set is empty (duplicated relevant features), reports
/// the best fractional cover over the optimal subsets instead, which is 100
/// exactly when the mask contains a complete optimal subset.
double srf_coverage(const Mask& mask, const GroundTruth& gt);

/// Builds the dataset a spec describes (deterministic in base_seed).
Dataset build_dataset(const ExperimentSpec& spec);

/// Runs `spec.runs` independent seeded repetitions and aggregates the
/// Table-style metrics; MO cells also merge the per-run archives into one
/// dominance-filtered front. Deterministic in the spec (thread count has no
/// effect on results).
AggregateReport run_experiment(const ExperimentSpec& spec);

enum class ReportFormat { json, csv };

nlohmann::ordered_json report_to_json(const AggregateReport& report);
std::string report_csv_from_json(const nlohmann::ordered_json& j);
void emit_report(const AggregateReport& report, ReportFormat format,
                 const std::string& path);

/// Engine-config builders shared with the CLI `run` subcommand.
SOConfig make_so_config(const ExperimentSpec& spec, std::size_t n_features,
                        std::uint64_t seed);
MOConfig make_mo_config(const ExperimentSpec& spec, std::size_t n_features,
                        std::uint64_t seed);
BaselineConfig make_baseline_config(const ExperimentSpec& spec,
                                    std::size_t n_features,
                                    std::uint64_t seed);
OracleConfig make_oracle_config(const ExperimentSpec& spec,
                                std::uint64_t seed);

}  // namespace combpso
