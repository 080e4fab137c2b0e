#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "combpso/dataset.hpp"
#include "combpso/forest.hpp"

namespace combpso {

/// Weighted-sum fitness of a feature subset: alpha * error + (1-alpha) *
/// |S|/|F|. Lower is better.
struct Fitness {
    double scalar;
    double error;
    double size_fraction;
};

Fitness so_fitness(double error, std::size_t subset_size,
                   std::size_t total_features, double alpha = 0.8);

/// The two objectives of the Pareto formulation: classification error rate
/// and selected-size fraction (both minimized, f2 always > 0).
struct Objectives {
    double f1;
    double f2;

    bool operator==(const Objectives&) const = default;
};

enum class OracleKind {
    random_forest,
    stump,            // best single-feature threshold; fast surrogate
    nearest_neighbor  // 1-NN on the selected columns; fast surrogate
};

struct OracleConfig {
    OracleKind kind = OracleKind::random_forest;
    ForestParams forest;
    bool memoize = false;  // when on, function calls count cache misses

    static OracleConfig surrogate_stump() {
        OracleConfig c;
        c.kind = OracleKind::stump;
        return c;
    }
};

/// Wrapper-evaluation oracle bound to one dataset and one split plan. CV
/// error trains on k-1 folds and scores the held-out fold, restricted to the
/// masked columns; the invocation counter increments once per evaluation
/// (once per distinct mask when memoization is enabled). Evaluations are
/// pure functions of (mask, split, seed) and safe to call concurrently.
class Oracle {
public:
    Oracle(const Dataset& ds, const SplitPlan& split, OracleConfig cfg);

    /// Mean misclassification rate over the k folds. Counts one call.
    double evaluate_subset(const Mask& mask);

    Objectives evaluate_objectives(const Mask& mask) {
        const double err = evaluate_subset(mask);
        return Objectives{err, static_cast<double>(mask_count(mask)) /
                                   static_cast<double>(ds_.n_features())};
    }

    /// Trains on the full training partition, reports held-out test error.
    /// Reporting only: does not touch the counter.
    double test_error(const Mask& mask) const;

    std::uint64_t function_calls() const { return calls_.load(); }
    bool memoized() const { return cfg_.memoize; }
    const OracleConfig& config() const { return cfg_; }
    const Dataset& dataset() const { return ds_; }
    const SplitPlan& split() const { return split_; }

private:
    double cv_error_raw(const Mask& mask) const;
    double classification_error(const std::vector<double>& cols,
                                const std::vector<std::size_t>& sel,
                                const std::vector<std::uint32_t>& train_rows,
                                const std::vector<std::uint32_t>& eval_rows,
                                std::uint64_t stream) const;

    const Dataset& ds_;
    const SplitPlan& split_;
    OracleConfig cfg_;

    std::vector<std::vector<std::uint32_t>> fold_train_rows_;
    std::vector<std::vector<std::uint32_t>> fold_eval_rows_;
    std::vector<std::uint32_t> train_rows_;
    std::vector<std::uint32_t> test_rows_;

    std::atomic<std::uint64_t> calls_{0};

    struct CacheCell {
        std::once_flag flag;
        double value = 0.0;
    };
    mutable std::mutex cache_mutex_;
    std::unordered_map<Mask, std::unique_ptr<CacheCell>, MaskHash> cache_;
};

}  // namespace combpso
