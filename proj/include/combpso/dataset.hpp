#pragma once

#include <optional>
#include <string>
#include <vector>

#include "combpso/common.hpp"

namespace combpso {

/// Known relevance structure of a generated dataset. `strongly_relevant`
/// lists features contained in every optimal subset; `optimal_subsets` lists
/// the alternative minimal subsets that achieve Bayes-optimal accuracy.
struct GroundTruth {
    std::vector<std::size_t> strongly_relevant;           // sorted
    std::vector<std::vector<std::size_t>> optimal_subsets;  // each sorted
};

struct Dataset {
    Matrix features;                       // m x n
    std::vector<int> labels;               // 0-based class indices, length m
    std::vector<std::string> feature_names;
    std::optional<GroundTruth> ground_truth;

    std::size_t n_samples() const { return features.rows(); }
    std::size_t n_features() const { return features.cols(); }
    int n_classes() const;

    /// Throws ConfigError if the basic shape invariants do not hold.
    void validate() const;
};

/// Train/test partition plus a k-fold decomposition of the training part.
struct SplitPlan {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::vector<std::vector<std::size_t>> folds;  // partition of train_indices

    void validate(std::size_t n_samples) const;
};

enum class MonksRule {
    paper,  // label rule as printed in the source description
    uci     // canonical Monks-3 rule (coincides under 0-based indexing)
};

/// Full enumeration of the six Monks attribute domains (3*3*2*3*4*2 = 432
/// rows), labeled 1 iff (f3=1 and f4=3) or (f4!=4 and f1!=3), padded with
/// uniform [0,1) noise features up to n_total columns.
Dataset gen_monks3(std::size_t n_total, std::uint64_t seed,
                   MonksRule rule = MonksRule::paper);

/// f0,f1 ~ U[0,1); f2=f0; f3=f1; label 1 iff (f0+f1)/2 > 0.5; noise beyond.
Dataset gen_synthetic1(std::size_t m, std::size_t n_total, std::uint64_t seed);
Dataset gen_synthetic1(std::size_t n_total, std::uint64_t seed);  // m = 200

/// f0,f1 ~ U[0,1); f2=(f0+f1)/2; f3=f0; label 1 iff f2 > 0.5; noise beyond.
Dataset gen_synthetic2(std::size_t m, std::size_t n_total, std::uint64_t seed);
Dataset gen_synthetic2(std::size_t n_total, std::uint64_t seed);  // m = 200

/// Appends i.i.d. uniform [0,1) columns until the dataset has n_total
/// features. Original columns and ground-truth indices are untouched.
Dataset expand_with_noise(const Dataset& ds, std::size_t n_total,
                          std::uint64_t seed);

/// Loads a CSV with a header of feature names followed by a "class" column.
/// Class tokens are mapped to 0-based indices in first-appearance order.
Dataset load_csv(const std::string& path);

/// Writes a dataset in the load_csv format (class serialized as the label
/// index). Feature values round-trip exactly.
void save_csv(const Dataset& ds, const std::string& path);

/// Stratified 70/30-style split plus stratified k folds over the training
/// part. Deterministic in (ds, seed). Set stratified=false for plain random
/// sampling.
SplitPlan make_split(const Dataset& ds, double train_fraction, int k,
                     std::uint64_t seed, bool stratified = true);

}  // namespace combpso
