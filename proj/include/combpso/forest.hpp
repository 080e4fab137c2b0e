#pragma once

#include <cstdint>
#include <vector>

#include "combpso/common.hpp"

namespace combpso {

/// Random-forest training knobs. mtry follows the sqrt rule on the number of
/// feature columns the forest actually sees (never below 1).
struct ForestParams {
    int ntree = 100;
    int nodesize = 1;  // minimum terminal node size
    std::uint64_t seed = 0;

    void validate() const {
        if (ntree < 1) throw ConfigError("forest: ntree must be >= 1");
        if (nodesize < 1) throw ConfigError("forest: nodesize must be >= 1");
    }
};

/// Bagged ensemble of Gini-split CART trees over a column-major sample
/// block. Each tree grows on a bootstrap resample until nodes are pure or
/// drop below nodesize, choosing the best threshold among mtry features
/// sampled without replacement per node. Prediction is a majority vote with
/// ties resolved toward the lowest class index. Fully deterministic in
/// (data, params, seed).
class RandomForest {
public:
    /// X is column-major: X[f * m + i] is feature f of sample i. When `rows`
    /// is non-null, training (and bootstrap resampling) is restricted to the
    /// listed row indices; the block itself is shared.
    RandomForest(const std::vector<double>& X, std::size_t m, std::size_t k,
                 const std::vector<int>& y, int n_classes,
                 const ForestParams& params,
                 const std::vector<std::uint32_t>* rows = nullptr);

    /// Predicts one sample given a column-major block and its row index.
    int predict(const std::vector<double>& X, std::size_t m,
                std::size_t row) const;

    std::size_t n_features() const { return k_; }

private:
    struct Node {
        std::int32_t feature;  // -1 for leaf
        std::int32_t left;     // leaf: predicted class
        std::int32_t right;
        double threshold;      // go left when value < threshold
    };
    struct Tree {
        std::vector<Node> nodes;
    };

    std::size_t k_ = 0;
    int n_classes_ = 0;
    std::vector<Tree> trees_;
};

}  // namespace combpso
