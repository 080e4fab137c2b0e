#include "combpso/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace combpso {

namespace {

struct SortItem {
    double value;
    std::int32_t label;
};

struct FlatNode {
    std::int32_t feature;  // -1 for leaf
    std::int32_t left;     // leaf: predicted class
    std::int32_t right;
    double threshold;
};

// Per-tree scratch; reused across nodes so the hot path never allocates.
struct TreeBuilder {
    const std::vector<double>& X;  // column-major, stride m
    std::size_t m;
    std::size_t k;
    const std::vector<int>& y;
    int n_classes;
    int nodesize;
    std::size_t mtry;
    Rng rng;

    std::vector<std::uint32_t> idx;   // bootstrap sample, partitioned in place
    std::vector<std::uint32_t> feats;
    std::vector<SortItem> items;
    std::vector<int> counts;
    std::vector<int> left_counts;
    std::vector<FlatNode> nodes;

    TreeBuilder(const std::vector<double>& X_, std::size_t m_, std::size_t k_,
                const std::vector<int>& y_, int n_classes_, int nodesize_,
                std::uint64_t seed)
        : X(X_), m(m_), k(k_), y(y_), n_classes(n_classes_),
          nodesize(nodesize_),
          mtry(std::max<std::size_t>(
              1, static_cast<std::size_t>(std::sqrt(static_cast<double>(k_))))),
          rng(seed) {
        idx.resize(m);
        feats.resize(k);
        std::iota(feats.begin(), feats.end(), 0u);
        items.reserve(m);
        counts.resize(static_cast<std::size_t>(n_classes));
        left_counts.resize(static_cast<std::size_t>(n_classes));
    }

    void bootstrap(const std::vector<std::uint32_t>* rows) {
        if (rows) {
            idx.resize(rows->size());
            for (std::size_t i = 0; i < rows->size(); ++i)
                idx[i] = (*rows)[rng.index(rows->size())];
        } else {
            idx.resize(m);
            for (std::size_t i = 0; i < m; ++i)
                idx[i] = static_cast<std::uint32_t>(rng.index(m));
        }
    }

    int majority() const {
        int best = 0;
        for (int cl = 1; cl < n_classes; ++cl)
            if (counts[static_cast<std::size_t>(cl)] >
                counts[static_cast<std::size_t>(best)])
                best = cl;  // ties keep the lowest class index
        return best;
    }

    std::int32_t build(std::size_t lo, std::size_t hi) {
        const std::size_t s = hi - lo;
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = lo; i < hi; ++i)
            ++counts[static_cast<std::size_t>(y[idx[i]])];

        int present = 0;
        for (int c : counts) present += c > 0;

        if (present > 1 && s > static_cast<std::size_t>(nodesize)) {
            // maximize sum of squared class counts over size in each child;
            // equivalent to the largest Gini impurity reduction
            double counts_sq = 0.0;
            for (int c : counts)
                counts_sq += static_cast<double>(c) * static_cast<double>(c);
            const double parent_score = counts_sq / static_cast<double>(s);

            double best_score = parent_score;
            std::int32_t best_feature = -1;
            double best_threshold = 0.0;

            // mtry features without replacement; partial Fisher-Yates over an
            // array that stays permuted between nodes (still uniform)
            for (std::size_t i = 0; i < mtry; ++i) {
                const std::size_t j = i + rng.index(k - i);
                std::swap(feats[i], feats[j]);
            }

            for (std::size_t fi = 0; fi < mtry; ++fi) {
                const std::size_t f = feats[fi];
                const double* col = X.data() + f * m;
                items.clear();
                for (std::size_t i = lo; i < hi; ++i)
                    items.push_back(
                        {col[idx[i]], static_cast<std::int32_t>(y[idx[i]])});
                std::sort(items.begin(), items.end(),
                          [](const SortItem& a, const SortItem& b) {
                              return a.value < b.value;
                          });
                if (items.front().value == items.back().value) continue;

                std::fill(left_counts.begin(), left_counts.end(), 0);
                double left_sq = 0.0;
                double right_sq = counts_sq;
                double nl = 0.0;
                for (std::size_t i = 0; i + 1 < items.size(); ++i) {
                    const auto cl = static_cast<std::size_t>(items[i].label);
                    const double lbefore = static_cast<double>(left_counts[cl]);
                    const double rbefore =
                        static_cast<double>(counts[cl] - left_counts[cl]);
                    left_sq += 2.0 * lbefore + 1.0;
                    right_sq -= 2.0 * rbefore - 1.0;
                    ++left_counts[cl];
                    nl += 1.0;
                    if (items[i].value == items[i + 1].value) continue;
                    const double nr = static_cast<double>(s) - nl;
                    const double score = left_sq / nl + right_sq / nr;
                    if (score > best_score) {
                        best_score = score;
                        double thr = items[i].value +
                                     (items[i + 1].value - items[i].value) / 2.0;
                        // guard midpoint rounding: both children must be
                        // non-empty under the (value < thr) rule
                        if (!(thr > items[i].value)) thr = items[i + 1].value;
                        best_feature = static_cast<std::int32_t>(f);
                        best_threshold = thr;
                    }
                }
            }

            if (best_feature >= 0) {
                const double* col =
                    X.data() + static_cast<std::size_t>(best_feature) * m;
                const auto mid_it = std::partition(
                    idx.begin() + static_cast<std::ptrdiff_t>(lo),
                    idx.begin() + static_cast<std::ptrdiff_t>(hi),
                    [&](std::uint32_t i) { return col[i] < best_threshold; });
                const std::size_t mid =
                    static_cast<std::size_t>(mid_it - idx.begin());
                const std::int32_t node_id =
                    static_cast<std::int32_t>(nodes.size());
                nodes.push_back({best_feature, -1, -1, best_threshold});
                const std::int32_t left_id = build(lo, mid);
                const std::int32_t right_id = build(mid, hi);
                nodes[static_cast<std::size_t>(node_id)].left = left_id;
                nodes[static_cast<std::size_t>(node_id)].right = right_id;
                return node_id;
            }
            // every candidate feature constant in this node: emit a leaf
        }

        const std::int32_t node_id = static_cast<std::int32_t>(nodes.size());
        nodes.push_back({-1, majority(), -1, 0.0});
        return node_id;
    }
};

}  // namespace

RandomForest::RandomForest(const std::vector<double>& X, std::size_t m,
                           std::size_t k, const std::vector<int>& y,
                           int n_classes, const ForestParams& params,
                           const std::vector<std::uint32_t>* rows) {
    params.validate();
    if (m < 1 || k < 1) throw ConfigError("forest: empty training data");
    if (X.size() != m * k) throw ConfigError("forest: data size mismatch");
    if (y.size() != m) throw ConfigError("forest: label count mismatch");
    if (rows && rows->empty()) throw ConfigError("forest: empty row subset");
    {
        std::set<int> distinct;
        if (rows)
            for (auto r : *rows) distinct.insert(y[r]);
        else
            distinct.insert(y.begin(), y.end());
        if (distinct.size() < 2)
            throw ConfigError("forest: training labels contain a single class");
    }
    k_ = k;
    n_classes_ = n_classes;
    trees_.resize(static_cast<std::size_t>(params.ntree));

    const std::size_t train_count = rows ? rows->size() : m;
    for (int t = 0; t < params.ntree; ++t) {
        TreeBuilder b(X, m, k, y, n_classes, params.nodesize,
                      derive_seed(params.seed, static_cast<std::uint64_t>(t)));
        b.bootstrap(rows);
        b.build(0, train_count);
        auto& tree = trees_[static_cast<std::size_t>(t)].nodes;
        tree.reserve(b.nodes.size());
        for (const auto& n : b.nodes)
            tree.push_back(Node{n.feature, n.left, n.right, n.threshold});
    }
}

int RandomForest::predict(const std::vector<double>& X, std::size_t m,
                          std::size_t row) const {
    std::vector<int> votes(static_cast<std::size_t>(n_classes_), 0);
    for (const auto& tree : trees_) {
        std::int32_t node = 0;
        for (;;) {
            const Node& nd = tree.nodes[static_cast<std::size_t>(node)];
            if (nd.feature < 0) {
                ++votes[static_cast<std::size_t>(nd.left)];
                break;
            }
            const double v = X[static_cast<std::size_t>(nd.feature) * m + row];
            node = v < nd.threshold ? nd.left : nd.right;
        }
    }
    int best = 0;
    for (int c = 1; c < n_classes_; ++c)
        if (votes[static_cast<std::size_t>(c)] >
            votes[static_cast<std::size_t>(best)])
            best = c;
    return best;
}

}  // namespace combpso
