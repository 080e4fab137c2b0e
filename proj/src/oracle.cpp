#include "combpso/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace combpso {

Fitness so_fitness(double error, std::size_t subset_size,
                   std::size_t total_features, double alpha) {
    if (subset_size == 0)
        throw ContractError("so_fitness: empty subset");
    if (subset_size > total_features)
        throw ContractError("so_fitness: subset larger than feature count");
    if (error < 0.0 || error > 1.0)
        throw ContractError(strfmt("so_fitness: error %g outside [0,1]", error));
    const double size_fraction = static_cast<double>(subset_size) /
                                 static_cast<double>(total_features);
    return Fitness{alpha * error + (1.0 - alpha) * size_fraction, error,
                   size_fraction};
}

Oracle::Oracle(const Dataset& ds, const SplitPlan& split, OracleConfig cfg)
    : ds_(ds), split_(split), cfg_(cfg) {
    ds_.validate();
    split_.validate(ds_.n_samples());
    cfg_.forest.validate();

    auto narrow = [](const std::vector<std::size_t>& v) {
        std::vector<std::uint32_t> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            out[i] = static_cast<std::uint32_t>(v[i]);
        return out;
    };
    train_rows_ = narrow(split_.train_indices);
    test_rows_ = narrow(split_.test_indices);

    fold_eval_rows_.reserve(split_.folds.size());
    fold_train_rows_.reserve(split_.folds.size());
    for (std::size_t f = 0; f < split_.folds.size(); ++f) {
        fold_eval_rows_.push_back(narrow(split_.folds[f]));
        std::vector<char> held(ds_.n_samples(), 0);
        for (auto i : split_.folds[f]) held[i] = 1;
        std::vector<std::uint32_t> tr;
        tr.reserve(train_rows_.size() - split_.folds[f].size());
        for (auto i : train_rows_)
            if (!held[i]) tr.push_back(i);
        fold_train_rows_.push_back(std::move(tr));
    }
}

namespace {

// Best single-feature threshold classifier: value < threshold predicts
// left_class, otherwise right_class. Chosen to minimize training error;
// ties break toward the earlier feature, earlier cut and lower class.
struct Stump {
    std::size_t feature = 0;
    double threshold = -std::numeric_limits<double>::infinity();
    int left_class = 0;
    int right_class = 0;
};

Stump train_stump(const std::vector<double>& cols, std::size_t m,
                  std::size_t k, const std::vector<int>& y, int n_classes,
                  const std::vector<std::uint32_t>& rows) {
    std::vector<int> total(static_cast<std::size_t>(n_classes), 0);
    for (auto r : rows) ++total[static_cast<std::size_t>(y[r])];
    auto argmax = [&](const std::vector<int>& c) {
        int best = 0;
        for (int i = 1; i < n_classes; ++i)
            if (c[static_cast<std::size_t>(i)] > c[static_cast<std::size_t>(best)])
                best = i;
        return best;
    };

    Stump best;
    const int all_majority = argmax(total);
    best.left_class = all_majority;
    best.right_class = all_majority;
    std::size_t best_errors =
        rows.size() -
        static_cast<std::size_t>(total[static_cast<std::size_t>(all_majority)]);

    std::vector<std::pair<double, int>> items(rows.size());
    std::vector<int> left(static_cast<std::size_t>(n_classes));
    for (std::size_t f = 0; f < k; ++f) {
        const double* col = cols.data() + f * m;
        for (std::size_t i = 0; i < rows.size(); ++i)
            items[i] = {col[rows[i]], y[rows[i]]};
        std::sort(items.begin(), items.end());
        std::fill(left.begin(), left.end(), 0);
        for (std::size_t i = 0; i + 1 < items.size(); ++i) {
            ++left[static_cast<std::size_t>(items[i].second)];
            if (items[i].first == items[i + 1].first) continue;
            int best_l = 0, best_r = 0;
            for (int c = 0; c < n_classes; ++c) {
                best_l = std::max(best_l, left[static_cast<std::size_t>(c)]);
                best_r = std::max(best_r, total[static_cast<std::size_t>(c)] -
                                              left[static_cast<std::size_t>(c)]);
            }
            const std::size_t errors =
                rows.size() - static_cast<std::size_t>(best_l + best_r);
            if (errors < best_errors) {
                best_errors = errors;
                best.feature = f;
                double thr = items[i].first +
                             (items[i + 1].first - items[i].first) / 2.0;
                if (!(thr > items[i].first)) thr = items[i + 1].first;
                best.threshold = thr;
                // recover the class choices for this cut
                int lc = 0, rc = 0;
                for (int c = 1; c < n_classes; ++c) {
                    if (left[static_cast<std::size_t>(c)] >
                        left[static_cast<std::size_t>(lc)])
                        lc = c;
                    if (total[static_cast<std::size_t>(c)] -
                            left[static_cast<std::size_t>(c)] >
                        total[static_cast<std::size_t>(rc)] -
                            left[static_cast<std::size_t>(rc)])
                        rc = c;
                }
                best.left_class = lc;
                best.right_class = rc;
            }
        }
    }
    return best;
}

int predict_stump(const Stump& s, const std::vector<double>& cols,
                  std::size_t m, std::size_t row) {
    return cols[s.feature * m + row] < s.threshold ? s.left_class
                                                   : s.right_class;
}

int predict_1nn(const std::vector<double>& cols, std::size_t m, std::size_t k,
                const std::vector<int>& y,
                const std::vector<std::uint32_t>& train_rows,
                std::size_t row) {
    double best_d = std::numeric_limits<double>::infinity();
    std::uint32_t best_row = train_rows.front();
    for (auto tr : train_rows) {
        double d = 0.0;
        for (std::size_t f = 0; f < k; ++f) {
            const double diff = cols[f * m + row] - cols[f * m + tr];
            d += diff * diff;
            if (d >= best_d) break;
        }
        if (d < best_d) {
            best_d = d;
            best_row = tr;
        }
    }
    return y[best_row];
}

}  // namespace

double Oracle::classification_error(
    const std::vector<double>& cols, const std::vector<std::size_t>& sel,
    const std::vector<std::uint32_t>& train_rows,
    const std::vector<std::uint32_t>& eval_rows, std::uint64_t stream) const {
    const std::size_t m = ds_.n_samples();
    const std::size_t k = sel.size();
    const int n_classes = ds_.n_classes();
    std::size_t wrong = 0;

    switch (cfg_.kind) {
        case OracleKind::random_forest: {
            ForestParams p = cfg_.forest;
            p.seed = derive_seed(cfg_.forest.seed, stream);
            RandomForest rf(cols, m, k, ds_.labels, n_classes, p, &train_rows);
            for (auto r : eval_rows)
                if (rf.predict(cols, m, r) != ds_.labels[r]) ++wrong;
            break;
        }
        case OracleKind::stump: {
            const Stump s =
                train_stump(cols, m, k, ds_.labels, n_classes, train_rows);
            for (auto r : eval_rows)
                if (predict_stump(s, cols, m, r) != ds_.labels[r]) ++wrong;
            break;
        }
        case OracleKind::nearest_neighbor: {
            for (auto r : eval_rows)
                if (predict_1nn(cols, m, k, ds_.labels, train_rows, r) !=
                    ds_.labels[r])
                    ++wrong;
            break;
        }
    }
    return static_cast<double>(wrong) / static_cast<double>(eval_rows.size());
}

double Oracle::cv_error_raw(const Mask& mask) const {
    if (mask.size() != ds_.n_features())
        throw ContractError("evaluate_subset: mask length mismatch");
    const auto sel = mask_indices(mask);
    if (sel.empty()) throw ContractError("evaluate_subset: empty mask");

    // one shared column-major block of the selected features; folds train on
    // row subsets of it
    const std::size_t m = ds_.n_samples();
    std::vector<double> cols(sel.size() * m);
    for (std::size_t f = 0; f < sel.size(); ++f)
        for (std::size_t r = 0; r < m; ++r)
            cols[f * m + r] = ds_.features(r, sel[f]);

    double total = 0.0;
    for (std::size_t f = 0; f < fold_eval_rows_.size(); ++f)
        total += classification_error(cols, sel, fold_train_rows_[f],
                                      fold_eval_rows_[f], f + 1);
    return total / static_cast<double>(fold_eval_rows_.size());
}

double Oracle::evaluate_subset(const Mask& mask) {
    if (!cfg_.memoize) {
        ++calls_;
        return cv_error_raw(mask);
    }
    CacheCell* cell;
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto& slot = cache_[mask];
        if (!slot) slot = std::make_unique<CacheCell>();
        cell = slot.get();
    }
    std::call_once(cell->flag, [&] {
        cell->value = cv_error_raw(mask);
        ++calls_;
    });
    return cell->value;
}

double Oracle::test_error(const Mask& mask) const {
    if (mask.size() != ds_.n_features())
        throw ContractError("test_error: mask length mismatch");
    const auto sel = mask_indices(mask);
    if (sel.empty()) throw ContractError("test_error: empty mask");

    const std::size_t m = ds_.n_samples();
    std::vector<double> cols(sel.size() * m);
    for (std::size_t f = 0; f < sel.size(); ++f)
        for (std::size_t r = 0; r < m; ++r)
            cols[f * m + r] = ds_.features(r, sel[f]);
    return classification_error(cols, sel, train_rows_, test_rows_, 0);
}

}  // namespace combpso
