#include "combpso/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace combpso {

int Dataset::n_classes() const {
    int maxl = -1;
    for (int l : labels) maxl = std::max(maxl, l);
    return maxl + 1;
}

void Dataset::validate() const {
    if (features.rows() != labels.size())
        throw ConfigError(strfmt("dataset: %zu rows but %zu labels",
                                 features.rows(), labels.size()));
    if (n_features() < 1) throw ConfigError("dataset: no features");
    if (n_samples() < 2) throw ConfigError("dataset: fewer than 2 samples");
    std::set<int> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2)
        throw ConfigError("dataset: fewer than 2 distinct classes");
    const int k = n_classes();
    for (int l : labels)
        if (l < 0 || l >= k)
            throw ConfigError(strfmt("dataset: label %d out of range", l));
    if (feature_names.size() != n_features())
        throw ConfigError("dataset: feature name count mismatch");
    if (ground_truth) {
        for (auto j : ground_truth->strongly_relevant)
            if (j >= n_features())
                throw ConfigError("ground truth: relevant index out of range");
        for (const auto& sub : ground_truth->optimal_subsets)
            for (auto j : sub)
                if (j >= n_features())
                    throw ConfigError("ground truth: subset index out of range");
    }
}

void SplitPlan::validate(std::size_t n_samples) const {
    std::vector<char> seen(n_samples, 0);
    auto mark = [&](const std::vector<std::size_t>& idx) {
        for (auto i : idx) {
            if (i >= n_samples) throw ConfigError("split: index out of range");
            if (seen[i]) throw ConfigError("split: sample assigned twice");
            seen[i] = 1;
        }
    };
    mark(train_indices);
    mark(test_indices);
    if (std::count(seen.begin(), seen.end(), 1) !=
        static_cast<std::ptrdiff_t>(n_samples))
        throw ConfigError("split: not all samples covered");

    std::vector<char> in_train(n_samples, 0);
    for (auto i : train_indices) in_train[i] = 1;
    std::vector<char> fold_seen(n_samples, 0);
    std::size_t fold_total = 0;
    for (const auto& fold : folds) {
        if (fold.empty()) throw ConfigError("split: empty fold");
        for (auto i : fold) {
            if (!in_train[i]) throw ConfigError("split: fold index not in train");
            if (fold_seen[i]) throw ConfigError("split: fold index repeated");
            fold_seen[i] = 1;
            ++fold_total;
        }
    }
    if (fold_total != train_indices.size())
        throw ConfigError("split: folds do not cover train set");
}

namespace {

std::vector<std::string> default_names(std::size_t n) {
    std::vector<std::string> names(n);
    for (std::size_t j = 0; j < n; ++j) names[j] = strfmt("f%zu", j);
    return names;
}

void append_noise_columns(Matrix& out, const Matrix& in, Rng& rng) {
    const std::size_t m = out.rows();
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < in.cols(); ++c) out(r, c) = in(r, c);
    // column-major draw order keeps each column a contiguous stream
    for (std::size_t c = in.cols(); c < out.cols(); ++c)
        for (std::size_t r = 0; r < m; ++r) out(r, c) = rng.uniform();
}

}  // namespace

Dataset gen_monks3(std::size_t n_total, std::uint64_t seed, MonksRule rule) {
    if (n_total < 6)
        throw ConfigError(strfmt("gen_monks3: n_total=%zu < 6", n_total));
    constexpr int domain[6] = {3, 3, 2, 3, 4, 2};

    Dataset ds;
    ds.features = Matrix(432, n_total);
    ds.labels.reserve(432);
    ds.feature_names = default_names(n_total);

    int f[6];
    std::size_t row = 0;
    for (f[0] = 1; f[0] <= domain[0]; ++f[0])
        for (f[1] = 1; f[1] <= domain[1]; ++f[1])
            for (f[2] = 1; f[2] <= domain[2]; ++f[2])
                for (f[3] = 1; f[3] <= domain[3]; ++f[3])
                    for (f[4] = 1; f[4] <= domain[4]; ++f[4])
                        for (f[5] = 1; f[5] <= domain[5]; ++f[5]) {
                            for (int j = 0; j < 6; ++j)
                                ds.features(row, static_cast<std::size_t>(j)) = f[j];
                            bool label;
                            if (rule == MonksRule::paper)
                                label = (f[3] == 1 && f[4] == 3) ||
                                        (f[4] != 4 && f[1] != 3);
                            else
                                label = (f[4] == 3 && f[3] == 1) ||
                                        (f[4] != 4 && f[1] != 3);
                            ds.labels.push_back(label ? 1 : 0);
                            ++row;
                        }

    Rng rng(derive_seed(seed, 0));
    for (std::size_t c = 6; c < n_total; ++c)
        for (std::size_t r = 0; r < 432; ++r) ds.features(r, c) = rng.uniform();

    ds.ground_truth = GroundTruth{{1, 3, 4}, {{1, 3, 4}}};
    ds.validate();
    return ds;
}

Dataset gen_synthetic1(std::size_t m, std::size_t n_total, std::uint64_t seed) {
    if (n_total < 4)
        throw ConfigError(strfmt("gen_synthetic1: n_total=%zu < 4", n_total));
    Dataset ds;
    ds.features = Matrix(m, n_total);
    ds.labels.resize(m);
    ds.feature_names = default_names(n_total);

    Rng rng(derive_seed(seed, 0));
    for (std::size_t r = 0; r < m; ++r) {
        const double f0 = rng.uniform();
        const double f1 = rng.uniform();
        ds.features(r, 0) = f0;
        ds.features(r, 1) = f1;
        ds.features(r, 2) = f0;
        ds.features(r, 3) = f1;
        ds.labels[r] = (f0 + f1) / 2.0 > 0.5 ? 1 : 0;
    }
    for (std::size_t c = 4; c < n_total; ++c)
        for (std::size_t r = 0; r < m; ++r) ds.features(r, c) = rng.uniform();

    // f0/f2 and f1/f3 are duplicates, so no single feature is in every
    // optimal subset: strongly_relevant is empty by the usual taxonomy.
    ds.ground_truth = GroundTruth{{}, {{0, 1}, {0, 3}, {1, 2}, {2, 3}}};
    ds.validate();
    return ds;
}

Dataset gen_synthetic1(std::size_t n_total, std::uint64_t seed) {
    return gen_synthetic1(200, n_total, seed);
}

Dataset gen_synthetic2(std::size_t m, std::size_t n_total, std::uint64_t seed) {
    if (n_total < 4)
        throw ConfigError(strfmt("gen_synthetic2: n_total=%zu < 4", n_total));
    Dataset ds;
    ds.features = Matrix(m, n_total);
    ds.labels.resize(m);
    ds.feature_names = default_names(n_total);

    Rng rng(derive_seed(seed, 0));
    for (std::size_t r = 0; r < m; ++r) {
        const double f0 = rng.uniform();
        const double f1 = rng.uniform();
        const double f2 = (f0 + f1) / 2.0;
        ds.features(r, 0) = f0;
        ds.features(r, 1) = f1;
        ds.features(r, 2) = f2;
        ds.features(r, 3) = f0;
        ds.labels[r] = f2 > 0.5 ? 1 : 0;
    }
    for (std::size_t c = 4; c < n_total; ++c)
        for (std::size_t r = 0; r < m; ++r) ds.features(r, c) = rng.uniform();

    ds.ground_truth = GroundTruth{{2}, {{2}}};
    ds.validate();
    return ds;
}

Dataset gen_synthetic2(std::size_t n_total, std::uint64_t seed) {
    return gen_synthetic2(200, n_total, seed);
}

Dataset expand_with_noise(const Dataset& ds, std::size_t n_total,
                          std::uint64_t seed) {
    if (n_total < ds.n_features())
        throw ConfigError(strfmt("expand_with_noise: n_total=%zu < %zu columns",
                                 n_total, ds.n_features()));
    if (n_total == ds.n_features()) return ds;

    Dataset out;
    out.features = Matrix(ds.n_samples(), n_total);
    Rng rng(derive_seed(seed, 0));
    append_noise_columns(out.features, ds.features, rng);
    out.labels = ds.labels;
    out.feature_names = ds.feature_names;
    for (std::size_t c = ds.n_features(); c < n_total; ++c)
        out.feature_names.push_back(strfmt("f%zu", c));
    out.ground_truth = ds.ground_truth;
    out.validate();
    return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

}  // namespace

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(strfmt("load_csv: cannot open '%s'", path.c_str()));

    std::string line;
    if (!std::getline(in, line))
        throw ParseError(strfmt("load_csv: '%s' is empty", path.c_str()));
    auto header = split_line(line);
    if (header.size() < 2 || header.back() != "class")
        throw ParseError(strfmt(
            "load_csv: '%s' header must end with a 'class' column", path.c_str()));
    const std::size_t n = header.size() - 1;

    Dataset ds;
    ds.feature_names.assign(header.begin(), header.end() - 1);

    std::vector<double> values;
    std::unordered_map<std::string, int> class_ids;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != n + 1)
            throw ParseError(strfmt(
                "load_csv: row %zu has %zu cells, expected %zu", row,
                cells.size(), n + 1));
        for (std::size_t c = 0; c < n; ++c) {
            const std::string& cell = cells[c];
            double v = 0.0;
            auto [ptr, ec] =
                std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size())
                throw ParseError(strfmt(
                    "load_csv: row %zu column %zu: '%s' is not numeric", row,
                    c + 1, cell.c_str()));
            values.push_back(v);
        }
        auto [it, fresh] = class_ids.try_emplace(
            cells[n], static_cast<int>(class_ids.size()));
        (void)fresh;
        ds.labels.push_back(it->second);
    }
    if (ds.labels.size() < 2)
        throw ParseError(strfmt("load_csv: '%s' has fewer than 2 data rows",
                                path.c_str()));
    if (class_ids.size() < 2)
        throw ParseError(strfmt(
            "load_csv: '%s' contains a single class only", path.c_str()));

    ds.features = Matrix(ds.labels.size(), n);
    for (std::size_t r = 0; r < ds.labels.size(); ++r)
        for (std::size_t c = 0; c < n; ++c)
            ds.features(r, c) = values[r * n + c];
    ds.validate();
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ParseError(strfmt("save_csv: cannot write '%s'", path.c_str()));
    for (std::size_t c = 0; c < ds.n_features(); ++c)
        out << ds.feature_names[c] << ',';
    out << "class\n";
    for (std::size_t r = 0; r < ds.n_samples(); ++r) {
        for (std::size_t c = 0; c < ds.n_features(); ++c)
            out << strfmt("%.17g", ds.features(r, c)) << ',';
        out << ds.labels[r] << '\n';
    }
    if (!out)
        throw ParseError(strfmt("save_csv: write to '%s' failed", path.c_str()));
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

SplitPlan make_split(const Dataset& ds, double train_fraction, int k,
                     std::uint64_t seed, bool stratified) {
    ds.validate();
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw ConfigError("make_split: train_fraction must be in (0,1)");
    if (k < 2) throw ConfigError("make_split: k must be >= 2");

    const std::size_t m = ds.n_samples();
    const std::size_t train_size =
        static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(m)));
    if (train_size < static_cast<std::size_t>(k) || train_size == 0 ||
        train_size >= m)
        throw ConfigError(strfmt(
            "make_split: train size %zu unusable for k=%d folds", train_size, k));

    Rng rng(derive_seed(seed, 0));
    SplitPlan plan;

    if (stratified) {
        const int n_classes = ds.n_classes();
        std::vector<std::vector<std::size_t>> per_class(
            static_cast<std::size_t>(n_classes));
        for (std::size_t i = 0; i < m; ++i)
            per_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
        for (auto& members : per_class)
            for (std::size_t i = members.size(); i > 1; --i)
                std::swap(members[i - 1], members[rng.index(i)]);

        // largest-remainder apportionment of the train quota across classes
        std::vector<std::size_t> quota(per_class.size());
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (std::size_t c = 0; c < per_class.size(); ++c) {
            const double target =
                train_fraction * static_cast<double>(per_class[c].size());
            quota[c] = static_cast<std::size_t>(target);
            assigned += quota[c];
            remainders.emplace_back(target - static_cast<double>(quota[c]), c);
        }
        std::sort(remainders.begin(), remainders.end(),
                  [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                  });
        for (std::size_t i = 0; assigned < train_size; ++i) {
            const std::size_t c = remainders[i % remainders.size()].second;
            if (quota[c] < per_class[c].size()) {
                ++quota[c];
                ++assigned;
            }
        }
        // over-assignment can only happen when every remainder was zero
        for (std::size_t i = 0; assigned > train_size; ++i) {
            const std::size_t c =
                remainders[remainders.size() - 1 - (i % remainders.size())].second;
            if (quota[c] > 0) {
                --quota[c];
                --assigned;
            }
        }

        for (std::size_t c = 0; c < per_class.size(); ++c) {
            if (per_class[c].size() < 2)
                throw ConfigError(strfmt(
                    "make_split: class %zu has %zu samples, too few for %d folds",
                    c, per_class[c].size(), k));
            for (std::size_t i = 0; i < per_class[c].size(); ++i)
                (i < quota[c] ? plan.train_indices : plan.test_indices)
                    .push_back(per_class[c][i]);
        }

        // stratified folds: deal each class round-robin with a shared cursor
        plan.folds.assign(static_cast<std::size_t>(k), {});
        std::size_t cursor = 0;
        std::size_t offset = 0;
        for (std::size_t c = 0; c < per_class.size(); ++c) {
            for (std::size_t i = 0; i < quota[c]; ++i) {
                plan.folds[cursor % static_cast<std::size_t>(k)].push_back(
                    per_class[c][i]);
                ++cursor;
            }
            offset += quota[c];
        }
        (void)offset;
        std::size_t min_class_train = m;
        for (std::size_t c = 0; c < per_class.size(); ++c)
            min_class_train = std::min(min_class_train, quota[c]);
        if (min_class_train < 2)
            throw ConfigError(
                "make_split: a class has fewer than 2 training samples; folds "
                "would be degenerate");
    } else {
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = m; i > 1; --i)
            std::swap(order[i - 1], order[rng.index(i)]);
        plan.train_indices.assign(order.begin(),
                                  order.begin() + static_cast<std::ptrdiff_t>(train_size));
        plan.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(train_size),
                                 order.end());
        plan.folds.assign(static_cast<std::size_t>(k), {});
        for (std::size_t i = 0; i < plan.train_indices.size(); ++i)
            plan.folds[i % static_cast<std::size_t>(k)].push_back(
                plan.train_indices[i]);
    }

    std::vector<char> train_label_seen(static_cast<std::size_t>(ds.n_classes()), 0);
    for (auto i : plan.train_indices)
        train_label_seen[static_cast<std::size_t>(ds.labels[i])] = 1;
    if (std::count(train_label_seen.begin(), train_label_seen.end(), 1) < 2)
        throw ConfigError("make_split: training set has fewer than 2 classes");
    for (const auto& fold : plan.folds)
        if (fold.empty())
            throw ConfigError("make_split: empty fold; too few training samples");

    plan.validate(m);
    return plan;
}

}  // namespace combpso
