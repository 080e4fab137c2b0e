#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace combpso {

/// Invalid configuration or parameter values (bad CLI/config input included).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed external input (CSV parsing); messages carry row/column context.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller broke an API contract (e.g. evaluating an empty feature mask).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

// ---------------------------------------------------------------------------
// Deterministic random numbers.
//
// All stochastic components draw from explicitly seeded streams so that a
// fixed seed reproduces a run bit-for-bit. Doubles are produced from the raw
// 64-bit output directly (53 mantissa bits) rather than through
// std::uniform_real_distribution, whose output is implementation-defined.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and a stream id.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    splitmix64(s);
    return splitmix64(s);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t index(std::size_t n) {
        std::size_t i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    bool coin(double p = 0.5) { return uniform() < p; }

private:
    std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Feature masks.
// ---------------------------------------------------------------------------

using Mask = std::vector<std::uint8_t>;

inline std::size_t mask_count(const Mask& m) {
    std::size_t c = 0;
    for (auto b : m) c += b != 0;
    return c;
}

inline std::vector<std::size_t> mask_indices(const Mask& m) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < m.size(); ++j)
        if (m[j]) idx.push_back(j);
    return idx;
}

inline Mask indices_to_mask(const std::vector<std::size_t>& idx, std::size_t n) {
    Mask m(n, 0);
    for (auto j : idx) m.at(j) = 1;
    return m;
}

struct MaskHash {
    std::size_t operator()(const Mask& m) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (auto b : m) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

// ---------------------------------------------------------------------------
// Small row-major matrix of doubles. Enough linear algebra for this project:
// the optimizers only ever read columns and rows.
// ---------------------------------------------------------------------------

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// parallel_for: runs fn(i) for i in [0, count) on up to `threads` workers.
// Work items must be independent; outputs should go to per-index slots so the
// result does not depend on scheduling.
// ---------------------------------------------------------------------------

inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const std::size_t nthreads =
        std::min<std::size_t>(std::max(threads, 1), count);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

/// printf-style helper (gcc 11 lacks <format>).
template <typename... Args>
std::string strfmt(const char* fmt, Args... args) {
    const int n = std::snprintf(nullptr, 0, fmt, args...);
    std::string out(static_cast<std::size_t>(n), '\0');
    std::snprintf(out.data(), out.size() + 1, fmt, args...);
    return out;
}

}  // namespace combpso
