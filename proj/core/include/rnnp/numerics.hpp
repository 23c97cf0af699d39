#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace rnnp {

/// Dense vector of doubles.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t n, double value = 0.0) : data_(n, value) {}
    Vector(std::initializer_list<double> values) : data_(values) {}
    explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    std::span<double> span() noexcept { return data_; }
    std::span<const double> span() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    void fill(double value);
    bool all_finite() const noexcept;

    const std::vector<double>& values() const noexcept { return data_; }

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> data_;
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::span<double> span() noexcept { return data_; }
    std::span<const double> span() const noexcept { return data_; }

    void fill(double value);
    bool all_finite() const noexcept;

    static Matrix identity(std::size_t n);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Deterministic tally of the work done by one gradient call.
///
/// `mac_count` counts scalar multiply-accumulates; `peak_floats` is the high-water
/// mark of doubles simultaneously held as gradient state (see each engine for what
/// it charges). Both are monotone within a call and reset only at its start.
struct OpCounter {
    std::uint64_t mac_count = 0;
    std::uint64_t peak_floats = 0;
    std::uint64_t live_floats = 0;

    void add_macs(std::uint64_t n) noexcept { mac_count += n; }
    void acquire(std::uint64_t n) noexcept {
        live_floats += n;
        if (live_floats > peak_floats) peak_floats = live_floats;
    }
    void release(std::uint64_t n) noexcept { live_floats = n > live_floats ? 0 : live_floats - n; }
    void reset() noexcept { *this = OpCounter{}; }
};

/// xoshiro256** seeded through splitmix64. Identical seeds give identical streams.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0x9E3779B97F4A7C15ULL);

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next() noexcept;
    std::uint64_t operator()() noexcept { return next(); }
    static constexpr std::uint64_t min() noexcept { return 0; }
    static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Standard normal draw (Box-Muller, one cached spare).
    double normal() noexcept;
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept;

    /// Independent child stream, derived deterministically from this one.
    Rng split() noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// m * v, accumulating over columns in increasing index. Adds rows*cols to the counter.
Vector matvec(const Matrix& m, const Vector& v, OpCounter* counter = nullptr);
/// m^T * v, accumulating over rows in increasing index. Adds rows*cols to the counter.
Vector matvec_transposed(const Matrix& m, const Vector& v, OpCounter* counter = nullptr);
/// Elementwise product d ⊙ v. Adds len to the counter.
Vector diag_scale(const Vector& d, const Vector& v, OpCounter* counter = nullptr);

/// n i.i.d. samples of U[lo, hi).
Vector rand_uniform(Rng& rng, double lo, double hi, std::size_t n);

/// In-place Fisher-Yates shuffle driven by `rng` (portable, unlike std::shuffle).
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

double sigmoid(double x) noexcept;
double softplus(double x) noexcept;

}  // namespace rnnp
