#include "rnnp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rnnp/error.hpp"

namespace rnnp {

void Vector::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Vector::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer list");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& s : s_) s = splitmix64(sm);
}

std::uint64_t Rng::next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
    // Lemire's nearly-divisionless rejection.
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(next()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

Rng Rng::split() noexcept { return Rng(next()); }

Vector matvec(const Matrix& m, const Vector& v, OpCounter* counter) {
    if (m.cols() != v.size()) {
        throw DimensionError("matvec: matrix has " + std::to_string(m.cols()) + " columns, vector has " +
                             std::to_string(v.size()) + " entries");
    }
    Vector out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * v[c];
        out[r] = acc;
    }
    if (counter) counter->add_macs(m.rows() * m.cols());
    return out;
}

Vector matvec_transposed(const Matrix& m, const Vector& v, OpCounter* counter) {
    if (m.rows() != v.size()) {
        throw DimensionError("matvec_transposed: matrix has " + std::to_string(m.rows()) + " rows, vector has " +
                             std::to_string(v.size()) + " entries");
    }
    Vector out(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) out[c] += row[c] * v[r];
    }
    if (counter) counter->add_macs(m.rows() * m.cols());
    return out;
}

Vector diag_scale(const Vector& d, const Vector& v, OpCounter* counter) {
    if (d.size() != v.size()) {
        throw DimensionError("diag_scale: lengths " + std::to_string(d.size()) + " and " +
                             std::to_string(v.size()) + " differ");
    }
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = d[i] * v[i];
    if (counter) counter->add_macs(v.size());
    return out;
}

Vector rand_uniform(Rng& rng, double lo, double hi, std::size_t n) {
    if (!(lo < hi)) throw ConfigError("rand_uniform: requires lo < hi");
    Vector out(n);
    for (auto& x : out) x = rng.uniform(lo, hi);
    return out;
}

double sigmoid(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) noexcept { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace rnnp
