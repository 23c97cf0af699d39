#pragma once

#include <cstddef>
#include <vector>

#include "rnnp/uint128.hpp"

namespace rnnp {

/// p-bonacci values X_1..X_n and partial sums S_1..S_n (index k holds term k + 1).
///   X_1 = 1, X_n = sum_{k = max(1, n - p)}^{n - 1} X_k
struct PbonacciTable {
    unsigned p = 2;
    std::vector<uint128> values;
    std::vector<uint128> sums;

    std::size_t size() const noexcept { return values.size(); }
    uint128 x(std::size_t n) const { return values.at(n - 1); }  ///< 1-based
    uint128 s(std::size_t n) const { return sums.at(n - 1); }    ///< 1-based
};

/// Throws ConfigError for p < 2 or n < 1, NumericError on 128-bit overflow.
PbonacciTable build_table(unsigned p, std::size_t n);

struct BoundRow {
    std::size_t n = 0;
    bool lower_ok = false;  ///< S_n^2 >= 2^(n-1)
    bool upper_ok = false;  ///< S_n <= 2^(n-1)
    bool ok() const noexcept { return lower_ok && upper_ok; }
};

struct BoundReport {
    std::vector<BoundRow> rows;
    bool all_ok() const noexcept;
};

/// sqrt(2)^(n-1) <= S_n <= 2^(n-1), lower bound in squared integer form.
BoundReport check_bounds(const PbonacciTable& table);

struct DoublingRow {
    std::size_t n = 0;               ///< n >= 2
    bool within = false;             ///< S_n <= 2 S_{n-1}
    bool equality = false;           ///< S_n == 2 S_{n-1}
    bool equality_expected = false;  ///< n <= p + 1
    bool ok() const noexcept { return within && equality == equality_expected; }
};

struct DoublingReport {
    std::vector<DoublingRow> rows;
    bool all_ok() const noexcept;
};

/// Throws ConfigError when the table has fewer than 2 entries.
DoublingReport monotone_doubling_check(const PbonacciTable& table);

struct IdentityPair {
    uint128 lhs = 0;  ///< F_1 + ... + F_n
    uint128 rhs = 0;  ///< F_{n+2} - 1
};

IdentityPair fibonacci_sum_identity(std::size_t n);

}  // namespace rnnp
