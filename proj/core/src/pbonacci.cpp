#include "rnnp/pbonacci.hpp"

#include <algorithm>

#include "rnnp/error.hpp"

namespace rnnp {

PbonacciTable build_table(unsigned p, std::size_t n) {
    if (p < 2) throw ConfigError("build_table: p must be >= 2");
    if (n < 1) throw ConfigError("build_table: n must be >= 1");
    PbonacciTable t;
    t.p = p;
    t.values.reserve(n);
    t.sums.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) {
        uint128 x = 0;
        if (k == 1) {
            x = 1;
        } else {
            // X_k = S_{k-1} - S_{k-1-p} (the window of at most p preceding terms)
            const std::size_t lo = k > p ? k - p : 1;
            for (std::size_t j = lo; j < k; ++j) x = checked_add(x, t.values[j - 1], "p-bonacci term");
        }
        t.values.push_back(x);
        t.sums.push_back(k == 1 ? x : checked_add(t.sums.back(), x, "p-bonacci sum"));
    }
    return t;
}

bool BoundReport::all_ok() const noexcept {
    return std::all_of(rows.begin(), rows.end(), [](const BoundRow& r) { return r.ok(); });
}

bool DoublingReport::all_ok() const noexcept {
    return std::all_of(rows.begin(), rows.end(), [](const DoublingRow& r) { return r.ok(); });
}

BoundReport check_bounds(const PbonacciTable& table) {
    BoundReport report;
    for (std::size_t n = 1; n <= table.size(); ++n) {
        BoundRow row;
        row.n = n;
        const uint128 s = table.s(n);
        if (n - 1 >= 127) {
            // 2^(n-1) is beyond every representable S_n; compare S_n^2 through bit lengths.
            row.upper_ok = true;
            std::size_t bits = 0;
            for (uint128 v = s; v > 0; v >>= 1) ++bits;
            row.lower_ok = 2 * (bits - 1) >= n - 1;
        } else {
            const uint128 pow2 = static_cast<uint128>(1) << (n - 1);
            row.upper_ok = s <= pow2;
            uint128 sq = 0;
            // An overflowing square is far above 2^(n-1) < 2^127.
            row.lower_ok = __builtin_mul_overflow(s, s, &sq) || sq >= pow2;
        }
        report.rows.push_back(row);
    }
    return report;
}

DoublingReport monotone_doubling_check(const PbonacciTable& table) {
    if (table.size() < 2) throw ConfigError("monotone_doubling_check: need at least 2 entries");
    DoublingReport report;
    for (std::size_t n = 2; n <= table.size(); ++n) {
        DoublingRow row;
        row.n = n;
        const uint128 prev = table.s(n - 1);
        const uint128 cur = table.s(n);
        uint128 twice = 0;
        if (__builtin_mul_overflow(prev, static_cast<uint128>(2), &twice)) {
            row.within = true;
            row.equality = false;
        } else {
            row.within = cur <= twice;
            row.equality = cur == twice;
        }
        row.equality_expected = n <= static_cast<std::size_t>(table.p) + 1;
        report.rows.push_back(row);
    }
    return report;
}

IdentityPair fibonacci_sum_identity(std::size_t n) {
    if (n < 1) throw ConfigError("fibonacci_sum_identity: n must be >= 1");
    const PbonacciTable fib = build_table(2, n + 2);
    return {fib.s(n), fib.x(n + 2) - 1};
}

}  // namespace rnnp
