#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rnnp/error.hpp"
#include "rnnp/pbonacci.hpp"

using namespace rnnp;

namespace {

std::vector<std::string> terms(const PbonacciTable& t) {
    std::vector<std::string> out;
    for (auto v : t.values) out.push_back(to_string(v));
    return out;
}

}  // namespace

TEST(Pbonacci, FibonacciForPTwo) {
    EXPECT_EQ(terms(build_table(2, 7)), (std::vector<std::string>{"1", "1", "2", "3", "5", "8", "13"}));
}

TEST(Pbonacci, SumIdentityAtSix) {
    const auto t = build_table(2, 8);
    EXPECT_EQ(to_string(t.s(6)), "20");
    EXPECT_EQ(t.s(6), t.x(8) - 1);
}

TEST(Pbonacci, TribonacciLikeForPThree) {
    const auto t = build_table(3, 5);
    EXPECT_EQ(terms(t), (std::vector<std::string>{"1", "1", "2", "4", "7"}));
    EXPECT_EQ(to_string(t.s(5)), "15");
}

TEST(Pbonacci, MatchesDirectSummation) {
    for (unsigned p = 2; p <= 8; ++p) {
        const auto t = build_table(p, 90);
        const auto ref = oracle::pbonacci_terms(p, 90);
        unsigned __int128 s = 0;
        for (std::size_t n = 1; n <= 90; ++n) {
            s += ref[n];
            ASSERT_EQ(t.x(n), ref[n]) << "p " << p << " n " << n;
            ASSERT_EQ(t.s(n), s);
        }
    }
}

TEST(Pbonacci, BinetForPTwo) {
    const auto t = build_table(2, 70);
    for (unsigned n = 1; n <= 70; ++n) EXPECT_EQ(t.x(n), oracle::binet(n)) << n;
}

TEST(Pbonacci, StrictlyIncreasingFromTwo) {
    for (unsigned p = 2; p <= 6; ++p) {
        const auto t = build_table(p, 60);
        for (std::size_t n = 3; n <= 60; ++n) EXPECT_LT(t.x(n - 1), t.x(n));
    }
}

TEST(Pbonacci, SumsMonotoneInP) {
    for (unsigned p = 2; p < 8; ++p) {
        const auto lo = build_table(p, 60), hi = build_table(p + 1, 60);
        for (std::size_t n = 1; n <= 60; ++n) EXPECT_LE(lo.s(n), hi.s(n));
    }
}

TEST(Pbonacci, InvalidArguments) {
    EXPECT_THROW(build_table(1, 5), ConfigError);
    EXPECT_THROW(build_table(2, 0), ConfigError);
}

TEST(Pbonacci, OverflowIsAnError) {
    EXPECT_NO_THROW(build_table(2, 180));
    EXPECT_THROW(build_table(2, 200), NumericError);
    EXPECT_THROW(build_table(6, 140), NumericError);
}

TEST(Bounds, BoundaryAtOne) {
    const auto r = check_bounds(build_table(2, 1));
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_TRUE(r.rows[0].ok());
}

TEST(Bounds, PThreeAtFive) {
    // sqrt(2)^4 = 4 <= 15 <= 16
    const auto t = build_table(3, 5);
    const auto r = check_bounds(t);
    EXPECT_TRUE(r.rows[4].lower_ok);
    EXPECT_TRUE(r.rows[4].upper_ok);
}

TEST(Bounds, HoldForAllSmallOrders) {
    for (unsigned p = 2; p <= 6; ++p) {
        const auto t = build_table(p, 60);
        const auto r = check_bounds(t);
        EXPECT_TRUE(r.all_ok()) << p;
        // independent recomputation in exact integers
        for (std::size_t n = 1; n <= 60; ++n) {
            const unsigned __int128 pow2 = static_cast<unsigned __int128>(1) << (n - 1);
            EXPECT_LE(t.s(n), pow2);
            EXPECT_GE(t.s(n) * t.s(n), pow2);
        }
    }
}

TEST(Bounds, DetectsViolation) {
    PbonacciTable fake = build_table(2, 5);
    fake.sums[4] = 17;  // 2^4 = 16
    EXPECT_FALSE(check_bounds(fake).rows[4].upper_ok);
    fake.sums[4] = 3;  // 3^2 < 16
    EXPECT_FALSE(check_bounds(fake).rows[4].lower_ok);
}

TEST(Bounds, LargeIndicesDoNotOverflow) {
    const auto t = build_table(2, 180);
    EXPECT_TRUE(check_bounds(t).all_ok());
}

TEST(Doubling, EqualityStructure) {
    const auto two = monotone_doubling_check(build_table(2, 6));
    EXPECT_TRUE(two.rows[0].equality);   // n = 2
    EXPECT_FALSE(two.rows[2].equality);  // n = 4: 7 < 8
    EXPECT_TRUE(two.rows[2].within);
    const auto t3 = build_table(3, 4);
    EXPECT_EQ(to_string(t3.s(4)), "8");
    EXPECT_TRUE(monotone_doubling_check(t3).rows[2].equality);  // n = p + 1
    for (unsigned p = 2; p <= 6; ++p) {
        const auto r = monotone_doubling_check(build_table(p, 60));
        EXPECT_TRUE(r.all_ok());
        for (const auto& row : r.rows) EXPECT_EQ(row.equality, row.n <= p + 1) << "p " << p << " n " << row.n;
    }
}

TEST(Doubling, NeedsTwoEntries) { EXPECT_THROW(monotone_doubling_check(build_table(2, 1)), ConfigError); }

TEST(FibonacciIdentity, Cases) {
    const auto one = fibonacci_sum_identity(1);
    EXPECT_EQ(to_string(one.lhs), "1");
    EXPECT_EQ(to_string(one.rhs), "1");
    const auto five = fibonacci_sum_identity(5);
    EXPECT_EQ(to_string(five.lhs), "12");
    EXPECT_EQ(five.lhs, five.rhs);
    const auto big = fibonacci_sum_identity(80);
    EXPECT_EQ(big.lhs, big.rhs);
    // F_82 - 1, from the oracle recurrence
    const auto ref = oracle::pbonacci_terms(2, 82);
    EXPECT_EQ(big.rhs, ref[82] - 1);
}

TEST(Uint128, DecimalAndCheckedOps) {
    EXPECT_EQ(to_string(static_cast<uint128>(0)), "0");
    const uint128 max = ~static_cast<uint128>(0);
    EXPECT_EQ(to_string(max), "340282366920938463463374607431768211455");
    EXPECT_THROW(checked_add(max, 1, "t"), NumericError);
    EXPECT_THROW(checked_mul(max, 2, "t"), NumericError);
    EXPECT_EQ(checked_mul(3, 5, "t"), 15u);
}
