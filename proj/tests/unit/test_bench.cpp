#include <gtest/gtest.h>

#include <filesystem>

#include "rnnp/bench.hpp"
#include "rnnp/error.hpp"
#include "rnnp/series.hpp"

using namespace rnnp;
namespace fs = std::filesystem;

namespace {

std::vector<std::size_t> range(std::size_t a, std::size_t b) {
    std::vector<std::size_t> v;
    for (std::size_t t = a; t <= b; ++t) v.push_back(t);
    return v;
}

std::vector<double> macs(const std::vector<BenchRecord>& r) {
    std::vector<double> v;
    for (const auto& x : r) v.push_back(static_cast<double>(x.mac_count));
    return v;
}

std::vector<double> taus(const std::vector<BenchRecord>& r) {
    std::vector<double> v;
    for (const auto& x : r) v.push_back(static_cast<double>(x.tau));
    return v;
}

}  // namespace

TEST(Bench, RecordsAreDeterministic) {
    const RnnSpec s{{1, 2}, 13, 15, 2};
    for (Engine e : {Engine::Trrl, Engine::Rtrl, Engine::Bptt}) {
        const auto a = run_gradient_bench(e, s, 10, 3), b = run_gradient_bench(e, s, 10, 3);
        EXPECT_EQ(a.mac_count, b.mac_count);
        EXPECT_EQ(a.peak_floats, b.peak_floats);
        EXPECT_GT(a.wall_seconds, 0.0);
        EXPECT_EQ(a.macronodes.has_value(), e == Engine::Bptt);
    }
}

TEST(Bench, TrrlLinearInTau) {
    const auto r = sweep_tau(Engine::Trrl, RnnSpec{{1, 2}, 13, 15, 2}, range(3, 48), 1);
    EXPECT_GE(linear_fit(taus(r), macs(r)).r2, 0.999);
}

TEST(Bench, RtrlDoublesWithTau) {
    const RnnSpec s{{1, 2}, 13, 15, 2};
    for (std::size_t t = 8; t <= 24; t += 4) {
        const auto r = sweep_tau(Engine::Rtrl, s, {t, 2 * t}, 1);
        EXPECT_NEAR(static_cast<double>(r[1].mac_count) / r[0].mac_count, 2.0, 0.1);
    }
}

TEST(Bench, BpttFibonacciGrowth) {
    const auto r = sweep_tau(Engine::Bptt, RnnSpec{{1, 2}, 13, 15, 2}, {12, 13}, 1);
    const double ratio = static_cast<double>(r[1].mac_count) / r[0].mac_count;
    EXPECT_GE(ratio, 1.4);
    EXPECT_LE(ratio, 1.9);
    EXPECT_THROW(sweep_tau(Engine::Bptt, RnnSpec{{1, 2}, 2, 2, 1}, {26}, 1), NumericError);
}

TEST(Bench, NeuronTableGainAndTrrlSpread) {
    const auto rows = sweep_neurons({{1}, {1, 2}, {1, 2, 24}}, {5, 10, 15}, 49, 2, 13, 1);
    ASSERT_EQ(rows.size(), 9u);
    for (const auto& row : rows) {
        const double target = 4.0 * row.lags.size();
        EXPECT_NEAR(row.gain(), target, 0.3 * target) << "h " << row.hidden_dim;
        const RnnSpec spec{row.lags, 13, row.hidden_dim, 2};
        EXPECT_EQ(row.rtrl.peak_floats, row.lags.back() * 2 * spec.weight_count());
    }
    for (std::size_t h : {5u, 10u, 15u}) {
        double lo = 1e300, hi = 0;
        for (const auto& row : rows)
            if (row.hidden_dim == h) {
                lo = std::min(lo, static_cast<double>(row.trrl.mac_count));
                hi = std::max(hi, static_cast<double>(row.trrl.mac_count));
            }
        EXPECT_LT(hi / lo, 2.0);
    }
    const std::string table = format_neuron_table(rows);
    EXPECT_NE(table.find("{1,2,24}"), std::string::npos);
}

TEST(Bench, BpttMatchesTrrlForChain) {
    const RnnSpec s{{1}, 13, 15, 2};
    const auto b = run_gradient_bench(Engine::Bptt, s, 20, 1);
    const auto t = run_gradient_bench(Engine::Trrl, s, 20, 1);
    EXPECT_NEAR(static_cast<double>(b.mac_count) / t.mac_count, 1.0, 0.05);
}

TEST(BenchCsv, EmptyIsHeaderOnly) {
    const fs::path p = fs::temp_directory_path() / "rnnp_bench_empty.csv";
    emit_csv({}, p);
    EXPECT_EQ(read_text_file(p), "engine,lag_set,input_dim,hidden_dim,y_dim,tau,mac_count,peak_floats,wall_seconds,macronodes\n");
    fs::remove(p);
}

TEST(BenchCsv, RoundTripAndOverwrite) {
    std::vector<BenchRecord> recs = sweep_tau(Engine::Bptt, RnnSpec{{1, 2, 5}, 3, 4, 1}, {5, 9}, 2);
    const auto more = sweep_tau(Engine::Trrl, RnnSpec{{1, 2, 24}, 13, 5, 2}, {49}, 2);
    recs.insert(recs.end(), more.begin(), more.end());
    const fs::path p = fs::temp_directory_path() / "rnnp_bench_rt.csv";
    emit_csv(recs, p);
    emit_csv(recs, p);
    const auto back = parse_bench_csv(read_text_file(p));
    EXPECT_EQ(back, recs);
    fs::remove(p);
    EXPECT_THROW(parse_bench_csv("nope\n"), DataError);
}

TEST(LinearFit, ExactLine) {
    const auto f = linear_fit({1, 2, 3, 4}, {3, 5, 7, 9});
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, 1.0, 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
    EXPECT_THROW(linear_fit({1}, {1}), ConfigError);
}
