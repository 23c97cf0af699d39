#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rnnp/error.hpp"
#include "rnnp/gradients.hpp"
#include "rnnp/pbonacci.hpp"
#include "rnnp/training.hpp"

using namespace rnnp;

namespace {

struct Case {
    RnnSpec spec;
    ModelParams params;
    std::vector<Vector> xs;
    LossHead head;
    double target = 0.0;

    OutputGradient grad() const {
        return [this](const Vector& y) { return evaluate_loss(head, y, target).grad; };
    }
    std::function<double(const std::vector<double>&)> loss() const {
        return [this](const std::vector<double>& y) { return evaluate_loss(head, Vector(y), target).loss; };
    }
};

Case random_case(std::uint64_t seed, std::vector<std::size_t> lags, std::size_t y, std::size_t tau) {
    Rng rng(seed);
    Case c;
    c.spec = RnnSpec{std::move(lags), 1 + rng.below(5), 1 + rng.below(8), y};
    c.params = init_params(c.spec, rng);
    for (auto& v : c.params.b) v = rng.uniform(-0.5, 0.5);
    for (auto& v : c.params.c) v = rng.uniform(-0.5, 0.5);
    for (std::size_t t = 0; t < tau; ++t) c.xs.push_back(rand_uniform(rng, -1, 1, c.spec.input_dim));
    c.head = LossHead{y == 1 ? LossKind::PointMse : LossKind::GaussianNll};
    c.target = rng.uniform(-1, 1);
    return c;
}

double inf_norm(const GradientPair& g) {
    double m = 0.0;
    for (double v : g.d_theta) m = std::max(m, std::abs(v));
    for (double v : g.d_phi) m = std::max(m, std::abs(v));
    return m;
}

// Per coordinate: 1e-5 relative or 1e-7 absolute against the test-side oracle.
void expect_matches_oracle(const GradientPair& g, const oracle::FdGrads& fd, const std::string& what) {
    auto check = [&](const Vector& got, const std::vector<double>& ref, const char* block) {
        ASSERT_EQ(got.size(), ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) {
            const double abs = std::abs(got[i] - ref[i]);
            const double rel = abs / std::max({std::abs(got[i]), std::abs(ref[i]), 1e-12});
            EXPECT_TRUE(rel <= 1e-5 || abs <= 1e-7)
                << what << ' ' << block << '[' << i << "] got " << got[i] << " ref " << ref[i];
        }
    };
    check(g.d_theta, fd.theta, "theta");
    check(g.d_phi, fd.phi, "phi");
}

}  // namespace

TEST(Gradients, ZeroParamsOnlyOutputBiasAndVMove) {
    const RnnSpec s{{1, 2}, 3, 4, 1};
    const ModelParams p = ModelParams::zeros(s);
    const std::vector<Vector> xs(5, Vector{0.3, -0.2, 0.9});
    const LossHead head{};
    const OutputGradient g = [&](const Vector& y) { return mse_loss(y, 1.0).grad; };
    for (Engine e : {Engine::Trrl, Engine::Rtrl, Engine::Bptt}) {
        const EngineResult r = compute_gradients(e, p, s, xs, g);
        for (double v : r.grads.d_theta) EXPECT_EQ(v, 0.0) << to_string(e);
        EXPECT_EQ(r.grads.d_phi[phi_index_c(s, 0)], -2.0);
        for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(r.grads.d_phi[phi_index_V(s, 0, j)], -1.0);
    }
}

TEST(Gradients, TauOneIsFeedforwardBackprop) {
    const RnnSpec s{{1, 2}, 3, 4, 2};
    Rng rng(4);
    const ModelParams p = init_params(s, rng);
    const std::vector<Vector> xs{rand_uniform(rng, -1, 1, 3)};
    const Vector gy{0.3, -1.2};
    // a = b + U x, h = sig(a), y = c + V h
    Vector h(4);
    for (std::size_t j = 0; j < 4; ++j) {
        double a = p.b[j];
        for (std::size_t k = 0; k < 3; ++k) a += p.U(j, k) * xs[0][k];
        h[j] = oracle::sig(a);
    }
    const OutputGradient g = [&](const Vector&) { return gy; };
    for (Engine e : {Engine::Trrl, Engine::Rtrl, Engine::Bptt}) {
        const EngineResult r = compute_gradients(e, p, s, xs, g);
        for (std::size_t j = 0; j < 4; ++j) {
            double delta = 0.0;
            for (std::size_t k = 0; k < 2; ++k) {
                delta += p.V(k, j) * gy[k];
                EXPECT_NEAR(r.grads.d_phi[phi_index_V(s, k, j)], gy[k] * h[j], 1e-15);
            }
            delta *= h[j] * (1 - h[j]);
            EXPECT_NEAR(r.grads.d_theta[theta_index_b(s, j)], delta, 1e-15);
            for (std::size_t k = 0; k < 3; ++k)
                EXPECT_NEAR(r.grads.d_theta[theta_index_U(s, j, k)], delta * xs[0][k], 1e-15);
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(r.grads.d_theta[theta_index_W(s, i, j, k)], 0.0);
        }
        EXPECT_EQ(r.grads.d_phi[phi_index_c(s, 1)], gy[1]);
    }
}

TEST(Gradients, RtrlMatchesFiniteDifferencesSmallCase) {
    // h=6, x=3, y=1, L={1,2}, tau=10
    Rng rng(2718);
    Case c;
    c.spec = RnnSpec{{1, 2}, 3, 6, 1};
    c.params = init_params(c.spec, rng);
    for (std::size_t t = 0; t < 10; ++t) c.xs.push_back(rand_uniform(rng, -1, 1, 3));
    c.target = 0.4;
    const auto fd = oracle::central_differences(c.params, c.spec, c.xs, c.loss());
    const EngineResult r = rtrl_gradients(c.params, c.spec, c.xs, c.grad());
    expect_matches_oracle(r.grads, fd, "rtrl");
}

TEST(Gradients, AllEnginesMatchOracleAndEachOther) {
    const std::vector<std::vector<std::size_t>> sets{{1}, {1, 2}, {1, 3}, {1, 2, 5}};
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Rng pick(seed * 7919);
        const std::size_t y = 1 + pick.below(2);
        const std::size_t tau = 1 + pick.below(12);
        const Case c = random_case(seed, sets[seed % 4], y, tau);
        const auto fd = oracle::central_differences(c.params, c.spec, c.xs, c.loss());
        const EngineResult tr = trrl_gradients(c.params, c.spec, c.xs, c.grad());
        const EngineResult rt = rtrl_gradients(c.params, c.spec, c.xs, c.grad());
        const BpttResult bp = bptt_gradients(c.params, c.spec, c.xs, c.grad());
        const std::string tag = "seed " + std::to_string(seed);
        expect_matches_oracle(tr.grads, fd, tag + " trrl");
        expect_matches_oracle(rt.grads, fd, tag + " rtrl");
        expect_matches_oracle(bp.grads, fd, tag + " bptt");
        EXPECT_LE(scaled_max_distance(rt.grads, tr.grads), 1e-10) << tag;
        EXPECT_LE(scaled_max_distance(bp.grads, tr.grads), 1e-10) << tag;
        EXPECT_EQ(tr.output, rt.output);
    }
}

TEST(Gradients, LibraryFiniteDifferencesAgreeWithOracle) {
    const Case c = random_case(77, {1, 2}, 2, 7);
    const auto fd = oracle::central_differences(c.params, c.spec, c.xs, c.loss());
    const GradientPair lib = finite_difference_gradients(
        c.params, c.spec, c.xs, [&](const Vector& y) { return evaluate_loss(c.head, y, c.target).loss; });
    for (std::size_t i = 0; i < fd.theta.size(); ++i) EXPECT_NEAR(lib.d_theta[i], fd.theta[i], 1e-9);
    for (std::size_t i = 0; i < fd.phi.size(); ++i) EXPECT_NEAR(lib.d_phi[i], fd.phi[i], 1e-9);
}

TEST(Gradients, FiniteDifferencesExactOnQuadratic) {
    // Only c moves a quadratic loss on a linear function of the parameters when V = 0.
    const RnnSpec s{{1}, 2, 3, 1};
    ModelParams p = ModelParams::zeros(s);
    p.c[0] = 0.25;
    const std::vector<Vector> xs(3, Vector{1.0, 2.0});
    const GradientPair g = finite_difference_gradients(
        p, s, xs, [](const Vector& y) { return 3.0 * (y[0] - 1.0) * (y[0] - 1.0); }, 1e-4);
    EXPECT_NEAR(g.d_phi[phi_index_c(s, 0)], 6.0 * (0.25 - 1.0), 1e-9);
}

TEST(Gradients, FiniteDifferencesZeroAtSymmetricFixedPoint) {
    const RnnSpec s{{1}, 2, 2, 1};
    const ModelParams p = ModelParams::zeros(s);
    const std::vector<Vector> xs(4, Vector{0.0, 0.0});
    const GradientPair g =
        finite_difference_gradients(p, s, xs, [](const Vector& y) { return (y[0] - 1.0) * (y[0] - 1.0) + (y[0] + 1.0) * (y[0] + 1.0); });
    EXPECT_LT(scaled_max_distance(g, GradientPair::zeros(s)), 1e-9);
}

TEST(Gradients, FiniteDifferencesNonFiniteLossThrows) {
    const RnnSpec s{{1}, 1, 1, 1};
    const std::vector<Vector> xs(2, Vector{0.0});
    EXPECT_THROW(finite_difference_gradients(ModelParams::zeros(s), s, xs, [](const Vector&) { return NAN; }),
                 NumericError);
}

TEST(Gradients, NonFiniteIntermediateReportsStep) {
    const RnnSpec s{{1}, 1, 1, 1};
    ModelParams p = ModelParams::zeros(s);
    p.U(0, 0) = 1.0;
    p.V(0, 0) = 1.0;
    std::vector<Vector> xs(5, Vector{0.0});
    xs[2][0] = NAN;
    const OutputGradient g = [](const Vector& y) { return Vector(y.size(), 1.0); };
    try {
        trrl_gradients(p, s, xs, g);
        FAIL() << "expected NonFiniteError";
    } catch (const NonFiniteError& e) {
        EXPECT_EQ(e.step(), 3u);
    }
}

TEST(Bptt, ChainCountsTauMacronodes) {
    const Case c = random_case(5, {1}, 1, 9);
    const BpttResult r = bptt_gradients(c.params, c.spec, c.xs, c.grad());
    EXPECT_EQ(to_string(r.macronodes), "9");
}

TEST(Bptt, FibonacciTreeAtTauFour) {
    const Case c = random_case(6, {1, 2}, 1, 4);
    EXPECT_EQ(to_string(bptt_gradients(c.params, c.spec, c.xs, c.grad()).macronodes), "7");
    const std::vector<std::size_t> l{1, 2};
    EXPECT_EQ(to_string(macronode_count(4, l)), "7");
}

TEST(Bptt, VisitedCountMatchesTreeEnumeration) {
    for (const auto& lags : std::vector<std::vector<std::size_t>>{{1, 2}, {1, 3}, {2, 3}, {1, 2, 5}}) {
        for (std::size_t tau = 1; tau <= 15; ++tau) {
            const Case c = random_case(tau, lags, 1, tau);
            const BpttResult r = bptt_gradients(c.params, c.spec, c.xs, c.grad(), 64);
            const auto expected = std::to_string(oracle::enumerate_tree(tau, lags));
            EXPECT_EQ(to_string(r.macronodes), expected);
            EXPECT_EQ(to_string(macronode_count(tau, lags)), expected);
        }
    }
}

TEST(Bptt, GuardRejectsLongSequences) {
    const Case c = random_case(8, {1, 2}, 1, 26);
    EXPECT_THROW(bptt_gradients(c.params, c.spec, c.xs, c.grad()), NumericError);
    EXPECT_NO_THROW(bptt_gradients(c.params, c.spec, std::span(c.xs).first(25), c.grad()));
}

TEST(MacronodeCount, Cases) {
    const std::vector<std::size_t> chain{1}, fib{1, 2};
    EXPECT_EQ(to_string(macronode_count(37, chain)), "37");
    EXPECT_EQ(to_string(macronode_count(5, fib)), "12");
    EXPECT_THROW(macronode_count(0, fib), ConfigError);
}

TEST(MacronodeCount, EqualsPbonacciSums) {
    for (unsigned p = 1; p <= 4; ++p) {
        std::vector<std::size_t> lags;
        for (std::size_t l = 1; l <= p; ++l) lags.push_back(l);
        const auto x = oracle::pbonacci_terms(std::max(p, 2u), 40);
        unsigned __int128 s = 0;
        for (std::size_t tau = 1; tau <= 40; ++tau) {
            s += p == 1 ? 1 : x[tau];
            EXPECT_EQ(macronode_count(tau, lags), s) << "p " << p << " tau " << tau;
        }
    }
}

TEST(MacronodeCount, OverflowIsAnError) {
    const std::vector<std::size_t> fib{1, 2};
    EXPECT_NO_THROW(macronode_count(180, fib));
    EXPECT_THROW(macronode_count(400, fib), NumericError);
}

TEST(RtrlSpace, FloatsAndPeak) {
    EXPECT_EQ((RnnSpec{{1}, 6, 1, 1}.weight_count()), 10u);
    EXPECT_EQ(rtrl_space_floats(RnnSpec{{1}, 6, 1, 1}), 10u);
    // consecutive lags: p*y*w
    for (std::size_t p = 1; p <= 3; ++p) {
        std::vector<std::size_t> lags;
        for (std::size_t l = 1; l <= p; ++l) lags.push_back(l);
        const RnnSpec s{lags, 13, 15, 2};
        EXPECT_EQ(rtrl_space_floats(s), p * 2 * s.weight_count());
        Rng rng(p);
        const ModelParams params = init_params(s, rng);
        const std::vector<Vector> xs(12, Vector(13, 0.1));
        const auto r = rtrl_gradients(params, s, xs, [](const Vector& y) { return Vector(y.size(), 1.0); });
        EXPECT_EQ(r.counter.peak_floats, rtrl_space_floats(s));
    }
    // y doubles -> count doubles at fixed w: x adjusted to keep w equal
    const RnnSpec a{{1, 2}, 9, 4, 1};  // theta (9+2+1)*4=48, phi 5 -> 53
    const RnnSpec b{{1, 2}, 3, 4, 2};  // theta (3+4+1)*4=32, phi 10 -> 42
    EXPECT_EQ(rtrl_space_floats(a), 2u * 1 * a.weight_count());
    EXPECT_EQ(rtrl_space_floats(b), 2u * 2 * b.weight_count());
}

TEST(RtrlSpace, NonConsecutiveLagsKeepMaxLagJacobians) {
    const RnnSpec s{{1, 2, 24}, 13, 15, 2};
    EXPECT_EQ(rtrl_space_floats(s), 24u * 2 * 332);
}

TEST(Counters, TrrlAndRtrlLinearInTau) {
    const RnnSpec s{{1, 2}, 5, 6, 2};
    Rng rng(3);
    const ModelParams p = init_params(s, rng);
    std::vector<Vector> xs;
    for (int t = 0; t < 64; ++t) xs.push_back(rand_uniform(rng, -1, 1, 5));
    const OutputGradient g = [](const Vector& y) { return Vector(y.size(), 1.0); };
    for (std::size_t tau = 8; tau <= 32; tau += 4) {
        for (Engine e : {Engine::Trrl, Engine::Rtrl}) {
            const auto m1 = compute_gradients(e, p, s, std::span(xs).first(tau), g).counter.mac_count;
            const auto m2 = compute_gradients(e, p, s, std::span(xs).first(2 * tau), g).counter.mac_count;
            EXPECT_NEAR(static_cast<double>(m2) / m1, 2.0, 0.1) << to_string(e) << " tau " << tau;
        }
    }
}

TEST(Counters, DeterministicAcrossRuns) {
    const Case c = random_case(10, {1, 2, 5}, 2, 12);
    for (Engine e : {Engine::Trrl, Engine::Rtrl, Engine::Bptt}) {
        const auto a = compute_gradients(e, c.params, c.spec, c.xs, c.grad()).counter;
        const auto b = compute_gradients(e, c.params, c.spec, c.xs, c.grad()).counter;
        EXPECT_EQ(a.mac_count, b.mac_count);
        EXPECT_EQ(a.peak_floats, b.peak_floats);
    }
}

namespace {

std::uint64_t trrl_macs(const RnnSpec& s, std::size_t tau) {
    Rng rng(1);
    const ModelParams p = init_params(s, rng);
    std::vector<Vector> xs;
    for (std::size_t t = 0; t < tau; ++t) xs.push_back(rand_uniform(rng, -1, 1, s.input_dim));
    return trrl_gradients(p, s, xs, [](const Vector& y) { return Vector(y.size(), 1.0); }).counter.mac_count;
}

}  // namespace

TEST(Counters, TrrlAtFixedWeightCountDiffersOnlyByPushBacks) {
    // Same w via x; the only p-dependent work left is g_{i+l} += W_l^T g_i, h*y per live edge.
    const std::size_t tau = 49;
    const std::vector<RnnSpec> specs{{{1}, 17, 15, 2}, {{1, 2}, 15, 15, 2}, {{1, 2, 3}, 13, 15, 2}};
    std::vector<std::uint64_t> rest;
    for (const auto& s : specs) {
        ASSERT_EQ(s.weight_count(), specs[0].weight_count());
        std::uint64_t pushes = 0;
        for (std::size_t l : s.lags) pushes += (tau - l) * s.hidden_dim * s.output_dim;
        rest.push_back(trrl_macs(s, tau) - pushes);
    }
    EXPECT_EQ(rest[0], rest[1]);
    EXPECT_EQ(rest[0], rest[2]);
}

TEST(Counters, TrrlIndependentOfOrderWhenWeightsDominate) {
    const std::vector<RnnSpec> specs{{{1}, 40, 15, 2}, {{1, 2}, 38, 15, 2}, {{1, 2, 3}, 36, 15, 2}};
    std::vector<double> counts;
    for (const auto& s : specs) {
        ASSERT_EQ(s.weight_count(), specs[0].weight_count());
        counts.push_back(static_cast<double>(trrl_macs(s, 49)));
    }
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    EXPECT_LT(*hi / *lo, 1.10);
}

TEST(Counters, BpttEqualsTrrlForSingleLag) {
    const Case c = random_case(12, {1}, 2, 20);
    const auto t = trrl_gradients(c.params, c.spec, c.xs, c.grad()).counter.mac_count;
    const auto b = bptt_gradients(c.params, c.spec, c.xs, c.grad()).counter.mac_count;
    EXPECT_NEAR(static_cast<double>(b) / t, 1.0, 0.05);
}

TEST(Counters, BpttGrowsByGoldenRatio) {
    const RnnSpec s{{1, 2}, 3, 4, 1};
    Rng rng(2);
    const ModelParams p = init_params(s, rng);
    std::vector<Vector> xs;
    for (int t = 0; t < 22; ++t) xs.push_back(rand_uniform(rng, -1, 1, 3));
    const OutputGradient g = [](const Vector& y) { return Vector(y.size(), 1.0); };
    double prev = 0.0;
    for (std::size_t tau = 15; tau <= 22; ++tau) {
        const double m = static_cast<double>(bptt_gradients(p, s, std::span(xs).first(tau), g).counter.mac_count);
        if (prev > 0) EXPECT_NEAR(m / prev, 1.6180339887, 0.16);
        prev = m;
    }
}

TEST(Engine, ParseAndFormat) {
    EXPECT_EQ(parse_engine("TRRL"), Engine::Trrl);
    EXPECT_EQ(parse_engine("rtrl"), Engine::Rtrl);
    EXPECT_EQ(parse_engine("Bptt"), Engine::Bptt);
    EXPECT_EQ(to_string(Engine::Rtrl), "RTRL");
    EXPECT_THROW(parse_engine("sgd"), ConfigError);
}

TEST(CompareGradients, ToleranceSemantics) {
    const GradientPair a{Vector{1.0, 0.0}, Vector{1e-9}};
    const GradientPair b{Vector{1.0 + 1e-7, 5e-8}, Vector{0.0}};
    const auto d = compare_gradients(a, b, 1e-5, 1e-7);
    EXPECT_TRUE(d.ok());
    EXPECT_NEAR(d.max_abs, 1e-7, 1e-12);
    EXPECT_EQ(compare_gradients(a, GradientPair{Vector{2.0, 0.0}, Vector{0.0}}, 1e-5, 1e-7).violations, 1u);
}
