#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rnnp/error.hpp"
#include "rnnp/training.hpp"

using namespace rnnp;

namespace {

// ARX-driven targets: r_t = 0.7 r_{t-1} + 0.5 x_t, r_0 = 0, observed at the window end.
struct ArxData {
    std::vector<std::vector<Vector>> inputs;
    std::vector<SequenceSample> samples;
    double target_variance = 0.0;
};

ArxData make_arx(std::uint64_t seed, std::size_t count, std::size_t tau) {
    Rng rng(seed);
    ArxData d;
    d.inputs.resize(count);
    std::vector<double> targets;
    for (auto& xs : d.inputs) {
        double r = 0.0;
        for (std::size_t t = 0; t < tau; ++t) {
            const double x = rng.uniform(-1, 1);
            xs.push_back(Vector{x});
            r = 0.7 * r + 0.5 * x;
        }
        targets.push_back(r);
    }
    double mean = 0.0;
    for (double t : targets) mean += t / count;
    for (double t : targets) d.target_variance += (t - mean) * (t - mean) / count;
    for (std::size_t i = 0; i < count; ++i) d.samples.push_back({d.inputs[i], targets[i]});
    return d;
}

double numeric_derivative(const std::function<double(const Vector&)>& f, Vector y, std::size_t k,
                          double h = 1e-6) {
    const double keep = y[k];
    y[k] = keep + h;
    const double up = f(y);
    y[k] = keep - h;
    const double dn = f(y);
    return (up - dn) / (2 * h);
}

}  // namespace

TEST(MseLoss, Cases) {
    const auto perfect = mse_loss(Vector{0.3}, 0.3);
    EXPECT_EQ(perfect.loss, 0.0);
    EXPECT_EQ(perfect.grad[0], 0.0);
    const auto unit = mse_loss(Vector{1.0}, 0.0);
    EXPECT_EQ(unit.loss, 1.0);
    EXPECT_EQ(unit.grad[0], 2.0);
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const double t = rng.uniform(-2, 2);
        const Vector y{rng.uniform(-2, 2)};
        // central differences are exact on a quadratic up to roundoff
        const double fd = numeric_derivative([&](const Vector& v) { return mse_loss(v, t).loss; }, y, 0, 1e-4);
        EXPECT_NEAR(mse_loss(y, t).grad[0], fd, 1e-9);
    }
}

TEST(GaussianNll, StandardizedResidualZero) {
    const LossHead head{LossKind::GaussianNll};
    const double raw = std::log(std::expm1(1.0 - head.sigma_floor));  // softplus(raw) + floor = 1
    const auto v = gaussian_nll_loss(Vector{0.4, raw}, 0.4, head);
    EXPECT_NEAR(v.loss, 0.5 * std::log(2 * std::numbers::pi), 1e-12);
    EXPECT_NEAR(v.loss, 0.9189385332, 1e-9);
    EXPECT_EQ(v.grad[0], 0.0);
    EXPECT_NEAR(head_sigma(Vector{0.4, raw}, head), 1.0, 1e-12);
}

TEST(GaussianNll, GradientMatchesFiniteDifferences) {
    const LossHead head{LossKind::GaussianNll};
    Rng rng(50);
    for (int i = 0; i < 50; ++i) {
        const double r = rng.uniform(-2, 2);
        const Vector y{rng.uniform(-2, 2), rng.uniform(-3, 3)};
        const auto v = gaussian_nll_loss(y, r, head);
        for (std::size_t k = 0; k < 2; ++k) {
            const double fd =
                numeric_derivative([&](const Vector& z) { return gaussian_nll_loss(z, r, head).loss; }, y, k);
            EXPECT_NEAR(v.grad[k], fd, 1e-7 * std::max(1.0, std::abs(fd))) << "case " << i << " k " << k;
        }
    }
}

TEST(GaussianNll, FloorKeepsLossFinite) {
    const LossHead head{LossKind::GaussianNll};
    const auto v = gaussian_nll_loss(Vector{0.0, -800.0}, 0.0, head);
    EXPECT_TRUE(std::isfinite(v.loss));
    EXPECT_NEAR(head_sigma(Vector{0.0, -800.0}, head), head.sigma_floor, 1e-15);
}

TEST(LossHead, DimensionContract) {
    EXPECT_NO_THROW((LossHead{LossKind::PointMse}.check(RnnSpec{{1}, 1, 1, 1})));
    EXPECT_THROW((LossHead{LossKind::PointMse}.check(RnnSpec{{1}, 1, 1, 2})), ConfigError);
    EXPECT_THROW((LossHead{LossKind::GaussianNll}.check(RnnSpec{{1}, 1, 1, 1})), ConfigError);
    EXPECT_EQ(parse_loss_kind("nll"), LossKind::GaussianNll);
    EXPECT_EQ(parse_loss_kind("mse"), LossKind::PointMse);
    EXPECT_THROW(parse_loss_kind("huber"), ConfigError);
}

TEST(TrainConfig, Validation) {
    TrainConfig c;
    EXPECT_NO_THROW(c.validate());
    c.batch_size = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.patience = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.learning_rate = -1;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Adam, ZeroGradientIsFixedPoint) {
    const RnnSpec s{{1}, 2, 2, 1};
    Rng rng(1);
    FlatParams p = pack(init_params(s, rng));
    const FlatParams start = p;
    AdamState st = AdamState::zeros(s);
    for (int i = 0; i < 100; ++i) adam_step(p, GradientPair::zeros(s), st, TrainConfig{});
    EXPECT_EQ(p, start);
    EXPECT_EQ(st.step, 100u);
}

TEST(Adam, FirstStepIsMinusLrTimesSign) {
    const RnnSpec s{{1}, 1, 1, 1};
    FlatParams p{Vector(s.theta_size()), Vector(s.phi_size())};
    GradientPair g = GradientPair::zeros(s);
    g.d_theta[0] = 3.5;
    g.d_phi[1] = -0.02;
    AdamState st = AdamState::zeros(s);
    TrainConfig c;
    c.learning_rate = 0.01;
    adam_step(p, g, st, c);
    EXPECT_NEAR(p.theta[0], -0.01, 1e-8);
    EXPECT_NEAR(p.phi[1], 0.01, 1e-6);
    EXPECT_EQ(p.theta[1], 0.0);
}

TEST(Adam, ConvergesOnQuadratic) {
    const RnnSpec s{{1}, 1, 1, 1};
    FlatParams p{Vector(s.theta_size()), Vector(s.phi_size())};
    AdamState st = AdamState::zeros(s);
    TrainConfig c;
    c.learning_rate = 1e-2;
    const double target = 3.0;
    for (int i = 0; i < 2000; ++i) {
        GradientPair g = GradientPair::zeros(s);
        g.d_phi[0] = 2 * (p.phi[0] - target);
        adam_step(p, g, st, c);
    }
    EXPECT_LT(std::abs(p.phi[0] - target), 1e-3);
}

TEST(Adam, RejectsNonFiniteGradient) {
    const RnnSpec s{{1}, 1, 1, 1};
    FlatParams p{Vector(s.theta_size()), Vector(s.phi_size())};
    AdamState st = AdamState::zeros(s);
    GradientPair g = GradientPair::zeros(s);
    g.d_theta[0] = NAN;
    EXPECT_THROW(adam_step(p, g, st, TrainConfig{}), NumericError);
}

TEST(Train, ZeroLearningRateStopsAfterPatiencePlusOne) {
    const ArxData d = make_arx(1, 20, 5);
    const RnnSpec s{{1}, 1, 3, 1};
    Rng rng(2);
    TrainConfig c;
    c.learning_rate = 0.0;
    c.patience = 1;
    c.max_epochs = 50;
    const auto r = train(init_params(s, rng), s, d.samples, LossHead{}, c);
    EXPECT_EQ(r.history.size(), 2u);
    EXPECT_EQ(r.best_epoch, 1u);
}

TEST(Train, SeededRunsAreIdentical) {
    const ArxData d = make_arx(3, 40, 6);
    const RnnSpec s{{1}, 1, 3, 1};
    TrainConfig c;
    c.learning_rate = 0.01;
    c.batch_size = 8;
    c.max_epochs = 5;
    Rng r1(4), r2(4);
    const auto a = train(init_params(s, r1), s, d.samples, LossHead{}, c);
    const auto b = train(init_params(s, r2), s, d.samples, LossHead{}, c);
    ASSERT_EQ(a.history.size(), b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
    EXPECT_EQ(a.params, b.params);
}

TEST(Train, LearnsArxDynamics) {
    const ArxData d = make_arx(5, 400, 12);
    const ArxData test = make_arx(6, 200, 12);
    const RnnSpec s{{1}, 1, 4, 1};
    Rng rng(7);
    TrainConfig c;
    c.learning_rate = 0.01;
    c.batch_size = 16;
    c.max_epochs = 60;
    c.patience = 10;
    const auto r = train(init_params(s, rng), s, d.samples, LossHead{}, c);
    const double mse = mean_loss(r.params, s, test.samples, LossHead{});
    EXPECT_LT(mse, 0.5 * test.target_variance) << "mse " << mse << " var " << test.target_variance;
}

TEST(Train, TrrlAndRtrlGiveTheSameTrajectory) {
    const ArxData d = make_arx(8, 60, 8);
    const RnnSpec s{{1, 2}, 1, 4, 1};
    TrainConfig c;
    c.learning_rate = 0.01;
    c.batch_size = 10;
    c.max_epochs = 4;
    c.engine = Engine::Trrl;
    Rng r1(9), r2(9);
    const auto a = train(init_params(s, r1), s, d.samples, LossHead{}, c);
    c.engine = Engine::Rtrl;
    const auto b = train(init_params(s, r2), s, d.samples, LossHead{}, c);
    ASSERT_EQ(a.history.size(), b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i)
        EXPECT_NEAR(a.history[i].train_loss, b.history[i].train_loss, 1e-8 * std::abs(a.history[i].train_loss));
    const FlatParams fa = pack(a.params), fb = pack(b.params);
    for (std::size_t i = 0; i < fa.theta.size(); ++i)
        EXPECT_NEAR(fa.theta[i], fb.theta[i], 1e-8 * std::max(1.0, std::abs(fa.theta[i])));
}

TEST(Train, ReturnsBestNotLastParameters) {
    // A large learning rate makes the validation loss bounce; the result must match the best epoch.
    const ArxData d = make_arx(10, 60, 6);
    const ArxData v = make_arx(11, 30, 6);
    const RnnSpec s{{1}, 1, 3, 1};
    Rng rng(12);
    TrainConfig c;
    c.learning_rate = 0.3;
    c.batch_size = 4;
    c.max_epochs = 12;
    c.patience = 12;
    const auto r = train(init_params(s, rng), s, d.samples, LossHead{}, c, v.samples);
    double best = INFINITY;
    std::size_t best_epoch = 0;
    for (const auto& e : r.history) {
        ASSERT_TRUE(e.val_loss.has_value());
        if (*e.val_loss < best) {
            best = *e.val_loss;
            best_epoch = e.epoch;
        }
    }
    EXPECT_EQ(r.best_epoch, best_epoch);
    EXPECT_EQ(r.best_loss, best);
    EXPECT_DOUBLE_EQ(mean_loss(r.params, s, v.samples, LossHead{}), best);
}

TEST(Train, RejectsEmptyDataAndBadHead) {
    const RnnSpec s{{1}, 1, 2, 1};
    Rng rng(1);
    EXPECT_THROW(train(init_params(s, rng), s, {}, LossHead{}, TrainConfig{}), ConfigError);
    const ArxData d = make_arx(1, 4, 3);
    EXPECT_THROW(train(init_params(s, rng), s, d.samples, LossHead{LossKind::GaussianNll}, TrainConfig{}),
                 ConfigError);
}

TEST(Train, BpttGuardPropagates) {
    const ArxData d = make_arx(1, 4, 30);
    const RnnSpec s{{1, 2}, 1, 2, 1};
    Rng rng(1);
    TrainConfig c;
    c.engine = Engine::Bptt;
    EXPECT_THROW(train(init_params(s, rng), s, d.samples, LossHead{}, c), NumericError);
}

TEST(Train, HistoryCsv) {
    std::vector<EpochRecord> h{{1, 0.5, 0.25, 0.1}, {2, 0.4, std::nullopt, 0.1}};
    const std::string csv = history_csv(h);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,train_loss,val_loss,seconds");
    const std::string second = csv.substr(csv.find("\n2,") + 1);
    EXPECT_NE(second.find(",,"), std::string::npos) << csv;
}

TEST(GridSearch, SingleCellEqualsTrain) {
    const ArxData d = make_arx(13, 30, 5);
    const ArxData v = make_arx(14, 10, 5);
    const RnnSpec base{{1}, 1, 99, 1};
    TrainConfig c;
    c.max_epochs = 3;
    c.seed = 21;
    const GridAxis one{{3}, {0.01}, {8}};
    const auto report = grid_search(base, d.samples, v.samples, LossHead{}, c, one);
    ASSERT_EQ(report.cells.size(), 1u);
    RnnSpec s = base;
    s.hidden_dim = 3;
    TrainConfig cc = c;
    cc.learning_rate = 0.01;
    cc.batch_size = 8;
    Rng rng(21);
    const auto direct = train(init_params(s, rng), s, d.samples, LossHead{}, cc, v.samples);
    EXPECT_EQ(report.best().val_loss, direct.best_loss);
    EXPECT_EQ(report.best().epochs, direct.history.size());
}

TEST(GridSearch, FullGridHasEighteenSortedCells) {
    const ArxData d = make_arx(15, 16, 4);
    const ArxData v = make_arx(16, 8, 4);
    TrainConfig c;
    c.max_epochs = 2;
    const GridAxis full;
    EXPECT_EQ(full.size(), 18u);
    const auto report = grid_search(RnnSpec{{1}, 1, 1, 1}, d.samples, v.samples, LossHead{}, c, full);
    ASSERT_EQ(report.cells.size(), 18u);
    for (const auto& cell : report.cells) EXPECT_LE(report.best().val_loss, cell.val_loss);
    for (std::size_t i = 1; i < report.cells.size(); ++i)
        EXPECT_LE(report.cells[i - 1].val_loss, report.cells[i].val_loss);
}

TEST(GridSearch, CellFailuresAreRecorded) {
    const ArxData d = make_arx(17, 6, 30);
    TrainConfig c;
    c.max_epochs = 1;
    c.engine = Engine::Bptt;
    const auto report = grid_search(RnnSpec{{1, 2}, 1, 1, 1}, d.samples, {}, LossHead{}, c, GridAxis{{2}, {0.01}, {4}});
    ASSERT_EQ(report.cells.size(), 1u);
    EXPECT_FALSE(report.cells[0].error.empty());
    EXPECT_TRUE(std::isinf(report.cells[0].val_loss));
}
