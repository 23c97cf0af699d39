#include "rnnp/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "rnnp/error.hpp"

namespace rnnp {

std::string to_string(LossKind kind) { return kind == LossKind::PointMse ? "mse" : "nll"; }

LossKind parse_loss_kind(const std::string& name) {
    if (name == "mse" || name == "point") return LossKind::PointMse;
    if (name == "nll" || name == "gaussian") return LossKind::GaussianNll;
    throw ConfigError("unknown loss head '" + name + "' (expected mse or nll)");
}

void LossHead::check(const RnnSpec& spec) const {
    if (spec.output_dim != output_dim()) {
        throw ConfigError("loss head " + to_string(kind) + " needs output_dim " + std::to_string(output_dim()) +
                          ", spec has " + std::to_string(spec.output_dim));
    }
    if (kind == LossKind::GaussianNll && !(sigma_floor > 0.0)) throw ConfigError("sigma_floor must be > 0");
}

LossValue mse_loss(const Vector& yhat, double target) {
    if (yhat.size() != 1) throw DimensionError("mse_loss: expects a 1-dimensional output");
    const double e = yhat[0] - target;
    return {e * e, Vector{2.0 * e}};
}

double head_sigma(const Vector& yhat, const LossHead& head) { return softplus(yhat[1]) + head.sigma_floor; }

LossValue gaussian_nll_loss(const Vector& yhat, double target, const LossHead& head) {
    if (yhat.size() != 2) throw DimensionError("gaussian_nll_loss: expects a 2-dimensional output");
    const double mu = yhat[0];
    const double sigma = head_sigma(yhat, head);
    const double r = target - mu;
    const double s2 = sigma * sigma;
    LossValue out;
    out.loss = 0.5 * std::log(2.0 * std::numbers::pi * s2) + r * r / (2.0 * s2);
    // d/dsigma = 1/sigma - r^2/sigma^3; softplus' = sigmoid
    const double d_sigma = 1.0 / sigma - r * r / (s2 * sigma);
    out.grad = Vector{-r / s2, d_sigma * sigmoid(yhat[1])};
    return out;
}

LossValue evaluate_loss(const LossHead& head, const Vector& yhat, double target) {
    return head.kind == LossKind::PointMse ? mse_loss(yhat, target) : gaussian_nll_loss(yhat, target, head);
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (patience < 1) throw ConfigError("patience must be >= 1");
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        throw ConfigError("adam betas must lie in [0, 1)");
    }
    if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be > 0");
}

AdamState AdamState::zeros(const RnnSpec& spec) {
    return {Vector(spec.weight_count()), Vector(spec.weight_count()), 0};
}

void adam_step(FlatParams& params, const GradientPair& grads, AdamState& state, const TrainConfig& config) {
    const std::size_t nt = params.theta.size(), np = params.phi.size();
    if (grads.d_theta.size() != nt || grads.d_phi.size() != np || state.m.size() != nt + np ||
        state.v.size() != nt + np) {
        throw DimensionError("adam_step: parameter, gradient and state sizes disagree");
    }
    if (!grads.d_theta.all_finite() || !grads.d_phi.all_finite()) throw NumericError("adam_step: non-finite gradient");
    ++state.step;
    const double b1 = config.adam_beta1, b2 = config.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    auto update = [&](double& p, double g, std::size_t k) {
        state.m[k] = b1 * state.m[k] + (1.0 - b1) * g;
        state.v[k] = b2 * state.v[k] + (1.0 - b2) * g * g;
        const double mhat = state.m[k] / c1;
        const double vhat = state.v[k] / c2;
        p -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_eps);
    };
    for (std::size_t i = 0; i < nt; ++i) update(params.theta[i], grads.d_theta[i], i);
    for (std::size_t i = 0; i < np; ++i) update(params.phi[i], grads.d_phi[i], nt + i);
}

double mean_loss(const ModelParams& params, const RnnSpec& spec, std::span<const SequenceSample> samples,
                 const LossHead& head) {
    if (samples.empty()) throw ConfigError("mean_loss: no samples");
    double total = 0.0;
    for (const auto& s : samples) total += evaluate_loss(head, predict_final(params, spec, s.inputs), s.target).loss;
    return total / static_cast<double>(samples.size());
}

TrainResult train(const ModelParams& initial, const RnnSpec& spec, std::span<const SequenceSample> training,
                  const LossHead& head, const TrainConfig& config, std::span<const SequenceSample> validation,
                  const EpochCallback& on_epoch) {
    config.validate();
    spec.validate();
    head.check(spec);
    initial.check_shape(spec);
    if (training.empty()) throw ConfigError("train: no training windows");
    if (config.engine == Engine::Bptt) {
        for (const auto& s : training) {
            if (s.inputs.size() > config.bptt_guard) {
                throw NumericError("train: window length " + std::to_string(s.inputs.size()) +
                                   " exceeds the BPTT guard of " + std::to_string(config.bptt_guard));
            }
        }
    }

    FlatParams flat = pack(initial);
    AdamState adam = AdamState::zeros(spec);
    Rng rng(config.seed);
    std::vector<std::size_t> order(training.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result;
    result.params = initial;
    result.best_loss = std::numeric_limits<double>::infinity();
    std::size_t stale = 0;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        shuffle(order, rng);
        ModelParams current = unpack(spec, flat);
        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++batch_index) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            GradientPair sum = GradientPair::zeros(spec);
            for (std::size_t k = begin; k < end; ++k) {
                const SequenceSample& sample = training[order[k]];
                double sample_loss = 0.0;
                auto grad_fn = [&](const Vector& out) {
                    LossValue lv = evaluate_loss(head, out, sample.target);
                    sample_loss = lv.loss;
                    return lv.grad;
                };
                const EngineResult r =
                    compute_gradients(config.engine, current, spec, sample.inputs, grad_fn, config.bptt_guard);
                if (!std::isfinite(sample_loss)) {
                    throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                       std::to_string(batch_index));
                }
                loss_sum += sample_loss;
                for (std::size_t i = 0; i < sum.d_theta.size(); ++i) sum.d_theta[i] += r.grads.d_theta[i];
                for (std::size_t i = 0; i < sum.d_phi.size(); ++i) sum.d_phi[i] += r.grads.d_phi[i];
            }
            const double inv = 1.0 / static_cast<double>(end - begin);
            for (auto& g : sum.d_theta) g *= inv;
            for (auto& g : sum.d_phi) g *= inv;
            try {
                adam_step(flat, sum, adam, config);
            } catch (const NumericError&) {
                throw NumericError("train: non-finite gradient at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batch_index));
            }
            current = unpack(spec, flat);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(training.size());
        if (!validation.empty()) rec.val_loss = mean_loss(current, spec, validation, head);
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.history.push_back(rec);
        if (on_epoch) on_epoch(rec);

        const double monitored = rec.val_loss ? *rec.val_loss : rec.train_loss;
        if (!std::isfinite(monitored)) {
            throw NumericError("train: non-finite monitored loss at epoch " + std::to_string(epoch));
        }
        if (monitored < result.best_loss) {
            result.best_loss = monitored;
            result.best_epoch = epoch;
            result.params = current;
            stale = 0;
        } else if (++stale >= config.patience) {
            break;
        }
    }
    return result;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
    std::ostringstream out;
    out.precision(17);
    out << "epoch,train_loss,val_loss,seconds\n";
    for (const auto& r : history) {
        out << r.epoch << ',' << r.train_loss << ',';
        if (r.val_loss) out << *r.val_loss;
        out << ',' << r.seconds << '\n';
    }
    return out.str();
}

const GridCell& GridSearchReport::best() const {
    if (cells.empty()) throw ConfigError("grid search report is empty");
    return cells.front();
}

GridSearchReport grid_search(const RnnSpec& base_spec, std::span<const SequenceSample> training,
                             std::span<const SequenceSample> validation, const LossHead& head,
                             const TrainConfig& config, const GridAxis& grid) {
    if (grid.size() == 0) throw ConfigError("grid_search: empty grid");
    GridSearchReport report;
    for (const std::size_t hidden : grid.hidden_dims) {
        for (const double lr : grid.learning_rates) {
            for (const std::size_t batch : grid.batch_sizes) {
                GridCell cell;
                cell.hidden_dim = hidden;
                cell.learning_rate = lr;
                cell.batch_size = batch;
                cell.val_loss = std::numeric_limits<double>::infinity();
                const auto start = std::chrono::steady_clock::now();
                try {
                    RnnSpec spec = base_spec;
                    spec.hidden_dim = hidden;
                    TrainConfig cfg = config;
                    cfg.learning_rate = lr;
                    cfg.batch_size = batch;
                    Rng init_rng(config.seed);
                    const TrainResult r = train(init_params(spec, init_rng), spec, training, head, cfg, validation);
                    cell.epochs = r.history.size();
                    cell.best_epoch = r.best_epoch;
                    cell.val_loss = r.best_loss;
                } catch (const Error& e) {
                    cell.error = e.what();
                }
                cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                report.cells.push_back(cell);
            }
        }
    }
    std::stable_sort(report.cells.begin(), report.cells.end(), [](const GridCell& a, const GridCell& b) {
        if (a.error.empty() != b.error.empty()) return a.error.empty();
        return a.val_loss < b.val_loss;
    });
    return report;
}

}  // namespace rnnp
