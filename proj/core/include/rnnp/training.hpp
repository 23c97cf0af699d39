#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rnnp/gradients.hpp"
#include "rnnp/model.hpp"
#include "rnnp/numerics.hpp"

namespace rnnp {

enum class LossKind { PointMse, GaussianNll };

std::string to_string(LossKind kind);
/// Accepts "mse" / "point" and "nll" / "gaussian". Throws ConfigError.
LossKind parse_loss_kind(const std::string& name);

struct LossHead {
    LossKind kind = LossKind::PointMse;
    double sigma_floor = 1e-4;  ///< GaussianNll only

    std::size_t output_dim() const noexcept { return kind == LossKind::PointMse ? 1 : 2; }
    /// Throws ConfigError unless y_dim matches the head.
    void check(const RnnSpec& spec) const;
};

struct LossValue {
    double loss = 0.0;
    Vector grad;  ///< d loss / d yhat
};

/// (yhat - target)^2
LossValue mse_loss(const Vector& yhat, double target);
/// mu = yhat[0], sigma = softplus(yhat[1]) + floor;
/// loss = 0.5 log(2 pi sigma^2) + (r - mu)^2 / (2 sigma^2)
LossValue gaussian_nll_loss(const Vector& yhat, double target, const LossHead& head);
LossValue evaluate_loss(const LossHead& head, const Vector& yhat, double target);

/// sigma of the Gaussian head for a raw network output.
double head_sigma(const Vector& yhat, const LossHead& head);

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 100;
    std::size_t patience = 100;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 1;
    Engine engine = Engine::Trrl;
    std::size_t bptt_guard = kDefaultBpttGuard;

    void validate() const;
};

struct AdamState {
    Vector m;  ///< first moment, theta then phi
    Vector v;  ///< second moment
    std::uint64_t step = 0;

    static AdamState zeros(const RnnSpec& spec);
};

/// One bias-corrected Adam update in place. Throws NumericError on a non-finite gradient.
void adam_step(FlatParams& params, const GradientPair& grads, AdamState& state, const TrainConfig& config);

/// One many-to-one training example: inputs x(1..tau) and the target at tau.
struct SequenceSample {
    std::span<const Vector> inputs;
    double target = 0.0;
};

struct EpochRecord {
    std::size_t epoch = 0;  ///< 1-based
    double train_loss = 0.0;
    std::optional<double> val_loss;
    double seconds = 0.0;
};

struct TrainResult {
    ModelParams params;  ///< best by the monitored loss
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;
    double best_loss = 0.0;
};

/// Mean loss of the model over the samples (closed loop, many-to-one).
double mean_loss(const ModelParams& params, const RnnSpec& spec, std::span<const SequenceSample> samples,
                 const LossHead& head);

/// Progress callback, invoked after every epoch.
using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam with early stopping. The monitored loss is the validation loss when
/// `validation` is non-empty, the running mean training loss otherwise.
TrainResult train(const ModelParams& initial, const RnnSpec& spec, std::span<const SequenceSample> training,
                  const LossHead& head, const TrainConfig& config,
                  std::span<const SequenceSample> validation = {}, const EpochCallback& on_epoch = {});

/// CSV: epoch,train_loss,val_loss,seconds
std::string history_csv(const std::vector<EpochRecord>& history);

struct GridAxis {
    std::vector<std::size_t> hidden_dims{5, 10, 15};
    std::vector<double> learning_rates{1e-4, 5e-4, 1e-3};
    std::vector<std::size_t> batch_sizes{32, 64};

    std::size_t size() const noexcept { return hidden_dims.size() * learning_rates.size() * batch_sizes.size(); }
};

struct GridCell {
    std::size_t hidden_dim = 0;
    double learning_rate = 0.0;
    std::size_t batch_size = 0;
    double val_loss = 0.0;  ///< +inf when the cell failed
    std::size_t epochs = 0;
    std::size_t best_epoch = 0;
    double seconds = 0.0;
    std::string error;  ///< empty on success
};

struct GridSearchReport {
    std::vector<GridCell> cells;  ///< sorted by val_loss, failures last
    const GridCell& best() const;
};

/// Trains every (hidden, lr, batch) combination from `base_spec` with hidden_dim replaced,
/// initialized from `config.seed`. Cell failures are recorded in the report, not thrown.
GridSearchReport grid_search(const RnnSpec& base_spec, std::span<const SequenceSample> training,
                             std::span<const SequenceSample> validation, const LossHead& head,
                             const TrainConfig& config, const GridAxis& grid);

}  // namespace rnnp
