#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "rnnp/model.hpp"
#include "rnnp/numerics.hpp"
#include "rnnp/uint128.hpp"

namespace rnnp {

/// d(loss)/d(theta) and d(loss)/d(phi) in FlatParams packing order.
struct GradientPair {
    Vector d_theta;
    Vector d_phi;

    static GradientPair zeros(const RnnSpec& spec) {
        return {Vector(spec.theta_size()), Vector(spec.phi_size())};
    }
};

/// Gradient of the loss with respect to the final output yhat(tau).
using OutputGradient = std::function<Vector(const Vector& final_output)>;
/// Loss as a function of the final output yhat(tau).
using OutputLoss = std::function<double(const Vector& final_output)>;

struct EngineResult {
    GradientPair grads;
    OpCounter counter;
    Vector output;  ///< yhat(tau) from the forward pass
};

using MacronodeCount = uint128;

struct BpttResult {
    GradientPair grads;
    OpCounter counter;
    Vector output;
    MacronodeCount macronodes = 0;  ///< macronodes actually visited
};

enum class Engine { Trrl, Rtrl, Bptt };

std::string to_string(Engine engine);
/// Accepts "trrl", "rtrl", "bptt" (case-insensitive). Throws ConfigError.
Engine parse_engine(const std::string& name);

inline constexpr std::size_t kDefaultBpttGuard = 25;

// The counters only charge gradient propagation; the forward pass that every engine
// shares is not counted. peak_floats charges, per engine:
//   RTRL: the ring of output-to-parameter Jacobians (max_lag * y * w doubles);
//   TRRL: the stored forward trace (tau * (h + y)) plus the live g-window and fold buffer;
//   BPTT: the stored forward trace plus (h + y) per active recursion frame.

/// Real-time recurrent learning: forward propagation of d yhat / d theta and d yhat / d phi.
EngineResult rtrl_gradients(const ModelParams& params, const RnnSpec& spec, std::span<const Vector> xs,
                            const OutputGradient& output_gradient);

/// Backpropagation through time on the unrolled tree, one macronode per recursion frame.
/// Throws NumericError when xs.size() exceeds `max_tau_guard`.
BpttResult bptt_gradients(const ModelParams& params, const RnnSpec& spec, std::span<const Vector> xs,
                          const OutputGradient& output_gradient, std::size_t max_tau_guard = kDefaultBpttGuard);

/// Tree-recombined recurrent learning: total gradients g_i w.r.t. yhat(tau - i) are merged
/// before being pushed further back, so each step is visited once.
EngineResult trrl_gradients(const ModelParams& params, const RnnSpec& spec, std::span<const Vector> xs,
                            const OutputGradient& output_gradient);

/// Dispatch by engine. BPTT results drop the macronode count.
EngineResult compute_gradients(Engine engine, const ModelParams& params, const RnnSpec& spec,
                               std::span<const Vector> xs, const OutputGradient& output_gradient,
                               std::size_t bptt_guard = kDefaultBpttGuard);

/// Central differences on every flat parameter. Throws NumericError on a non-finite loss.
GradientPair finite_difference_gradients(const ModelParams& params, const RnnSpec& spec,
                                         std::span<const Vector> xs, const OutputLoss& loss,
                                         double step = 1e-5);

/// N(t) = 1 + sum_{l in lags, t - l >= 1} N(t - l); returns N(tau). Throws NumericError on overflow.
MacronodeCount macronode_count(std::size_t tau, std::span<const std::size_t> lags);

/// Doubles held by the RTRL Jacobian ring: max_lag * y * w. For consecutive lags {1..p}
/// this is p * y * w.
std::uint64_t rtrl_space_floats(const RnnSpec& spec);

struct GradientDiscrepancy {
    double max_rel = 0.0;        ///< max over coordinates of |a-b| / max(|a|, |b|, 1e-12)
    double max_abs = 0.0;        ///< max over coordinates of |a-b|
    std::size_t violations = 0;  ///< coordinates failing both tolerances
    bool ok() const noexcept { return violations == 0; }
};

/// Per-coordinate comparison: a coordinate passes if rel <= rel_tol or abs <= abs_tol.
GradientDiscrepancy compare_gradients(const GradientPair& a, const GradientPair& b, double rel_tol,
                                      double abs_tol);

/// ||a - b||_inf / (1 + ||reference||_inf) over both theta and phi.
double scaled_max_distance(const GradientPair& a, const GradientPair& reference);

}  // namespace rnnp
