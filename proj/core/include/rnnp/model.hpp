#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rnnp/numerics.hpp"

namespace rnnp {

enum class Activation { Sigmoid };

/// Architecture of a shallow Jordan network with an arbitrary set of output lags.
///
///   a(t) = b + U x(t) + sum_i W_i yhat(t - lag_i)
///   h(t) = sigmoid(a(t))
///   yhat(t) = c + V h(t)
///
/// Feedbacks for steps t <= 0 are zero.
struct RnnSpec {
    std::vector<std::size_t> lags;  ///< strictly increasing, all >= 1
    std::size_t input_dim = 1;
    std::size_t hidden_dim = 1;
    std::size_t output_dim = 1;
    Activation activation = Activation::Sigmoid;

    /// Throws ConfigError when the spec is not usable.
    void validate() const;

    std::size_t order() const noexcept { return lags.size(); }
    std::size_t max_lag() const noexcept { return lags.empty() ? 0 : lags.back(); }
    /// |theta| = (x + p*y + 1) * h
    std::size_t theta_size() const noexcept { return (input_dim + order() * output_dim + 1) * hidden_dim; }
    /// |phi| = (h + 1) * y
    std::size_t phi_size() const noexcept { return (hidden_dim + 1) * output_dim; }
    /// w = |theta| + |phi|
    std::size_t weight_count() const noexcept { return theta_size() + phi_size(); }

    friend bool operator==(const RnnSpec&, const RnnSpec&) = default;
};

/// Formats a lag set as "{1,2,24}".
std::string format_lags(std::span<const std::size_t> lags);
/// Parses "1,2,24" or "{1,2,24}". Throws ConfigError.
std::vector<std::size_t> parse_lags(const std::string& text);

struct ModelParams {
    Matrix U;               ///< h x x
    std::vector<Matrix> W;  ///< p matrices h x y, in lag order
    Vector b;               ///< h
    Matrix V;               ///< y x h
    Vector c;               ///< y

    static ModelParams zeros(const RnnSpec& spec);
    /// Throws DimensionError when shapes disagree with `spec`.
    void check_shape(const RnnSpec& spec) const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Flat parameter vectors. Packing order:
///   theta = [U row-major | W_1 row-major | ... | W_p row-major | b]
///   phi   = [V row-major | c]
struct FlatParams {
    Vector theta;
    Vector phi;

    friend bool operator==(const FlatParams&, const FlatParams&) = default;
};

FlatParams pack(const ModelParams& params);
/// Throws DimensionError on length mismatch.
ModelParams unpack(const RnnSpec& spec, const FlatParams& flat);

// Index map into FlatParams.
std::size_t theta_index_U(const RnnSpec& spec, std::size_t row, std::size_t col) noexcept;
std::size_t theta_index_W(const RnnSpec& spec, std::size_t lag_idx, std::size_t row, std::size_t col) noexcept;
std::size_t theta_index_b(const RnnSpec& spec, std::size_t row) noexcept;
std::size_t phi_index_V(const RnnSpec& spec, std::size_t row, std::size_t col) noexcept;
std::size_t phi_index_c(const RnnSpec& spec, std::size_t row) noexcept;

/// Glorot-uniform weights (r = sqrt(6 / (fan_in + fan_out)) per matrix), zero biases.
ModelParams init_params(const RnnSpec& spec, Rng& rng);

struct StepOutput {
    Vector a;
    Vector h;
    Vector y;
};

/// Returns yhat(t - lag); must yield the zero vector for step indices <= 0.
using PastOutputs = std::function<const Vector&(std::size_t lag)>;

StepOutput forward_step(const ModelParams& params, const RnnSpec& spec, const Vector& x_t,
                        const PastOutputs& past_outputs);

/// Per-step record of a processed sequence; index k holds step t = k + 1.
struct ForwardTrace {
    std::vector<Vector> a;
    std::vector<Vector> h;
    std::vector<Vector> y;

    std::size_t length() const noexcept { return y.size(); }
    const Vector& final_output() const { return y.back(); }
};

/// Closed-loop pass over xs (length tau >= 1): the model's own outputs feed back.
ForwardTrace forward_sequence(const ModelParams& params, const RnnSpec& spec, std::span<const Vector> xs);

/// Final output only, without keeping the trace.
Vector predict_final(const ModelParams& params, const RnnSpec& spec, std::span<const Vector> xs);

}  // namespace rnnp
