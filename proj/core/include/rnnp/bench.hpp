#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rnnp/gradients.hpp"
#include "rnnp/model.hpp"

namespace rnnp {

struct BenchRecord {
    Engine engine = Engine::Trrl;
    std::vector<std::size_t> lags;
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    std::size_t y_dim = 0;
    std::size_t tau = 0;
    std::uint64_t mac_count = 0;
    std::uint64_t peak_floats = 0;
    double wall_seconds = 0.0;
    std::optional<uint128> macronodes;  ///< BPTT only

    friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

/// One gradient evaluation on a model and input sequence drawn from `seed`.
BenchRecord run_gradient_bench(Engine engine, const RnnSpec& spec, std::size_t tau, std::uint64_t seed,
                               std::size_t bptt_guard = kDefaultBpttGuard);

/// One record per tau. BPTT beyond the guard throws NumericError.
std::vector<BenchRecord> sweep_tau(Engine engine, const RnnSpec& spec, const std::vector<std::size_t>& taus,
                                   std::uint64_t seed, std::size_t bptt_guard = kDefaultBpttGuard);

struct NeuronRow {
    std::vector<std::size_t> lags;
    std::size_t hidden_dim = 0;
    BenchRecord trrl;
    BenchRecord rtrl;
    double gain() const noexcept;  ///< RTRL / TRRL mac_count
};

/// The lag-set by hidden-size grid of both engines at fixed tau and y.
std::vector<NeuronRow> sweep_neurons(const std::vector<std::vector<std::size_t>>& lag_sets,
                                     const std::vector<std::size_t>& hidden_dims, std::size_t tau, std::size_t y_dim,
                                     std::size_t input_dim, std::uint64_t seed);

/// Aligned table with the gain factor and its 4p (p * y^2) reference.
std::string format_neuron_table(const std::vector<NeuronRow>& rows);

/// engine,lag_set,input_dim,hidden_dim,y_dim,tau,mac_count,peak_floats,wall_seconds,macronodes
/// lag_set is written as {1;2;24} to stay comma-free.
std::string bench_csv(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> parse_bench_csv(const std::string& text);
/// Overwrites `path`.
void emit_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Throws ConfigError for fewer than 2 points.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rnnp
