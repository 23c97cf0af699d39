#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rnnp/forecast.hpp"
#include "rnnp/synth.hpp"
#include "rnnp/training.hpp"

namespace rnnp::cli {

struct SplitConfig {
    int train_first_year = 2007;
    int train_last_year = 2009;
    std::optional<int> validation_year = 2010;
};

struct WalkForwardConfig {
    int first_year = 2007;
    int last_year = 2011;
    int train_years = 4;
    std::vector<std::vector<std::size_t>> lag_sets{{1}, {1, 2}, {1, 2, 24}};
};

struct BenchConfig {
    std::vector<Engine> engines{Engine::Trrl, Engine::Rtrl, Engine::Bptt};
    std::vector<std::size_t> lags{1, 2};
    std::size_t input_dim = 13;
    std::size_t hidden_dim = 15;
    std::size_t y_dim = 2;
    std::size_t tau_min = 3;
    std::size_t tau_max = 48;
    std::size_t bptt_tau_max = 20;
    std::vector<std::vector<std::size_t>> table_lag_sets{{1}, {1, 2}, {1, 2, 24}};
    std::vector<std::size_t> table_hidden{5, 10, 15};
    std::size_t table_tau = 49;
};

/// Every key is optional; unknown keys are rejected. Schema: docs/config.md.
struct CliConfig {
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> holidays;
    SynthConfig synth;
    PipelineConfig pipeline;
    SplitConfig split;
    GridAxis grid;
    WalkForwardConfig walk_forward;
    BenchConfig bench;
};

/// Throws ConfigError on malformed JSON, wrong types, bad values and unknown keys.
CliConfig parse_config(const std::string& json_text);
CliConfig load_config(const std::filesystem::path& path);

/// Sets the root seed and propagates it to the generator and the trainer.
void apply_seed(CliConfig& config, std::uint64_t seed);

}  // namespace rnnp::cli
