#pragma once

#include <string>
#include <vector>

#include "rnnp/forecast.hpp"
#include "rnnp/metrics.hpp"
#include "rnnp/training.hpp"

namespace rnnp {

struct WalkForwardSplit {
    int train_first_year = 0;
    int train_last_year = 0;
    int eval_year = 0;
};

/// The first split is the model-selection split (grid search validates on its eval year);
/// the rest are rolling test splits, each training on the four years before its eval year.
struct WalkForwardPlan {
    std::vector<WalkForwardSplit> splits;

    /// Years [first_year, last_year] with `train_years`-year training windows. Throws
    /// ConfigError when fewer than train_years + 1 years are available.
    static WalkForwardPlan rolling(int first_year, int last_year, int train_years = 4);
};

struct WalkForwardRow {
    std::string lag_set;
    int year = 0;
    std::size_t hidden_dim = 0;
    double learning_rate = 0.0;
    std::size_t batch_size = 0;
    std::size_t epochs = 0;
    MetricReport metrics;
};

struct WalkForwardReport {
    std::vector<GridSearchReport> grids;  ///< one per lag set, in input order
    std::vector<WalkForwardRow> rows;     ///< one per (lag set, test year)

    std::string to_table() const;
    std::string to_json() const;
};

/// Grid search on the first split per lag set, then retrain with the frozen best cell on every
/// test split (for best_epoch epochs, no validation) and forecast its eval year. A single-split
/// plan tests on the selection year itself.
WalkForwardReport run_walk_forward(const HourlySeries& series, const WalkForwardPlan& plan,
                                   const std::vector<std::vector<std::size_t>>& lag_sets, const GridAxis& grid,
                                   const HolidayCalendar& holidays, const PipelineConfig& base);

}  // namespace rnnp
