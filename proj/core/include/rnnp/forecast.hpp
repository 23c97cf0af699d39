#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rnnp/calendar.hpp"
#include "rnnp/checkpoint.hpp"
#include "rnnp/features.hpp"
#include "rnnp/metrics.hpp"
#include "rnnp/model.hpp"
#include "rnnp/seasonal.hpp"
#include "rnnp/series.hpp"
#include "rnnp/training.hpp"

namespace rnnp {

/// Everything needed to turn exogenous data into forecasts.
struct PipelineModel {
    RnnSpec spec;
    ModelParams params;
    LossHead head;
    std::size_t tau = 49;
    NormalizationStats norm;
    FeatureEncoder encoder;
    SeasonalModel seasonal;
};

struct PipelineConfig {
    std::vector<std::size_t> lags{1, 2, 24};
    std::size_t hidden_dim = 10;
    LossHead head{LossKind::GaussianNll};
    std::size_t tau = 49;
    std::size_t stride = 1;  ///< window stride for training windows
    SeasonalConfig seasonal;
    TrainConfig train;
};

/// Row ranges [begin, end) into the series.
struct RowRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const noexcept { return end - begin; }
};

/// Rows of calendar years [first_year, last_year] within `series`. Throws DataError when
/// the series does not cover them.
RowRange year_rows(const HourlySeries& series, int first_year, int last_year);

/// Pipeline state before network training: statistics and GLM fitted on `train`, features
/// and residuals for every row of the series. Windows point into `features`.
struct PreparedData {
    PipelineModel model;  ///< params left at zero
    std::vector<Vector> features;
    ResidualSeries residuals;

    std::vector<SequenceSample> training_windows(RowRange train, std::size_t stride) const;
    /// Windows ending inside `range`, looking back tau - 1 rows before it.
    std::vector<SequenceSample> evaluation_windows(RowRange range) const;
};

PreparedData prepare_pipeline(const HourlySeries& series, RowRange train, const HolidayCalendar& holidays,
                              const PipelineConfig& config);

struct PipelineFit {
    PipelineModel model;
    TrainResult training;
    std::size_t training_windows = 0;
    std::size_t validation_windows = 0;
};

/// Fits normalization, temperature scaling and the seasonal GLM on `train`, then trains the
/// network on the residual windows inside `train`. Validation windows end inside
/// `validation` and may look back into earlier rows.
PipelineFit fit_pipeline(const HourlySeries& series, RowRange train, std::optional<RowRange> validation,
                         const HolidayCalendar& holidays, const PipelineConfig& config,
                         const EpochCallback& on_epoch = {});

struct ForecastPoint {
    HourIndex hour = 0;
    double seasonal = 0.0;  ///< s_t, z scale
    double mu = 0.0;        ///< network mean, z scale
    double sigma = 0.0;     ///< network sd after the positivity map (0 for point heads)
    LognormalForecast distribution;
    double point = 0.0;     ///< lognormal mean (probabilistic) or exp(mu_log) (point)
};

/// Closed-loop forecasts for rows [begin, end) of `exogenous`; each hour uses the tau-row
/// window ending at it, with zero feedbacks at the window start. Demand is not read.
/// Throws DataError when fewer than tau - 1 rows precede `begin`.
std::vector<ForecastPoint> forecast_range(const PipelineModel& model, const HourlySeries& exogenous,
                                          std::size_t begin, std::size_t end);
/// All hours of `year`.
std::vector<ForecastPoint> forecast_year(const PipelineModel& model, const HourlySeries& exogenous, int year);

/// timestamp,point,mu_log,sigma_log,q05,q95
std::string forecast_csv(const std::vector<ForecastPoint>& points);
/// Reads the columns back (seasonal/mu/sigma are not stored and come back as 0).
std::vector<ForecastPoint> parse_forecast_csv(const std::string& text, const std::string& source = "<memory>");

Checkpoint to_checkpoint(const PipelineModel& model);
PipelineModel from_checkpoint(const Checkpoint& checkpoint);
void save_pipeline(const PipelineModel& model, const std::filesystem::path& path);
PipelineModel load_pipeline(const std::filesystem::path& path);

}  // namespace rnnp
