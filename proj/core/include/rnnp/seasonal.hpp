#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "rnnp/calendar.hpp"
#include "rnnp/numerics.hpp"
#include "rnnp/series.hpp"
#include "rnnp/training.hpp"

namespace rnnp {

/// Calendar regressors of the per-hour GLM. The intercept is always present.
struct SeasonalConfig {
    bool day_of_week = true;  ///< Monday..Saturday dummies
    bool holiday = true;
    unsigned harmonics = 2;   ///< yearly sin/cos pairs 1..harmonics
    bool trend = true;        ///< linear in years since the window start

    std::size_t regressor_count() const noexcept {
        return 1 + (day_of_week ? 6 : 0) + (holiday ? 1 : 0) + 2 * harmonics + (trend ? 1 : 0);
    }
    std::vector<std::string> regressor_names() const;
};

/// z-score of log demand.
struct NormalizationStats {
    double mean = 0.0;
    double std = 1.0;

    double to_z(double demand_mwh) const;
    double log_from_z(double z) const noexcept { return mean + std * z; }
};

/// Statistics of log demand over rows [begin, end).
NormalizationStats fit_normalization(const HourlySeries& series, std::size_t begin, std::size_t end);

/// Grid on which normalized values are stored: 2^-40. Values on this grid with magnitude
/// below 2^12 add and subtract exactly, which makes r + s == z hold bit for bit.
inline constexpr double kResidualQuantum = 0x1.0p-40;
double quantize(double value) noexcept;

struct SeasonalModel {
    SeasonalConfig config;
    HolidayCalendar holidays;
    HourIndex origin_hour = 0;  ///< first hour of the fitting window, trend origin
    /// Coefficients per hour of day over the full regressor list; dropped columns hold 0.
    std::array<std::vector<double>, 24> coefficients;
    /// Regressors dropped per hour because they were constant on the window.
    std::array<std::vector<std::size_t>, 24> dropped;

    std::vector<double> regressors(HourIndex h) const;
    /// Seasonal fit on the z scale, quantized.
    double fitted(HourIndex h) const;
};

/// Per-hour OLS of `z` on the calendar regressors over rows [begin, end).
/// Throws DataError when the window is shorter than 365 days.
SeasonalModel fit_seasonal(const std::vector<HourIndex>& hours, const std::vector<double>& z, std::size_t begin,
                           std::size_t end, const HolidayCalendar& holidays, const SeasonalConfig& config = {});

/// z = quantized normalized log demand, s = seasonal fit, r = z - s (exact).
struct ResidualSeries {
    std::vector<double> z;
    std::vector<double> s;
    std::vector<double> r;
};

ResidualSeries deseasonalize(const HourlySeries& series, const NormalizationStats& norm, const SeasonalModel& model);
/// r + s elementwise.
std::vector<double> reseasonalize(const std::vector<double>& r, const std::vector<double>& s);

/// Overlapping windows of `tau` feature vectors inside rows [begin, end); each target is the
/// residual at the window's last row. Count = (end - begin - tau) / stride + 1.
std::vector<SequenceSample> make_windows(const std::vector<Vector>& features, const std::vector<double>& residuals,
                                         std::size_t tau, std::size_t begin, std::size_t end,
                                         std::size_t stride = 1);

}  // namespace rnnp
