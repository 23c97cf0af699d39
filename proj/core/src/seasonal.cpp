#include "rnnp/seasonal.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "rnnp/error.hpp"

namespace rnnp {

std::vector<std::string> SeasonalConfig::regressor_names() const {
    std::vector<std::string> names{"intercept"};
    if (day_of_week) {
        for (const char* d : {"mon", "tue", "wed", "thu", "fri", "sat"}) names.emplace_back(d);
    }
    if (holiday) names.emplace_back("holiday");
    for (unsigned k = 1; k <= harmonics; ++k) {
        names.push_back("sin_year_" + std::to_string(k));
        names.push_back("cos_year_" + std::to_string(k));
    }
    if (trend) names.emplace_back("trend");
    return names;
}

double NormalizationStats::to_z(double demand_mwh) const { return (std::log(demand_mwh) - mean) / std; }

NormalizationStats fit_normalization(const HourlySeries& series, std::size_t begin, std::size_t end) {
    if (begin >= end || end > series.size()) throw DataError("fit_normalization: empty or invalid window");
    const double n = static_cast<double>(end - begin);
    double mean = 0.0;
    for (std::size_t i = begin; i < end; ++i) mean += std::log(series.demand_mwh[i]);
    mean /= n;
    double var = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        const double d = std::log(series.demand_mwh[i]) - mean;
        var += d * d;
    }
    const double sd = std::sqrt(var / n);
    return {mean, sd > 1e-12 ? sd : 1.0};
}

double quantize(double value) noexcept { return std::nearbyint(value / kResidualQuantum) * kResidualQuantum; }

std::vector<double> SeasonalModel::regressors(HourIndex h) const {
    std::vector<double> row;
    row.reserve(config.regressor_count());
    row.push_back(1.0);
    if (config.day_of_week) {
        const unsigned dow = day_of_week(h);
        for (unsigned d = 0; d < 6; ++d) row.push_back(dow == d ? 1.0 : 0.0);
    }
    if (config.holiday) row.push_back(holidays.is_holiday(h) ? 1.0 : 0.0);
    if (config.harmonics > 0) {
        const double angle = 2.0 * std::numbers::pi * (day_of_year(h) - 1) /
                             static_cast<double>(days_in_year(to_civil(h).year));
        for (unsigned k = 1; k <= config.harmonics; ++k) {
            row.push_back(std::sin(k * angle));
            row.push_back(std::cos(k * angle));
        }
    }
    if (config.trend) row.push_back(static_cast<double>(day_of(h) - day_of(origin_hour)) / 365.25);
    return row;
}

double SeasonalModel::fitted(HourIndex h) const {
    const auto row = regressors(h);
    const auto& beta = coefficients[hour_of_day(h)];
    double acc = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) acc += beta[k] * row[k];
    return quantize(acc);
}

SeasonalModel fit_seasonal(const std::vector<HourIndex>& hours, const std::vector<double>& z, std::size_t begin,
                           std::size_t end, const HolidayCalendar& holidays, const SeasonalConfig& config) {
    if (hours.size() != z.size()) throw DimensionError("fit_seasonal: hours and values differ in length");
    if (begin >= end || end > hours.size()) throw DataError("fit_seasonal: invalid window");
    if (end - begin < 365 * 24) {
        throw DataError("fit_seasonal: window of " + std::to_string(end - begin) +
                        " hours is shorter than one year");
    }
    SeasonalModel model;
    model.config = config;
    model.holidays = holidays;
    model.origin_hour = hours[begin];
    const std::size_t k = config.regressor_count();

    std::array<std::vector<std::size_t>, 24> rows_by_hour;
    for (std::size_t i = begin; i < end; ++i) rows_by_hour[hour_of_day(hours[i])].push_back(i);

    for (unsigned hod = 0; hod < 24; ++hod) {
        const auto& rows = rows_by_hour[hod];
        Eigen::MatrixXd full(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(k));
        Eigen::VectorXd target(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto reg = model.regressors(hours[rows[r]]);
            for (std::size_t c = 0; c < k; ++c) full(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = reg[c];
            target(static_cast<Eigen::Index>(r)) = z[rows[r]];
        }
        std::vector<std::size_t> kept{0};
        for (std::size_t c = 1; c < k; ++c) {
            const auto col = full.col(static_cast<Eigen::Index>(c));
            if (col.maxCoeff() == col.minCoeff()) {
                model.dropped[hod].push_back(c);
            } else {
                kept.push_back(c);
            }
        }
        Eigen::MatrixXd design(full.rows(), static_cast<Eigen::Index>(kept.size()));
        for (std::size_t c = 0; c < kept.size(); ++c) {
            design.col(static_cast<Eigen::Index>(c)) = full.col(static_cast<Eigen::Index>(kept[c]));
        }
        // Complete orthogonal decomposition: QR with column pivoting, minimum-norm on rank deficiency.
        const Eigen::VectorXd beta = design.completeOrthogonalDecomposition().solve(target);
        if (!beta.allFinite()) throw NumericError("fit_seasonal: non-finite coefficients at hour " + std::to_string(hod));
        model.coefficients[hod].assign(k, 0.0);
        for (std::size_t c = 0; c < kept.size(); ++c) model.coefficients[hod][kept[c]] = beta(static_cast<Eigen::Index>(c));
    }
    return model;
}

ResidualSeries deseasonalize(const HourlySeries& series, const NormalizationStats& norm, const SeasonalModel& model) {
    ResidualSeries out;
    out.z.reserve(series.size());
    out.s.reserve(series.size());
    out.r.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double z = quantize(norm.to_z(series.demand_mwh[i]));
        const double s = model.fitted(series.hours[i]);
        out.z.push_back(z);
        out.s.push_back(s);
        out.r.push_back(z - s);
    }
    return out;
}

std::vector<double> reseasonalize(const std::vector<double>& r, const std::vector<double>& s) {
    if (r.size() != s.size()) throw DimensionError("reseasonalize: lengths differ");
    std::vector<double> out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i] + s[i];
    return out;
}

std::vector<SequenceSample> make_windows(const std::vector<Vector>& features, const std::vector<double>& residuals,
                                         std::size_t tau, std::size_t begin, std::size_t end, std::size_t stride) {
    if (features.size() != residuals.size()) throw DimensionError("make_windows: features and residuals differ");
    if (tau < 1) throw ConfigError("make_windows: tau must be >= 1");
    if (stride < 1) throw ConfigError("make_windows: stride must be >= 1");
    if (begin > end || end > features.size()) throw DataError("make_windows: invalid range");
    if (end - begin < tau) {
        throw DataError("make_windows: series of length " + std::to_string(end - begin) + " is shorter than tau = " +
                        std::to_string(tau));
    }
    std::vector<SequenceSample> windows;
    windows.reserve((end - begin - tau) / stride + 1);
    for (std::size_t first = begin; first + tau <= end; first += stride) {
        windows.push_back({std::span<const Vector>(features.data() + first, tau), residuals[first + tau - 1]});
    }
    return windows;
}

}  // namespace rnnp
