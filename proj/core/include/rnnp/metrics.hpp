#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rnnp {

/// Lognormal forecast for one hour: log demand ~ N(mu_log, sigma_log^2).
struct LognormalForecast {
    double mu_log = 0.0;
    double sigma_log = 0.0;  ///< 0 gives a point mass at exp(mu_log)

    double quantile(double q) const;
    double mean() const;
    double median() const;
};

/// Standard normal quantile. Throws ConfigError outside (0, 1).
double normal_quantile(double q);

double rmse(const std::vector<double>& forecast, const std::vector<double>& realized);
/// Percent. Throws DataError on a zero realized value.
double mape(const std::vector<double>& forecast, const std::vector<double>& realized);

/// 0.01, 0.02, ..., 0.99
std::vector<double> default_quantiles();
/// 0.90, 0.91, ..., 0.99
std::vector<double> default_alphas();

double pinball(double q, double forecast_quantile, double realized) noexcept;

/// Mean over hours of the mean over quantiles of the pinball loss, physical scale.
double average_pinball_loss(const std::vector<LognormalForecast>& distributions, const std::vector<double>& realized,
                            const std::vector<double>& quantiles = default_quantiles());

/// Fraction of hours inside the central alpha-interval, per alpha.
std::map<double, double> ci_backtest(const std::vector<LognormalForecast>& distributions,
                                     const std::vector<double>& realized,
                                     const std::vector<double>& alphas = default_alphas());

struct MetricReport {
    std::string label;
    double rmse_mwh = 0.0;
    double mape_pct = 0.0;
    std::optional<double> apl_mwh;
    std::map<double, double> coverage;

    /// Flat JSON object; see docs/formats.md.
    std::string to_json() const;
};

/// Point metrics always; APL and coverage when `distributions` is non-empty and has spread.
MetricReport evaluate_forecasts(const std::string& label, const std::vector<double>& point,
                                const std::vector<LognormalForecast>& distributions,
                                const std::vector<double>& realized);

/// Aligned text table, one row per report.
std::string format_metric_table(const std::vector<MetricReport>& reports);

}  // namespace rnnp
