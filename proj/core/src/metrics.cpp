#include "rnnp/metrics.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <numbers>

#include "rnnp/error.hpp"

namespace rnnp {

double normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("quantile level must lie in (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double LognormalForecast::quantile(double q) const { return std::exp(mu_log + sigma_log * normal_quantile(q)); }
double LognormalForecast::mean() const { return std::exp(mu_log + 0.5 * sigma_log * sigma_log); }
double LognormalForecast::median() const { return std::exp(mu_log); }

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* who) {
    if (a != b) throw DimensionError(std::string(who) + ": forecast and realized lengths differ");
    if (a == 0) throw DataError(std::string(who) + ": empty series");
}

std::vector<double> steps(double first, double last, double step) {
    std::vector<double> out;
    const int n = static_cast<int>(std::lround((last - first) / step));
    for (int i = 0; i <= n; ++i) out.push_back(std::round((first + i * step) * 1e6) / 1e6);
    return out;
}

}  // namespace

double rmse(const std::vector<double>& forecast, const std::vector<double>& realized) {
    check_lengths(forecast.size(), realized.size(), "rmse");
    double acc = 0.0;
    for (std::size_t i = 0; i < forecast.size(); ++i) acc += (forecast[i] - realized[i]) * (forecast[i] - realized[i]);
    return std::sqrt(acc / static_cast<double>(forecast.size()));
}

double mape(const std::vector<double>& forecast, const std::vector<double>& realized) {
    check_lengths(forecast.size(), realized.size(), "mape");
    double acc = 0.0;
    for (std::size_t i = 0; i < forecast.size(); ++i) {
        if (realized[i] == 0.0) throw DataError("mape: zero realized value at index " + std::to_string(i));
        acc += std::abs((forecast[i] - realized[i]) / realized[i]);
    }
    return 100.0 * acc / static_cast<double>(forecast.size());
}

std::vector<double> default_quantiles() { return steps(0.01, 0.99, 0.01); }
std::vector<double> default_alphas() { return steps(0.90, 0.99, 0.01); }

double pinball(double q, double f, double r) noexcept { return r >= f ? q * (r - f) : (1.0 - q) * (f - r); }

double average_pinball_loss(const std::vector<LognormalForecast>& distributions, const std::vector<double>& realized,
                            const std::vector<double>& quantiles) {
    check_lengths(distributions.size(), realized.size(), "average_pinball_loss");
    if (quantiles.empty()) throw ConfigError("average_pinball_loss: empty quantile set");
    std::vector<double> z;
    z.reserve(quantiles.size());
    for (const double q : quantiles) z.push_back(normal_quantile(q));
    double total = 0.0;
    for (std::size_t t = 0; t < distributions.size(); ++t) {
        double hour = 0.0;
        for (std::size_t k = 0; k < quantiles.size(); ++k) {
            const double f = std::exp(distributions[t].mu_log + distributions[t].sigma_log * z[k]);
            hour += pinball(quantiles[k], f, realized[t]);
        }
        total += hour / static_cast<double>(quantiles.size());
    }
    return total / static_cast<double>(distributions.size());
}

std::map<double, double> ci_backtest(const std::vector<LognormalForecast>& distributions,
                                     const std::vector<double>& realized, const std::vector<double>& alphas) {
    check_lengths(distributions.size(), realized.size(), "ci_backtest");
    std::map<double, double> coverage;
    for (const double alpha : alphas) {
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("ci_backtest: alpha must lie in (0, 1)");
        const double z = normal_quantile(0.5 + 0.5 * alpha);
        std::size_t inside = 0;
        for (std::size_t t = 0; t < distributions.size(); ++t) {
            // compare on the log scale: same event, no rounding from exp
            const double lr = std::log(realized[t]);
            const auto& d = distributions[t];
            if (lr >= d.mu_log - z * d.sigma_log && lr <= d.mu_log + z * d.sigma_log) ++inside;
        }
        coverage[alpha] = static_cast<double>(inside) / static_cast<double>(distributions.size());
    }
    return coverage;
}

std::string MetricReport::to_json() const {
    nlohmann::ordered_json j;
    j["label"] = label;
    j["rmse_mwh"] = rmse_mwh;
    j["mape_pct"] = mape_pct;
    if (apl_mwh) j["apl_mwh"] = *apl_mwh;
    if (!coverage.empty()) {
        nlohmann::ordered_json c = nlohmann::ordered_json::object();
        for (const auto& [alpha, frac] : coverage) {
            char key[16];
            std::snprintf(key, sizeof key, "%.2f", alpha);
            c[key] = frac;
        }
        j["coverage"] = c;
    }
    return j.dump(2);
}

MetricReport evaluate_forecasts(const std::string& label, const std::vector<double>& point,
                                const std::vector<LognormalForecast>& distributions,
                                const std::vector<double>& realized) {
    MetricReport r;
    r.label = label;
    r.rmse_mwh = rmse(point, realized);
    r.mape_pct = mape(point, realized);
    bool spread = false;
    for (const auto& d : distributions) spread = spread || d.sigma_log > 0.0;
    if (!distributions.empty() && spread) {
        r.apl_mwh = average_pinball_loss(distributions, realized);
        r.coverage = ci_backtest(distributions, realized);
    }
    return r;
}

std::string format_metric_table(const std::vector<MetricReport>& reports) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-24s %12s %10s %12s %8s\n", "model", "RMSE [MWh]", "MAPE [%]", "APL [MWh]",
                  "cov95");
    out += line;
    for (const auto& r : reports) {
        char apl[32] = "-";
        char cov[32] = "-";
        if (r.apl_mwh) std::snprintf(apl, sizeof apl, "%.2f", *r.apl_mwh);
        for (const auto& [alpha, frac] : r.coverage) {
            if (std::abs(alpha - 0.95) < 1e-9) std::snprintf(cov, sizeof cov, "%.3f", frac);
        }
        std::snprintf(line, sizeof line, "%-24s %12.2f %10.3f %12s %8s\n", r.label.c_str(), r.rmse_mwh, r.mape_pct,
                      apl, cov);
        out += line;
    }
    return out;
}

}  // namespace rnnp
