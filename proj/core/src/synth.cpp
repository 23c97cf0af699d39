#include "rnnp/synth.hpp"

#include <cmath>
#include <numbers>

#include "rnnp/error.hpp"
#include "rnnp/numerics.hpp"

namespace rnnp {

void SynthConfig::validate() const {
    if (years < 1) throw ConfigError("synth: years must be >= 1");
    if (!(base_mwh > 0.0)) throw ConfigError("synth: base_mwh must be > 0");
    if (!(noise_sigma >= 0.0)) throw ConfigError("synth: noise_sigma must be >= 0");
    if (!(anomaly_sd_f >= 0.0) || !(wetbulb_sd_f >= 0.0)) throw ConfigError("synth: standard deviations must be >= 0");
    if (!(std::abs(anomaly_phi) < 1.0)) throw ConfigError("synth: |anomaly_phi| must be < 1");
    if (!(std::abs(ar_phi1) + std::abs(ar_phi24) < 1.0)) {
        throw ConfigError("synth: |ar_phi1| + |ar_phi24| must be < 1 for a stable AR component");
    }
}

SynthResult synth_generate(const SynthConfig& config) {
    config.validate();
    const double two_pi = 2.0 * std::numbers::pi;
    SynthResult out;
    out.holidays = HolidayCalendar::us_federal(config.start_year, config.start_year + static_cast<int>(config.years));
    const HourIndex first = first_hour_of_year(config.start_year);
    const HourIndex last = first_hour_of_year(config.start_year + static_cast<int>(config.years));
    const std::size_t n = static_cast<std::size_t>(last - first);

    Rng rng(config.seed);
    Rng temp_rng = rng.split();
    Rng noise_rng = rng.split();

    std::vector<double> arx(n, 0.0);
    double anomaly = 0.0;
    out.signal_log.reserve(n);
    out.noise.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const HourIndex h = first + static_cast<HourIndex>(i);
        const double hod = two_pi * hour_of_day(h) / 24.0;
        const double doy = two_pi * (day_of_year(h) - 1) / static_cast<double>(days_in_year(to_civil(h).year));
        const double years_elapsed = static_cast<double>(i) / (24.0 * 365.25);

        anomaly = config.anomaly_phi * anomaly + config.anomaly_sd_f * temp_rng.normal();
        // coldest mid-January, warmest mid-July; daily peak mid-afternoon
        const double dry = config.temp_mean_f - config.temp_yearly_f * std::cos(doy - two_pi * 15.0 / 365.0) -
                           config.temp_daily_f * std::cos(hod - two_pi * 15.0 / 24.0) + anomaly;
        const double wet = dry - config.wetbulb_offset_f + config.wetbulb_sd_f * temp_rng.normal();

        double a = config.ar_gamma * anomaly;
        if (i >= 1) a += config.ar_phi1 * arx[i - 1];
        if (i >= 24) a += config.ar_phi24 * arx[i - 24];
        arx[i] = a;

        const unsigned dow = day_of_week(h);
        double log_d = std::log(config.base_mwh) + config.trend_per_year * years_elapsed;
        log_d += config.daily_amplitude * std::cos(hod - two_pi * 17.0 / 24.0);
        log_d += config.daily_amplitude2 * std::cos(2.0 * hod - two_pi * 9.0 / 24.0);
        if (dow == 5) log_d += config.saturday_effect;
        if (dow == 6) log_d += config.sunday_effect;
        log_d += config.yearly_amplitude * std::cos(doy) + config.yearly_amplitude2 * std::cos(2.0 * doy + 0.5);
        if (out.holidays.is_holiday(h)) log_d += config.holiday_effect;
        log_d += a;

        const double eps = config.noise_sigma * noise_rng.normal();
        out.signal_log.push_back(log_d);
        out.noise.push_back(eps);
        out.series.push_back(h, std::exp(log_d + eps), dry, wet);
    }
    return out;
}

}  // namespace rnnp
