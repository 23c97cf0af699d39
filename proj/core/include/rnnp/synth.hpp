#pragma once

#include <cstdint>
#include <vector>

#include "rnnp/calendar.hpp"
#include "rnnp/series.hpp"

namespace rnnp {

/// Ground-truth generator. Log demand is
///   log(base) + trend + daily + weekly + yearly harmonics + holiday + arx + noise
/// where arx(t) = phi1 arx(t-1) + phi24 arx(t-24) + gamma * anomaly(t) is driven by the
/// temperature anomaly, and noise ~ N(0, noise_sigma) i.i.d. Every term except the noise
/// is a deterministic function of the calendar and the recorded temperatures.
struct SynthConfig {
    int start_year = 2007;
    unsigned years = 5;
    double base_mwh = 15000.0;
    double trend_per_year = 0.01;
    double daily_amplitude = 0.15;   ///< first daily harmonic, peak late afternoon
    double daily_amplitude2 = 0.05;  ///< second daily harmonic
    double saturday_effect = -0.06;
    double sunday_effect = -0.10;
    double yearly_amplitude = 0.05;   ///< first yearly harmonic
    double yearly_amplitude2 = 0.04;  ///< second yearly harmonic
    double holiday_effect = -0.08;
    double temp_mean_f = 50.0;
    double temp_yearly_f = 20.0;
    double temp_daily_f = 8.0;
    double anomaly_phi = 0.5;
    double anomaly_sd_f = 3.0;  ///< innovation sd of the AR(1) anomaly
    double wetbulb_offset_f = 5.0;
    double wetbulb_sd_f = 1.0;
    double ar_phi1 = 0.5;
    double ar_phi24 = 0.3;
    double ar_gamma = 0.006;  ///< log-demand response per degree F of anomaly
    double noise_sigma = 0.02;
    std::uint64_t seed = 7;

    /// Throws ConfigError.
    void validate() const;
};

struct SynthResult {
    HourlySeries series;
    std::vector<double> signal_log;  ///< noise-free log demand
    std::vector<double> noise;       ///< log-scale noise draws
    HolidayCalendar holidays;        ///< calendar used by the holiday term
};

SynthResult synth_generate(const SynthConfig& config);

}  // namespace rnnp
