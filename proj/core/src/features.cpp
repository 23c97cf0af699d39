#include "rnnp/features.hpp"

#include <cmath>
#include <numbers>

#include "rnnp/error.hpp"

namespace rnnp {

FeatureEncoder FeatureEncoder::fit(const HourlySeries& series, std::size_t begin, std::size_t end,
                                   HolidayCalendar holidays) {
    if (begin >= end || end > series.size()) throw DataError("FeatureEncoder::fit: empty or invalid window");
    FeatureEncoder enc;
    enc.holidays = std::move(holidays);
    const std::vector<double>* cols[2] = {&series.drybulb_f, &series.wetbulb_f};
    const double n = static_cast<double>(end - begin);
    for (int c = 0; c < 2; ++c) {
        double mean = 0.0;
        for (std::size_t i = begin; i < end; ++i) mean += (*cols[c])[i];
        mean /= n;
        double var = 0.0;
        for (std::size_t i = begin; i < end; ++i) var += ((*cols[c])[i] - mean) * ((*cols[c])[i] - mean);
        const double sd = std::sqrt(var / n);
        enc.temp_mean[c] = mean;
        enc.temp_std[c] = sd > 1e-12 ? sd : 1.0;  // constant channel: centre only
    }
    return enc;
}

Vector FeatureEncoder::encode(HourIndex h, double drybulb_f, double wetbulb_f) const {
    Vector x(kFeatureDim);
    const double two_pi = 2.0 * std::numbers::pi;
    const double hod = two_pi * hour_of_day(h) / 24.0;
    x[0] = std::sin(hod);
    x[1] = std::cos(hod);
    const int year = to_civil(h).year;
    const double doy = two_pi * (day_of_year(h) - 1) / static_cast<double>(days_in_year(year));
    x[2] = std::sin(doy);
    x[3] = std::cos(doy);
    const unsigned dow = day_of_week(h);
    if (dow < 6) x[4 + dow] = 1.0;
    x[10] = holidays.is_holiday(h) ? 1.0 : 0.0;
    x[11] = (drybulb_f - temp_mean[0]) / temp_std[0];
    x[12] = (wetbulb_f - temp_mean[1]) / temp_std[1];
    return x;
}

std::vector<Vector> FeatureEncoder::encode_all(const HourlySeries& series) const {
    std::vector<Vector> out;
    out.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        out.push_back(encode(series.hours[i], series.drybulb_f[i], series.wetbulb_f[i]));
    }
    return out;
}

const std::array<std::string, kFeatureDim>& FeatureEncoder::names() {
    static const std::array<std::string, kFeatureDim> n{
        "sin_hour", "cos_hour", "sin_doy", "cos_doy", "mon", "tue", "wed",
        "thu",      "fri",      "sat",     "holiday", "drybulb_z", "wetbulb_z"};
    return n;
}

}  // namespace rnnp
