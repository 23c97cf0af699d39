#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "rnnp/calendar.hpp"
#include "rnnp/numerics.hpp"
#include "rnnp/series.hpp"

namespace rnnp {

/// Layout of the 13 exogenous inputs:
///   0-1  sin/cos hour of day (period 24)
///   2-3  sin/cos day of year (period = days in that year)
///   4-9  Monday..Saturday dummies (Sunday is the all-zero baseline)
///   10   holiday dummy
///   11   dry-bulb temperature, z-scored
///   12   wet-bulb temperature, z-scored
inline constexpr std::size_t kFeatureDim = 13;

struct FeatureEncoder {
    HolidayCalendar holidays;
    std::array<double, 2> temp_mean{0.0, 0.0};
    std::array<double, 2> temp_std{1.0, 1.0};

    /// Temperature statistics from rows [begin, end) of `series`.
    static FeatureEncoder fit(const HourlySeries& series, std::size_t begin, std::size_t end,
                              HolidayCalendar holidays);

    Vector encode(HourIndex h, double drybulb_f, double wetbulb_f) const;
    /// One feature vector per row.
    std::vector<Vector> encode_all(const HourlySeries& series) const;

    static const std::array<std::string, kFeatureDim>& names();
};

}  // namespace rnnp
