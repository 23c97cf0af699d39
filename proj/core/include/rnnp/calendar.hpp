#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace rnnp {

/// Local civil hour, counted from 1970-01-01 00:00. No time zone or DST shifting:
/// the series is strictly hourly in its own civil clock.
using HourIndex = std::int64_t;
/// Civil day, counted from 1970-01-01.
using DayIndex = std::int64_t;

struct CivilHour {
    int year = 1970;
    unsigned month = 1;  ///< 1..12
    unsigned day = 1;    ///< 1..31
    unsigned hour = 0;   ///< 0..23
};

HourIndex to_hour_index(const CivilHour& c);
CivilHour to_civil(HourIndex h);
DayIndex day_of(HourIndex h) noexcept;
HourIndex first_hour_of_year(int year);

/// 0 = Monday .. 6 = Sunday
unsigned day_of_week(HourIndex h);
/// 1-based day of the year
unsigned day_of_year(HourIndex h);
unsigned days_in_year(int year);
unsigned hour_of_day(HourIndex h) noexcept;

/// Accepts "YYYY-MM-DDTHH", "YYYY-MM-DDTHH:MM" and "YYYY-MM-DD HH:MM:SS" (minutes and
/// seconds must be zero). Throws DataError.
HourIndex parse_timestamp(const std::string& text);
/// "YYYY-MM-DDTHH:00"
std::string format_timestamp(HourIndex h);

/// "YYYY-MM-DD". Throws DataError.
DayIndex parse_date(const std::string& text);
std::string format_date(DayIndex d);

class HolidayCalendar {
public:
    HolidayCalendar() = default;
    explicit HolidayCalendar(std::set<DayIndex> days) : days_(std::move(days)) {}

    /// US federal holidays on their actual dates (no observed-day shifting).
    static HolidayCalendar us_federal(int first_year, int last_year);
    /// One ISO date per line; blank lines and lines starting with '#' are skipped.
    static HolidayCalendar load(const std::filesystem::path& path);

    bool contains(DayIndex d) const { return days_.count(d) > 0; }
    bool is_holiday(HourIndex h) const { return contains(day_of(h)); }
    const std::set<DayIndex>& days() const noexcept { return days_; }

private:
    std::set<DayIndex> days_;
};

}  // namespace rnnp
