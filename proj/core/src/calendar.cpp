#include "rnnp/calendar.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "rnnp/error.hpp"

namespace rnnp {

namespace chr = std::chrono;

namespace {

chr::year_month_day ymd_of(DayIndex d) { return chr::year_month_day{chr::sys_days{chr::days{d}}}; }

DayIndex index_of(const chr::year_month_day& ymd) { return chr::sys_days{ymd}.time_since_epoch().count(); }

DayIndex floor_div(std::int64_t a, std::int64_t b) noexcept { return a >= 0 ? a / b : -((-a + b - 1) / b); }

bool parse_uint(const std::string& text, std::size_t pos, std::size_t len, unsigned& out) {
    if (pos + len > text.size()) return false;
    const char* first = text.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + len, out);
    return ec == std::errc{} && ptr == first + len;
}

DayIndex parse_date_prefix(const std::string& text) {
    unsigned y = 0, m = 0, d = 0;
    if (text.size() < 10 || text[4] != '-' || text[7] != '-' || !parse_uint(text, 0, 4, y) ||
        !parse_uint(text, 5, 2, m) || !parse_uint(text, 8, 2, d)) {
        throw DataError("cannot parse date in '" + text + "'");
    }
    const chr::year_month_day ymd{chr::year{static_cast<int>(y)}, chr::month{m}, chr::day{d}};
    if (!ymd.ok()) throw DataError("invalid calendar date in '" + text + "'");
    return index_of(ymd);
}

}  // namespace

HourIndex to_hour_index(const CivilHour& c) {
    const chr::year_month_day ymd{chr::year{c.year}, chr::month{c.month}, chr::day{c.day}};
    if (!ymd.ok() || c.hour > 23) throw DataError("invalid civil hour");
    return index_of(ymd) * 24 + c.hour;
}

DayIndex day_of(HourIndex h) noexcept { return floor_div(h, 24); }

unsigned hour_of_day(HourIndex h) noexcept { return static_cast<unsigned>(h - day_of(h) * 24); }

CivilHour to_civil(HourIndex h) {
    const auto ymd = ymd_of(day_of(h));
    return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
            hour_of_day(h)};
}

HourIndex first_hour_of_year(int year) { return to_hour_index({year, 1, 1, 0}); }

unsigned day_of_week(HourIndex h) {
    const chr::weekday wd{chr::sys_days{chr::days{day_of(h)}}};
    return (wd.c_encoding() + 6) % 7;
}

unsigned day_of_year(HourIndex h) {
    const DayIndex d = day_of(h);
    const auto ymd = ymd_of(d);
    return static_cast<unsigned>(d - index_of(ymd.year() / chr::January / 1) + 1);
}

unsigned days_in_year(int year) { return chr::year{year}.is_leap() ? 366u : 365u; }

HourIndex parse_timestamp(const std::string& raw) {
    std::string text = raw;
    while (!text.empty() && (text.back() == '\r' || text.back() == ' ')) text.pop_back();
    const DayIndex d = parse_date_prefix(text);
    if (text.size() < 13 || (text[10] != 'T' && text[10] != ' ')) {
        throw DataError("timestamp '" + raw + "' lacks an hour");
    }
    unsigned hour = 0, minute = 0, second = 0;
    if (!parse_uint(text, 11, 2, hour) || hour > 23) throw DataError("bad hour in timestamp '" + raw + "'");
    std::size_t pos = 13;
    if (pos < text.size()) {
        if (text[pos] != ':' || !parse_uint(text, pos + 1, 2, minute)) {
            throw DataError("bad minutes in timestamp '" + raw + "'");
        }
        pos += 3;
        if (pos < text.size()) {
            if (text[pos] != ':' || !parse_uint(text, pos + 1, 2, second) || pos + 3 != text.size()) {
                throw DataError("bad seconds in timestamp '" + raw + "'");
            }
        }
    }
    if (minute != 0 || second != 0) throw DataError("timestamp '" + raw + "' is not on the hour");
    return d * 24 + hour;
}

std::string format_timestamp(HourIndex h) {
    const CivilHour c = to_civil(h);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:00", c.year, c.month, c.day, c.hour);
    return buf;
}

DayIndex parse_date(const std::string& raw) {
    std::string text = raw;
    while (!text.empty() && (text.back() == '\r' || text.back() == ' ')) text.pop_back();
    if (text.size() != 10) throw DataError("cannot parse date '" + raw + "'");
    return parse_date_prefix(text);
}

std::string format_date(DayIndex d) {
    const auto ymd = ymd_of(d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

HolidayCalendar HolidayCalendar::us_federal(int first_year, int last_year) {
    using namespace std::chrono;
    std::set<DayIndex> days;
    for (int yi = first_year; yi <= last_year; ++yi) {
        const year y{yi};
        auto add = [&](const year_month_day& d) { days.insert(index_of(d)); };
        auto nth = [&](month m, weekday wd, unsigned n) { add(year_month_day{y / m / wd[n]}); };
        auto last = [&](month m, weekday wd) { add(year_month_day{y / m / wd[std::chrono::last]}); };
        add(y / January / 1);
        nth(January, Monday, 3);    // Martin Luther King Jr. Day
        nth(February, Monday, 3);   // Washington's Birthday
        last(May, Monday);          // Memorial Day
        if (yi >= 2021) add(y / June / 19);
        add(y / July / 4);
        nth(September, Monday, 1);  // Labor Day
        nth(October, Monday, 2);    // Columbus Day
        add(y / November / 11);
        nth(November, Thursday, 4);  // Thanksgiving
        add(y / December / 25);
    }
    return HolidayCalendar(std::move(days));
}

HolidayCalendar HolidayCalendar::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open holiday file " + path.string());
    std::set<DayIndex> days;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        try {
            days.insert(parse_date(line));
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return HolidayCalendar(std::move(days));
}

}  // namespace rnnp
