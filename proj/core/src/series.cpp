#include "rnnp/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rnnp/error.hpp"

namespace rnnp {

void HourlySeries::push_back(HourIndex h, double demand, double dry, double wet) {
    hours.push_back(h);
    demand_mwh.push_back(demand);
    drybulb_f.push_back(dry);
    wetbulb_f.push_back(wet);
}

void HourlySeries::validate(bool require_demand) const {
    if (hours.empty()) throw DataError("series: no rows");
    if (demand_mwh.size() != hours.size() || drybulb_f.size() != hours.size() || wetbulb_f.size() != hours.size()) {
        throw DataError("series: column lengths differ");
    }
    for (std::size_t i = 0; i < hours.size(); ++i) {
        if (i > 0) {
            if (hours[i] == hours[i - 1]) throw DataError("series: duplicate timestamp " + format_timestamp(hours[i]));
            if (hours[i] < hours[i - 1]) throw DataError("series: timestamps not sorted at " + format_timestamp(hours[i]));
            if (hours[i] != hours[i - 1] + 1) {
                throw DataError("series: gap after " + format_timestamp(hours[i - 1]) + " (next row is " +
                                format_timestamp(hours[i]) + ")");
            }
        }
        const bool missing = std::isnan(demand_mwh[i]) && !require_demand;
        if (!missing && (!(demand_mwh[i] > 0.0) || !std::isfinite(demand_mwh[i]))) {
            throw DataError("series: non-positive demand at " + format_timestamp(hours[i]));
        }
        if (!std::isfinite(drybulb_f[i]) || !std::isfinite(wetbulb_f[i])) {
            throw DataError("series: non-finite temperature at " + format_timestamp(hours[i]));
        }
    }
}

std::size_t HourlySeries::index_of(HourIndex h) const {
    if (hours.empty() || h < hours.front() || h > hours.back()) {
        throw DataError("series: hour " + format_timestamp(h) + " is outside the data");
    }
    return static_cast<std::size_t>(h - hours.front());
}

HourlySeries HourlySeries::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > size()) throw DataError("series: slice out of range");
    HourlySeries out;
    out.hours.assign(hours.begin() + begin, hours.begin() + end);
    out.demand_mwh.assign(demand_mwh.begin() + begin, demand_mwh.begin() + end);
    out.drybulb_f.assign(drybulb_f.begin() + begin, drybulb_f.begin() + end);
    out.wetbulb_f.assign(wetbulb_f.begin() + begin, wetbulb_f.begin() + end);
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    for (auto& f : fields) {
        while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
        while (!f.empty() && f.front() == ' ') f.erase(f.begin());
    }
    return fields;
}

double parse_double(const std::string& field, const std::string& what) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || field.empty()) throw DataError("cannot parse " + what + " '" + field + "'");
    return value;
}

HourlySeries parse_csv(const std::string& text, const std::string& source, bool require_demand) {
    std::istringstream in(text);
    std::string line;
    HourlySeries series;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string where = source + ":" + std::to_string(lineno);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() != 4 || fields[0] != "timestamp" || fields[1] != "demand_mwh" ||
                fields[2] != "drybulb_f" || fields[3] != "wetbulb_f") {
                throw DataError(where + ": expected header timestamp,demand_mwh,drybulb_f,wetbulb_f");
            }
            continue;
        }
        if (fields.size() != 4) throw DataError(where + ": expected 4 fields, got " + std::to_string(fields.size()));
        try {
            const double demand = fields[1].empty() && !require_demand ? std::nan("") : parse_double(fields[1], "demand_mwh");
            series.push_back(parse_timestamp(fields[0]), demand,
                             parse_double(fields[2], "drybulb_f"), parse_double(fields[3], "wetbulb_f"));
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
    }
    if (series.empty()) throw DataError(source + ": no rows");
    try {
        series.validate(require_demand);
    } catch (const DataError& e) {
        throw DataError(source + ": " + e.what());
    }
    return series;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw DataError("write failed for " + path.string());
}

HourlySeries ingest_csv(const std::filesystem::path& path, bool require_demand) {
    return parse_csv(read_text_file(path), path.string(), require_demand);
}

std::string to_csv(const HourlySeries& series) {
    std::ostringstream out;
    out.precision(17);
    out << "timestamp,demand_mwh,drybulb_f,wetbulb_f\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_timestamp(series.hours[i]) << ',';
        if (!std::isnan(series.demand_mwh[i])) out << series.demand_mwh[i];
        out << ',' << series.drybulb_f[i] << ','
            << series.wetbulb_f[i] << '\n';
    }
    return out.str();
}

void write_csv(const HourlySeries& series, const std::filesystem::path& path) {
    write_text_file(path, to_csv(series));
}

}  // namespace rnnp
