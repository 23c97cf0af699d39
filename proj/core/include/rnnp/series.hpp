#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "rnnp/calendar.hpp"

namespace rnnp {

/// Strictly hourly, gap-free, strictly positive demand.
struct HourlySeries {
    std::vector<HourIndex> hours;
    std::vector<double> demand_mwh;
    std::vector<double> drybulb_f;
    std::vector<double> wetbulb_f;

    std::size_t size() const noexcept { return hours.size(); }
    bool empty() const noexcept { return hours.empty(); }
    void push_back(HourIndex h, double demand, double dry, double wet);

    /// Throws DataError naming the offending hour. With `require_demand` false, demand may
    /// be missing (NaN), as in exogenous-only forecast inputs.
    void validate(bool require_demand = true) const;
    /// Index of hour `h`, or throws DataError when it is outside the series.
    std::size_t index_of(HourIndex h) const;
    /// Rows [begin, end).
    HourlySeries slice(std::size_t begin, std::size_t end) const;
};

/// Header: timestamp,demand_mwh,drybulb_f,wetbulb_f. An empty demand field is read as NaN
/// and accepted only when `require_demand` is false.
HourlySeries parse_csv(const std::string& text, const std::string& source = "<memory>", bool require_demand = true);
HourlySeries ingest_csv(const std::filesystem::path& path, bool require_demand = true);
/// 17 significant digits, so write + read reproduces every value exactly.
std::string to_csv(const HourlySeries& series);
void write_csv(const HourlySeries& series, const std::filesystem::path& path);

/// Reads a whole file; throws DataError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
/// Writes (truncating); throws DataError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Splits a CSV line on commas (no quoting: none of the formats need it).
std::vector<std::string> split_csv_line(const std::string& line);
/// Parses a floating-point field; throws DataError naming `what`.
double parse_double(const std::string& field, const std::string& what);

}  // namespace rnnp
