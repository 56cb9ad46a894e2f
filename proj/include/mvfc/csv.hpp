#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mvfc::csv {

struct NumericTable {
  std::vector<std::string> header;          // empty unless a header row was read
  std::vector<std::vector<double>> rows;
};

/// Parses a comma-delimited numeric table. Numbers use the C locale (dot
/// decimal separator) regardless of the process locale. Errors name the
/// source and the 1-based line and column.
NumericTable parse_numeric(std::istream& in, std::string_view source, bool has_header,
                           char delimiter = ',');
NumericTable read_numeric(const std::filesystem::path& path, bool has_header, char delimiter = ',');

std::vector<std::string> split(std::string_view line, char delimiter);
std::string_view trim(std::string_view s);

/// Parses a whole field as a double; returns false on trailing garbage.
bool parse_double(std::string_view text, double& out);

/// Shortest round-trip decimal representation; stable across runs.
std::string format_double(double value);

}  // namespace mvfc::csv
