#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Minimal CSV helpers shared by the readers and writers. Fields are plain
// comma-separated tokens; quoting is not supported.
namespace trendboot::csv {

std::vector<std::string_view> split(std::string_view line);

std::string_view trim(std::string_view s);

// Reads one line, stripping a trailing '\r'. Returns false at end of stream.
bool read_line(std::istream& in, std::string& line);

// Empty field -> nullopt; anything unparsable -> nullopt with ok=false.
std::optional<double> parse_real(std::string_view field, bool& ok);

std::optional<long long> parse_integer(std::string_view field);

// Shortest text that parses back to exactly the same double.
std::string format_real(double value);

// NaN is written as an empty field.
std::string format_optional_real(double value);

}  // namespace trendboot::csv
