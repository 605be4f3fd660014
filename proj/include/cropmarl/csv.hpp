#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cropmarl {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Exact inverse of format_double.
double parse_double(std::string_view text);

/// Splits one CSV line on commas (fields never contain commas or quotes).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace cropmarl
