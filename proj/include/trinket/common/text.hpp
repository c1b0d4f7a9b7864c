#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace trinket {

std::string trim(std::string_view s);
/// Splits on `sep` without quoting rules; fields are trimmed.
std::vector<std::string> split(std::string_view s, char sep);
/// Shortest representation that parses back to the same double.
std::string format_double(double v);
/// Throws FormatError unless the whole field is a number.
double parse_double(std::string_view s);
int parse_int(std::string_view s);

}  // namespace trinket
