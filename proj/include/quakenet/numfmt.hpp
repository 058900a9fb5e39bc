#pragma once

#include <string>
#include <string_view>

namespace quakenet {

/// Shortest-round-trip is not enough for byte-stable files across writers,
/// so every number is written with 17 significant digits.
std::string format_number(double value);

/// Rounds to the given number of significant digits (reporting only).
double round_significant(double value, int digits);

/// Parses the whole token as a double (leading '+' allowed). Returns false
/// on any trailing garbage, empty input or non-finite result.
bool parse_number(std::string_view token, double& out);

std::string_view trim(std::string_view s);

}  // namespace quakenet
