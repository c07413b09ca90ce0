#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kernsupp {

/// Shortest-safe decimal rendering: 17 significant digits round-trips
/// every double; table output uses 9.
std::string format_real(double value, int significant_digits = 17);

/// Parses a full decimal token; throws UsageError naming `what` otherwise.
double parse_real(std::string_view token, std::string_view what);
long long parse_integer(std::string_view token, std::string_view what);

/// Splits on a single delimiter, keeping empty fields.
std::vector<std::string> split(std::string_view text, char delimiter);
std::string_view trim(std::string_view text);

}  // namespace kernsupp
