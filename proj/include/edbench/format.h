#pragma once

#include <span>
#include <string>

namespace edbench {

// Fixed-point with at most `max_decimals` digits, trailing zeros and a bare
// decimal point stripped: 108.0 -> "108", 59.4237 -> "59.42", -0.001 -> "0".
std::string format_number(double value, int max_decimals = 2);

// Shortest text that parses back to exactly `value`.
std::string format_roundtrip(double value);

// "[x0, x1, ...]" with format_number applied to each element.
std::string format_vector(std::span<const double> values, int max_decimals = 2);

}  // namespace edbench
