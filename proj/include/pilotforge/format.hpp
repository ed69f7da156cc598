#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace pilotforge {

// Locale-independent shortest "%g"-style rendering with a fixed number of
// significant digits. Used for CSV output and diagnostics.
inline std::string format_number(double value, int significant_digits = 12) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // fold -0
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                              std::chars_format::general, significant_digits);
  return std::string(buffer, result.ptr);
}

}  // namespace pilotforge
