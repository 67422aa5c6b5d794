#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace orthomart {

/// Shortest representation that round-trips through strtod. Non-finite values
/// print as "inf", "-inf" and "nan".
inline std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), end);
}

}  // namespace orthomart
