#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>

namespace staa {

/// Reporting format: 12 significant digits.
inline std::string format_g12(double value) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.12g", value);
  return {buf, static_cast<std::size_t>(len)};
}

/// Shortest text that parses back to exactly `value`.
inline std::string format_exact(double value) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return format_g12(value);
  return {buf, end};
}

}  // namespace staa
