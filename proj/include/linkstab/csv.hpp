#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace linkstab::csv {

// Locale-independent, 12 significant digits. Non-finite values become an
// empty cell.
inline std::string number(double v) {
  if (!std::isfinite(v)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

}  // namespace linkstab::csv
