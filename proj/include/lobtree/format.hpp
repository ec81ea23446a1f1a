#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace lobtree {

/// Locale-independent, 17 significant digits; "inf"/"-inf"/"nan" otherwise.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace lobtree
