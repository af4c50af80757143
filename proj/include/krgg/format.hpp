#pragma once

#include <cstdio>
#include <string>

namespace krgg {

/// Decimal rendering with 17 significant digits; parses back to the same double.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace krgg
