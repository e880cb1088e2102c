#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace magnograph {

/// Shortest form that round-trips a double: %.17g, with nan/inf spelled out.
inline std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace magnograph
