#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace sensopt {

/// Shortest exact decimal form of a double ("%.17g" trimmed), so identical
/// values always serialize to identical bytes and reparse bit-exactly.
inline std::string fmt_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

}  // namespace sensopt
