#pragma once

#include <cstdio>
#include <string>

namespace symgerm {

/// Shortest round-trippable decimal form; all report floats go through this
/// so output is byte-stable.
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace symgerm
