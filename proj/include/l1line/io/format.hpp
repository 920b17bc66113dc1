#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "l1line/types.hpp"

namespace l1line::io {

/// 12 significant digits, the precision of all human-facing output.
inline std::string fmt_num(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);
  return buf;
}

template <typename Range>
std::string fmt_list(const Range& values) {
  std::string out;
  for (Index k = 0; k < static_cast<Index>(values.size()); ++k) {
    if (k > 0) out.push_back(',');
    out += fmt_num(static_cast<double>(values[k]));
  }
  return out;
}

}  // namespace l1line::io
