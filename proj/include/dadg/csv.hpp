#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace dadg::csv {

// Shortest-exact formatting: %.17g round-trips every double bit pattern.
inline std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

inline void write_row(std::ostream& out, const std::vector<double>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << format(cells[i]);
  }
  out << '\n';
}

}  // namespace dadg::csv
