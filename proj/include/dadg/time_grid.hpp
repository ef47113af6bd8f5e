#pragma once

#include "dadg/types.hpp"

namespace dadg {

// Uniform grid over [0, t_f] with `intervals` steps. node(0) == 0 and
// node(intervals) == t_f hold exactly.
struct TimeGrid {
  double t_f = 0.0;
  int intervals = 0;

  static TimeGrid uniform(double t_f, int intervals) {
    if (!(t_f > 0.0)) throw ValidationError("TimeGrid: t_f must be positive");
    if (intervals < 1) throw ValidationError("TimeGrid: need at least one interval");
    return TimeGrid{t_f, intervals};
  }

  double dt() const { return t_f / intervals; }
  int nodes() const { return intervals + 1; }
  double node(int k) const { return t_f * k / intervals; }

  // Index/weight pair for linear interpolation at t, clamped to [0, t_f].
  struct Locator {
    int lower;
    double weight;
  };
  Locator locate(double t) const {
    double u = t / t_f * intervals;
    int k = static_cast<int>(u);
    if (k < 0) k = 0;
    if (k > intervals - 1) k = intervals - 1;
    double w = u - k;
    if (w < 0.0) w = 0.0;
    if (w > 1.0) w = 1.0;
    return {k, w};
  }
};

}  // namespace dadg
