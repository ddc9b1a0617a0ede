#pragma once

// Geometric space grid on (0, ∞): uniform in log y, which makes the jump
// displacement y -> y e^x a constant fractional shift in index space.

#include "expfun/common.hpp"

namespace expfun {

struct SpaceGrid {
  Array y;
  Array log_y;
  Real h_log = 0;  // uniform log spacing
  Array w;         // trapezoid weights in y (mass = w.p)

  static SpaceGrid geometric(Real y_min, Real y_max, Index n) {
    if (!(y_min > 0) || !(y_max > y_min) || n < 8)
      throw std::invalid_argument("grid: need 0 < y_min < y_max and n >= 8");
    SpaceGrid g;
    g.y.resize(n);
    g.log_y.resize(n);
    const Real l0 = std::log(y_min), l1 = std::log(y_max);
    g.h_log = (l1 - l0) / (n - 1);
    for (Index j = 0; j < n; ++j) {
      g.log_y[j] = l0 + j * g.h_log;
      g.y[j] = std::exp(g.log_y[j]);
    }
    g.y[n - 1] = y_max;  // exact endpoints
    g.w = trapezoid_weights(g.y);
    return g;
  }

  Index size() const { return y.size(); }
  Real mass(const Array& p) const { return (w * p).sum(); }
};

}  // namespace expfun
