#pragma once

// Long-run law of the exponential functional for time-homogeneous models:
// a closed form when the process is Brownian with drift, and a damped
// fixed-point iteration on the cumulative equation otherwise (jump arrivals
// explicit, everything local plus the jump intensity implicit).

#include "expfun/pide.hpp"

namespace expfun {

// stationary law in the pure-diffusion case: inverse gamma with
// alpha = 2 b0 / c0, beta = 2 / c0
struct InverseGammaLaw {
  Real alpha = kNaN, beta = kNaN;

  Real pdf(Real y) const;
  Real cdf(Real y) const;
  Real mean() const;  // beta / (alpha - 1); infinite when alpha <= 1
  Real mode() const { return beta / (alpha + 1); }
};

InverseGammaLaw brownian_closed_form(Real b0, Real c0);

// a.s. finiteness of the infinite-horizon functional (time-homogeneous
// models only): the process must drift to +infinity, i.e. E X_1 = b0 > 0
bool check_finiteness(const ProcessModel& m);

struct StationaryConfig {
  Real y_min = 0.01, y_max = 200;
  Index n_grid = 1024;
  Real eps_cutoff = 1e-3;
  int jump_nodes_per_sign = 256;
  Real damping = 0.7;
  Real tol = 1e-11;     // sup-norm change of the undamped update
  int max_iter = 2000;
};

struct StationarySolution {
  Array y, p_inf, F_inf;
  int iterations = 0;
  bool converged = false;
  Real final_change = kNaN;
  Real max_projection = 0;  // isotonic adjustment applied to F_inf
};

StationarySolution solve_stationary(const ProcessModel& m, const StationaryConfig& cfg = {});

// weighted sup (weight 1/(1+y^2)) of the stationary-equation right side
// evaluated on a candidate density; boundary-adjacent rows are skipped
Real stationary_residual(const ProcessModel& m, const SpaceGrid& g, const Array& p_inf,
                         Real eps_cutoff = 1e-3, int jump_nodes_per_sign = 256);

}  // namespace expfun
