#pragma once

// Deterministic solvers for the forward equations of the reversed functional:
// the density equation in conservative form on a geometric grid, and the same
// dynamics in cumulative form.  Local (drift + diffusion) terms are stepped
// implicitly with an exponentially-fitted flux; the jump operator is applied
// explicitly by fixed quadrature with sub-stepping when the jump intensity
// makes the explicit step unstable.
//
// Starting slices come from a short Monte Carlo bootstrap: the density at a
// small t_boot is kernel-estimated from simulated functional samples (the law
// at t_boot is assumed well represented by the sample; the run manifest
// records this assumption).

#include "expfun/grid.hpp"
#include "expfun/mc_engine.hpp"

namespace expfun {

struct PideConfig {
  Real y_min = 0.01, y_max = 200;
  Index n_grid = 1024;
  Real dt = 1e-3;
  Real theta = 1.0;        // implicitness of the local part
  Real t_boot = 0.05;      // bootstrap horizon
  Index boot_paths = 100000;
  uint64_t seed = 1;
  Real boot_dt = 1e-3;
  Real eps_cutoff = 1e-3;  // shared jump cutoff (sampling and quadrature)
  int jump_nodes_per_sign = 256;
  Real mass_rate_tol = 5e-3;  // step rejected when |d(mass+leak)/ds| exceeds this
  int max_halvings = 12;
  Index store_slices = 129;  // stored time slices (thinned; final always kept)
};

struct DensityField {
  Array y;
  Array times;                 // stored slice times (first = bootstrap time)
  Eigen::MatrixXd p;           // slices x grid
  Array mass;                  // grid mass per stored slice
  Array leak;                  // accumulated boundary/jump-truncation loss
  Index clip_count = 0;        // negative nodes clipped over the whole run
  Real clip_mass = 0;          // total mass removed by clipping
  bool heuristic_regime = false;  // c = 0 somewhere: outside the certified regime
  Index rejected_steps = 0;

  Array final_slice() const { return p.row(p.rows() - 1).array(); }
  Real final_time() const { return times[times.size() - 1]; }
};

struct CdfField {
  Array y;
  Array times;
  Eigen::MatrixXd F;           // slices x grid, each slice isotonic
  Real max_projection = 0;     // largest isotonic adjustment applied
  bool heuristic_regime = false;
  Index rejected_steps = 0;

  Array final_slice() const { return F.row(F.rows() - 1).array(); }
};

// one evaluation of the density-equation right side at time u with frozen
// coefficients; boundary rows are zero (Dirichlet)
Array apply_rhs(const ReversedModel& rev, Real u, const SpaceGrid& g, const Array& p,
                Real eps_cutoff = 1e-3, int jump_nodes_per_sign = 256);

// jump operator in displacement (direct) form at a single point, adaptive
// quadrature against an analytic density:  ∫ [e^x p(y e^x) - p(y)] K(dx)
Real apply_jump_direct_point(const JumpMeasure& K, Real y, const std::function<Real(Real)>& p,
                             Real eps_cutoff = 0);

struct TailJump {
  Array T;          // primitive: ∫_y^∞ p ν+(ln(z/y)) dz - ∫_0^y p ν-(ln(y/z)) dz
  Array J;          // its y-derivative: (1/y)∫ p(z) k(ln(z/y)) dz - λ p(y)
  Real lambda_tot;  // total jump mass seen by the operator
};

// tail-function form of the jump operator, adaptive quadrature against an
// analytic density; requires a measure with a density
TailJump apply_jump_tail_form(const JumpMeasure& K, const Array& y_pts,
                              const std::function<Real(Real)>& p);

// same combination discretized on the grid (trapezoid in z); solver-grade
TailJump apply_jump_tail_form_grid(const JumpMeasure& K, const SpaceGrid& g, const Array& p);

// march the density of the functional from the bootstrap slice to t
DensityField solve_density(const ProcessModel& m, Real t, const PideConfig& cfg);

// same dynamics in cumulative form with clamped boundary data F=0 / F=1
CdfField solve_cdf(const ProcessModel& m, Real t, const PideConfig& cfg);

// in-place pool-adjacent-violators projection to a nondecreasing slice,
// returns the largest pointwise adjustment
Real isotonic_project(Array& f);

}  // namespace expfun
