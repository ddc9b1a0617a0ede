#include "expfun/stationary.hpp"

#include <stdexcept>

#include "expfun/detail/operators.hpp"
#include "expfun/special.hpp"

namespace expfun {

Real InverseGammaLaw::pdf(Real y) const {
  if (!(y > 0)) return 0;
  return std::exp(alpha * std::log(beta) - std::lgamma(alpha) - (alpha + 1) * std::log(y) -
                  beta / y);
}

Real InverseGammaLaw::cdf(Real y) const {
  if (!(y > 0)) return 0;
  return gamma_q(alpha, beta / y);
}

Real InverseGammaLaw::mean() const { return alpha > 1 ? beta / (alpha - 1) : kInf; }

InverseGammaLaw brownian_closed_form(Real b0, Real c0) {
  if (!(b0 > 0) || !(c0 > 0))
    throw std::invalid_argument("brownian_closed_form: need b0 > 0 and c0 > 0");
  return {2 * b0 / c0, 2 / c0};
}

bool check_finiteness(const ProcessModel& m) {
  if (!m.is_levy()) throw std::invalid_argument("check_finiteness: model must be time-homogeneous");
  // with the untruncated compensator the jump part is centred, so E X_1 = b0
  return m.b(0) > 0;
}

StationarySolution solve_stationary(const ProcessModel& m, const StationaryConfig& cfg) {
  if (!m.is_levy()) throw std::invalid_argument("solve_stationary: model must be time-homogeneous");
  if (!check_finiteness(m))
    throw std::domain_error(
        "solve_stationary: functional diverges (process mean b0 must be positive)");
  const Real c0 = m.c(0);
  if (!(c0 > 0))
    throw std::domain_error("solve_stationary: unsupported without a Gaussian component");
  const Real b0 = m.b(0);

  const SpaceGrid g = SpaceGrid::geometric(cfg.y_min, cfg.y_max, cfg.n_grid);
  const Index n = g.size();
  const Real a0 = compute_a(m, 0);

  const detail::JumpOp jop =
      detail::build_jump_op(m.jumps.at(0), g, cfg.eps_cutoff, cfg.jump_nodes_per_sign);
  const Real r0 = a0 - jop.comp;
  const detail::LocalCdfOp local = detail::assemble_local_cdf(g, r0, c0, -jop.lambda);

  // Dirichlet system rows: A F = rhs with A = local operator (boundary rows
  // identity), interior rhs = -(jump arrivals)
  Array lo(n), di(n), up(n);
  for (Index j = 0; j < n; ++j) {
    lo[j] = local.lower[j];
    di[j] = local.diag[j];
    up[j] = local.upper[j];
  }
  lo[0] = up[0] = 0;
  di[0] = 1;
  lo[n - 1] = up[n - 1] = 0;
  di[n - 1] = 1;

  StationarySolution out;
  out.y = g.y;

  // pure-diffusion stationary cdf as the starting point (the jump part of the
  // untruncated triplet is centred, so b0 already matches the process mean)
  const InverseGammaLaw ig = brownian_closed_form(b0, c0);
  Array F(n);
  for (Index j = 0; j < n; ++j) F[j] = ig.cdf(g.y[j]);

  if (!jop.active) {
    Array rhs = Array::Zero(n);
    rhs[n - 1] = 1;
    F = solve_tridiagonal(lo, di, up, rhs);
    out.iterations = 1;
    out.converged = true;
    out.final_change = 0;
  } else {
    Array jout(n), rhs(n);
    for (int it = 1; it <= cfg.max_iter; ++it) {
      jop.apply_cdf(F, jout);
      // arrivals only: apply_cdf returns Σ w [F~ - F]; -λF is already in A
      rhs = -(jout + jop.lambda * F);
      rhs[0] = 0;
      rhs[n - 1] = 1;
      Array Fn = solve_tridiagonal(lo, di, up, rhs);
      const Real change = (Fn - F).abs().maxCoeff();
      F += cfg.damping * (Fn - F);
      out.iterations = it;
      out.final_change = change;
      if (change < cfg.tol) {
        out.converged = true;
        break;
      }
    }
  }

  for (Index j = 0; j < n; ++j) F[j] = std::clamp(F[j], 0.0, 1.0);
  out.max_projection = isotonic_project(F);
  F[0] = 0;
  F[n - 1] = 1;
  out.F_inf = F;

  // density by differentiating the cumulative in log space
  const Real hl = g.h_log;
  Array p(n);
  for (Index j = 0; j < n; ++j) {
    Real d;
    if (j >= 2 && j + 2 < n)
      d = (-F[j + 2] + 8 * F[j + 1] - 8 * F[j - 1] + F[j - 2]) / (12 * hl);
    else if (j >= 1 && j + 1 < n)
      d = (F[j + 1] - F[j - 1]) / (2 * hl);
    else if (j == 0)
      d = (F[1] - F[0]) / hl;
    else
      d = (F[j] - F[j - 1]) / hl;
    p[j] = std::max(0.0, d / g.y[j]);
  }
  out.p_inf = p;
  return out;
}

Real stationary_residual(const ProcessModel& m, const SpaceGrid& g, const Array& p_inf,
                         Real eps_cutoff, int jump_nodes_per_sign) {
  if (!m.is_levy())
    throw std::invalid_argument("stationary_residual: model must be time-homogeneous");
  // time reversal leaves time-homogeneous coefficients unchanged, so the
  // evolution right side evaluated on a stationary slice should vanish
  const ReversedModel rev = reverse_triplet(m, 1.0);
  const Array r = apply_rhs(rev, 0, g, p_inf, eps_cutoff, jump_nodes_per_sign);
  Real sup = 0;
  for (Index j = 2; j + 2 < g.size(); ++j)
    sup = std::max(sup, std::abs(r[j]) / (1 + g.y[j] * g.y[j]));
  return sup;
}

}  // namespace expfun
