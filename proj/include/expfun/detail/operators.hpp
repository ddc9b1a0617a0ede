#pragma once

// Discrete operators shared by the evolution and stationary solvers.
//
// Density form, conservative: the equation is d_s p = d_y F with flux
//   F = (c/2) g' - u g,  g = y^2 p,  u(y) = (a y + 1)/y^2,
// discretized with an exponentially fitted (Scharfetter-Gummel) face flux.
// The fitted flux reduces to sign-upwinding when advection dominates, to
// central differencing at stagnation faces, is second order in smooth
// regions, and gives (I - dt L) the M-matrix sign pattern, so fully implicit
// steps preserve positivity.
//
// Cumulative form, non-conservative: d_s F = (c/2) y^2 F'' + beta F' with
// beta = c y - (r0 y + 1) after folding the jump compensator into the
// advection (r0 = a - ∫(e^{-x}-1)K); hybrid central/upwind stencil.
//
// Jump displacement operator: fixed quadrature nodes become constant
// fractional shifts in log-index space, applied with linear interpolation.

#include <vector>

#include "expfun/grid.hpp"
#include "expfun/jump_measure.hpp"

namespace expfun::detail {

// x / (e^x - 1), stable at 0 and for large |x|
inline Real bern(Real x) {
  if (std::abs(x) < 1e-8) return 1 - 0.5 * x;
  if (x > 0) {
    const Real e = std::exp(-x);
    return x * e / (1 - e);
  }
  return x / std::expm1(x);
}

// tridiagonal action L p with zero boundary rows; face coefficients kept for
// exact discrete boundary-flux accounting
struct LocalDensityOp {
  Array lower, diag, upper;  // size N, rows 0 and N-1 zero
  Array Al, Ar;              // size N-1: F_{j+1/2} = Al[j] p_j + Ar[j] p_{j+1}

  Real flux(const Array& p, Index face) const { return Al[face] * p[face] + Ar[face] * p[face + 1]; }
  // net rate at which L moves mass out of the interior
  Real boundary_outflow_rate(const Array& p) const {
    const Index nf = Al.size();
    return -(flux(p, nf - 1) - flux(p, 0));
  }
  Array apply(const Array& p) const {
    const Index n = p.size();
    Array out = Array::Zero(n);
    for (Index j = 1; j + 1 < n; ++j)
      out[j] = lower[j] * p[j - 1] + diag[j] * p[j] + upper[j] * p[j + 1];
    return out;
  }
};

inline LocalDensityOp assemble_local_density(const SpaceGrid& g, Real a_bar, Real c_bar) {
  const Index n = g.size();
  LocalDensityOp op;
  op.Al.resize(n - 1);
  op.Ar.resize(n - 1);
  const Real D = 0.5 * c_bar;
  for (Index j = 0; j + 1 < n; ++j) {
    const Real h = g.y[j + 1] - g.y[j];
    const Real yf = 0.5 * (g.y[j] + g.y[j + 1]);
    const Real uf = (a_bar * yf + 1) / (yf * yf);
    const Real y2l = g.y[j] * g.y[j], y2r = g.y[j + 1] * g.y[j + 1];
    if (D > 0) {
      const Real pe = uf * h / D;
      op.Ar[j] = (D / h) * bern(pe) * y2r;
      op.Al[j] = -(D / h) * bern(-pe) * y2l;
    } else if (uf > 0) {  // pure advection: upwind by the sign of a y + 1
      op.Al[j] = -uf * y2l;
      op.Ar[j] = 0;
    } else {
      op.Al[j] = 0;
      op.Ar[j] = -uf * y2r;
    }
  }
  op.lower = Array::Zero(n);
  op.diag = Array::Zero(n);
  op.upper = Array::Zero(n);
  for (Index j = 1; j + 1 < n; ++j) {
    const Real hbar = 0.5 * (g.y[j + 1] - g.y[j - 1]);
    op.lower[j] = -op.Al[j - 1] / hbar;
    op.diag[j] = (op.Al[j] - op.Ar[j - 1]) / hbar;
    op.upper[j] = op.Ar[j] / hbar;
  }
  return op;
}

// cumulative form; boundary rows empty (Dirichlet data handled by caller)
struct LocalCdfOp {
  Array lower, diag, upper;

  Array apply(const Array& f) const {
    const Index n = f.size();
    Array out = Array::Zero(n);
    for (Index j = 1; j + 1 < n; ++j)
      out[j] = lower[j] * f[j - 1] + diag[j] * f[j] + upper[j] * f[j + 1];
    return out;
  }
};

// extra_diag < 0 adds a zeroth-order term (e.g. -lambda F for the implicit
// part of the stationary iteration)
inline LocalCdfOp assemble_local_cdf(const SpaceGrid& g, Real r0_bar, Real c_bar,
                                     Real extra_diag = 0) {
  const Index n = g.size();
  LocalCdfOp op;
  op.lower = Array::Zero(n);
  op.diag = Array::Zero(n);
  op.upper = Array::Zero(n);
  for (Index j = 1; j + 1 < n; ++j) {
    const Real hm = g.y[j] - g.y[j - 1], hp = g.y[j + 1] - g.y[j];
    const Real y = g.y[j];
    const Real diff = 0.5 * c_bar * y * y;
    const Real beta = c_bar * y - (r0_bar * y + 1);
    // second derivative stencil
    Real l = 2 * diff / (hm * (hm + hp));
    Real u = 2 * diff / (hp * (hm + hp));
    Real d = -2 * diff / (hm * hp);
    // advection: central if it keeps the off-diagonals nonnegative, else upwind
    const Real lc = l - beta * hp / (hm * (hm + hp));
    const Real uc = u + beta * hm / (hp * (hm + hp));
    if (lc >= 0 && uc >= 0) {
      l = lc;
      u = uc;
      d -= beta * (hm - hp) / (hm * hp);  // nonuniform central correction
    } else if (beta > 0) {
      u += beta / hp;
      d -= beta / hp;
    } else {
      l += -beta / hm;
      d -= -beta / hm;
    }
    op.lower[j] = l;
    op.diag[j] = d + extra_diag;
    op.upper[j] = u;
  }
  return op;
}

// displacement part of the jump operator on the log grid
struct JumpOp {
  struct Shift {
    Index k;       // integer displacement, reading source index j + k
    Real th;       // fractional part
    Real w;        // quadrature weight (includes the Lévy density)
    Real ex_w;     // w * e^x
    Real em1x;     // e^{-x} - 1
  };
  std::vector<Shift> shifts;
  Real lambda = 0;  // Σ w : total mass seen by the quadrature
  Real comp = 0;    // Σ w (e^{-x}-1) : discrete jump compensator
  bool active = false;

  // density form: Σ w [e^x p(y e^x) - p(y)] + comp * d_y(y p); interior rows
  void apply_density(const SpaceGrid& g, const Array& p, Array& out) const {
    const Index n = p.size();
    out.setZero();
    if (!active) return;
    for (const Shift& s : shifts) {
      const Real w0 = s.ex_w * (1 - s.th), w1 = s.ex_w * s.th;
      // dest j reads source j+k and j+k+1; keep everything inside [1, n-2]
      auto add = [&](Index off, Real wgt) {
        if (wgt == 0) return;
        const Index j0 = std::max<Index>(1, -s.k - off);
        const Index j1 = std::min<Index>(n - 2, n - 1 - s.k - off);
        if (j0 > j1) return;
        out.segment(j0, j1 - j0 + 1) += wgt * p.segment(j0 + s.k + off, j1 - j0 + 1);
      };
      add(0, w0);
      add(1, w1);
    }
    // -lambda p + comp * d_y(y p), central derivative
    for (Index j = 1; j + 1 < n; ++j) {
      const Real dyp =
          (g.y[j + 1] * p[j + 1] - g.y[j - 1] * p[j - 1]) / (g.y[j + 1] - g.y[j - 1]);
      out[j] += -lambda * p[j] + comp * dyp;
    }
  }

  // rate at which displaced mass lands outside the grid (diagnostic)
  Real offgrid_rate(const SpaceGrid& g, const Array& p) const {
    if (!active) return 0;
    const Index n = p.size();
    Array prefix(n + 1);
    prefix[0] = 0;
    for (Index i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + g.w[i] * p[i];
    const Real total = prefix[n];
    Real rate = 0;
    for (const Shift& s : shifts) {
      // sources i with destination i - k outside [1, n-2]
      if (s.k > 0) {
        rate += s.w * prefix[std::min<Index>(s.k + 1, n)];
      } else if (s.k < 0) {
        rate += s.w * (total - prefix[std::max<Index>(0, n - 1 + s.k)]);
      }
    }
    return rate;
  }

  // cumulative form: Σ w [F(y e^x) - F(y)], with F = 0 below and 1 above
  void apply_cdf(const Array& f, Array& out) const {
    const Index n = f.size();
    out.setZero();
    if (!active) return;
    for (const Shift& s : shifts) {
      const Real w0 = s.w * (1 - s.th), w1 = s.w * s.th;
      auto add = [&](Index off, Real wgt) {
        if (wgt == 0) return;
        const Index j0 = std::max<Index>(1, -s.k - off);
        const Index j1 = std::min<Index>(n - 2, n - 1 - s.k - off);
        if (j0 <= j1) out.segment(j0, j1 - j0 + 1) += wgt * f.segment(j0 + s.k + off, j1 - j0 + 1);
        // sources above the top read F = 1
        for (Index j = std::max<Index>(1, j1 + 1); j + 1 < n; ++j) out[j] += wgt;
      };
      add(0, w0);
      add(1, w1);
    }
    for (Index j = 1; j + 1 < n; ++j) out[j] -= lambda * f[j];
  }
};

inline JumpOp build_jump_op(const JumpMeasure& K, const SpaceGrid& g, Real eps, int n_per_sign) {
  JumpOp op;
  if (K.is_none()) return op;
  for (const auto& [x, w] : K.quad_nodes(eps, n_per_sign)) {
    JumpOp::Shift s;
    const Real d = x / g.h_log;
    s.k = static_cast<Index>(std::floor(d));
    s.th = d - s.k;
    s.w = w;
    s.ex_w = w * std::exp(x);
    s.em1x = em1(x);
    op.shifts.push_back(s);
    op.lambda += w;
    op.comp += w * s.em1x;
  }
  op.active = !op.shifts.empty();
  return op;
}

}  // namespace expfun::detail
