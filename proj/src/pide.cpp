#include "expfun/pide.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "expfun/detail/operators.hpp"

namespace expfun {

using detail::JumpOp;
using detail::LocalCdfOp;
using detail::LocalDensityOp;

namespace {

// (I - s L) f = rhs with Dirichlet rows f[0] = lo, f[n-1] = hi
template <typename Op>
Array implicit_solve(const Op& op, Real s, Array rhs, Real lo, Real hi) {
  const Index n = rhs.size();
  Array l(n), d(n), u(n);
  for (Index j = 0; j < n; ++j) {
    l[j] = -s * op.lower[j];
    d[j] = 1 - s * op.diag[j];
    u[j] = -s * op.upper[j];
  }
  l[0] = u[0] = 0;
  d[0] = 1;
  rhs[0] = lo;
  l[n - 1] = u[n - 1] = 0;
  d[n - 1] = 1;
  rhs[n - 1] = hi;
  return solve_tridiagonal(l, d, u, rhs);
}

bool c_vanishes(const ReversedModel& rev, Real u_from, Real u_to) {
  for (int i = 0; i < 9; ++i) {
    const Real u = u_from + (u_to - u_from) * i / 8.0;
    if (rev.c_bar(u) <= 0) return true;
  }
  return false;
}

Array bootstrap_samples(const ReversedModel& rev, const PideConfig& cfg) {
  McConfig mc;
  mc.seed = cfg.seed;
  mc.n_paths = cfg.boot_paths;
  mc.dt = cfg.boot_dt;
  mc.eps_cutoff = cfg.eps_cutoff;
  return simulate_v_functional(rev, cfg.t_boot, mc).values.col(0).array();
}

}  // namespace

Array apply_rhs(const ReversedModel& rev, Real u, const SpaceGrid& g, const Array& p,
                Real eps_cutoff, int jump_nodes_per_sign) {
  if (p.size() != g.size()) throw std::invalid_argument("apply_rhs: slice/grid size mismatch");
  const LocalDensityOp local = detail::assemble_local_density(g, rev.a_bar(u), rev.c_bar(u));
  Array out = local.apply(p);
  const JumpMeasure& K = rev.jumps_bar(u);
  if (!K.is_none()) {
    const JumpOp jop = detail::build_jump_op(K, g, eps_cutoff, jump_nodes_per_sign);
    Array jout(p.size());
    jop.apply_density(g, p, jout);
    out += jout;
  }
  return out;
}

Real apply_jump_direct_point(const JumpMeasure& K, Real y, const std::function<Real(Real)>& p,
                             Real eps_cutoff) {
  if (!(y > 0)) throw std::domain_error("apply_jump_direct_point: y must be > 0");
  const Real py = p(y);
  TailQuad q =
      K.integrate([&](Real x) { return std::exp(x) * p(y * std::exp(x)) - py; }, eps_cutoff);
  if (q.diverged) throw std::domain_error("apply_jump_direct_point: integral diverges");
  return q.value;
}

namespace {

// T(y) = ∫_y^∞ p(z) nu+(ln(z/y)) dz - ∫_0^y p(z) nu-(ln(y/z)) dz by adaptive
// quadrature in v = ln(z/y)
Real tail_primitive(const JumpMeasure& K, Real y, const std::function<Real(Real)>& p) {
  TailQuad up = integrate_tail(
      [&](Real v) { return p(y * std::exp(v)) * K.nu_plus(v) * y * std::exp(v); }, 1e-10);
  TailQuad dn = integrate_tail(
      [&](Real v) { return p(y * std::exp(-v)) * K.nu_minus(v) * y * std::exp(-v); }, 1e-10);
  if (up.diverged || dn.diverged)
    throw std::domain_error("apply_jump_tail_form: tail integral diverges");
  return up.value - dn.value;
}

}  // namespace

TailJump apply_jump_tail_form(const JumpMeasure& K, const Array& y_pts,
                              const std::function<Real(Real)>& p) {
  if (K.is_none()) throw std::invalid_argument("apply_jump_tail_form: measure has no jumps");
  if (!K.has_density())
    throw std::invalid_argument("apply_jump_tail_form: measure must have a density");
  TailJump out;
  out.lambda_tot = K.mass_above(0);
  out.T.resize(y_pts.size());
  out.J.resize(y_pts.size());
  for (Index i = 0; i < y_pts.size(); ++i) {
    const Real y = y_pts[i];
    if (!(y > 0)) throw std::domain_error("apply_jump_tail_form: y must be > 0");
    out.T[i] = tail_primitive(K, y, p);
    // five-point derivative of the primitive: the tail route never touches
    // the Lévy density directly
    const Real h = 0.01 * y;
    const Real tm2 = tail_primitive(K, y - 2 * h, p), tm1 = tail_primitive(K, y - h, p);
    const Real tp1 = tail_primitive(K, y + h, p), tp2 = tail_primitive(K, y + 2 * h, p);
    out.J[i] = (tm2 - 8 * tm1 + 8 * tp1 - tp2) / (12 * h);
  }
  return out;
}

TailJump apply_jump_tail_form_grid(const JumpMeasure& K, const SpaceGrid& g, const Array& p) {
  if (K.is_none()) throw std::invalid_argument("apply_jump_tail_form_grid: measure has no jumps");
  if (!K.has_density())
    throw std::invalid_argument("apply_jump_tail_form_grid: measure must have a density");
  const Index n = g.size();
  TailJump out;
  out.lambda_tot = K.mass_above(0);
  out.T = Array::Zero(n);
  out.J = Array::Zero(n);
  // tails and density at node distances m h_log
  Array nup(n), num(n), kd_up(n), kd_dn(n);
  for (Index m = 0; m < n; ++m) {
    const Real d = std::max(m * g.h_log, 1e-12);
    nup[m] = K.nu_plus(d);
    num[m] = K.nu_minus(d);
    kd_up[m] = K.density(d);
    kd_dn[m] = K.density(-d);
  }
  for (Index j = 0; j < n; ++j) {
    Real t_up = 0, t_dn = 0, conv = 0;
    for (Index i = 0; i < n; ++i) {
      const Real wp = g.w[i] * p[i];
      const Index m = std::abs(i - j);
      if (i > j) {
        t_up += wp * nup[m];
        conv += wp * kd_up[m];
      } else if (i < j) {
        t_dn += wp * num[m];
        conv += wp * kd_dn[m];
      } else {  // node cell straddles z = y: half on each side
        t_up += 0.5 * wp * (nup[0] - num[0]);
        conv += 0.5 * wp * (kd_up[0] + kd_dn[0]);
      }
    }
    out.T[j] = t_up - t_dn;
    out.J[j] = conv / g.y[j] - out.lambda_tot * p[j];
  }
  return out;
}

namespace {

struct MarchOut {
  std::vector<Array> slices;
  std::vector<Real> times, masses, leaks;
};

}  // namespace

DensityField solve_density(const ProcessModel& m, Real t, const PideConfig& cfg) {
  if (!(t > cfg.t_boot))
    throw std::invalid_argument("solve_density: horizon must exceed the bootstrap time");
  const ReversedModel rev = reverse_triplet(m, t);
  const SpaceGrid g = SpaceGrid::geometric(cfg.y_min, cfg.y_max, cfg.n_grid);
  const Index n = g.size();

  const Array samples = bootstrap_samples(rev, cfg);
  DensityEstimate kde = estimate_density(samples, g.y);
  Array p = kde.p;
  p[0] = p[n - 1] = 0;

  DensityField out;
  out.y = g.y;
  out.heuristic_regime = c_vanishes(rev, cfg.t_boot, t);

  const Real mass0 = g.mass(p);
  if (!(mass0 > 0.5))
    throw std::runtime_error("solve_density: bootstrap mass " + std::to_string(mass0) +
                             " — grid does not cover the starting law");

  const bool levy = rev.is_levy();
  LocalDensityOp local;
  JumpOp jop;
  if (levy) {
    local = detail::assemble_local_density(g, rev.a_bar(0), rev.c_bar(0));
    jop = detail::build_jump_op(rev.jumps_bar(0), g, cfg.eps_cutoff, cfg.jump_nodes_per_sign);
  }

  MarchOut mo;
  Real leak = 0, u = cfg.t_boot;
  mo.slices.push_back(p);
  mo.times.push_back(u);
  mo.masses.push_back(mass0);
  mo.leaks.push_back(leak);

  const Index n_checkpoints = std::max<Index>(cfg.store_slices, 2);
  Index next_cp = 1;
  auto cp_time = [&](Index k) { return cfg.t_boot + (t - cfg.t_boot) * k / (n_checkpoints - 1); };

  Array jout(n), lp(n);
  const Real theta = cfg.theta;
  while (u < t - 1e-12) {
    Real dt_try = std::min(cfg.dt, t - u);
    int halvings = 0;
    for (;;) {
      if (!levy) {
        local = detail::assemble_local_density(g, rev.a_bar(u + dt_try), rev.c_bar(u + dt_try));
        jop = detail::build_jump_op(rev.jumps_bar(u), g, cfg.eps_cutoff, cfg.jump_nodes_per_sign);
      }
      const int nsub =
          jop.active ? std::max(1, static_cast<int>(std::ceil(jop.lambda * dt_try / 0.5))) : 1;
      const Real h = dt_try / nsub;
      Array pp = p;
      Real leak_inc = 0, clip_inc = 0;
      Index clips = 0;
      for (int sub = 0; sub < nsub; ++sub) {
        jop.apply_density(g, pp, jout);
        const Real offg = jop.offgrid_rate(g, pp);
        Array rhs = pp + h * jout;
        if (theta < 1) {
          lp = local.apply(pp);
          rhs += h * (1 - theta) * lp;
          leak_inc += h * (1 - theta) * local.boundary_outflow_rate(pp);
        }
        Array pn = implicit_solve(local, h * theta, std::move(rhs), 0.0, 0.0);
        leak_inc += h * theta * local.boundary_outflow_rate(pn) + h * offg;
        for (Index j = 0; j < n; ++j)
          if (pn[j] < 0) {
            clip_inc += -pn[j] * g.w[j];
            pn[j] = 0;
            ++clips;
          }
        leak_inc += clip_inc;
        pp = std::move(pn);
      }
      const Real before = g.mass(p) + leak;
      const Real after = g.mass(pp) + leak + leak_inc;
      const Real drift_rate = std::abs(after - before) / dt_try;
      if (drift_rate <= cfg.mass_rate_tol || dt_try <= 1e-15) {
        p = std::move(pp);
        leak += leak_inc;
        out.clip_count += clips;
        out.clip_mass += clip_inc;
        u += dt_try;
        break;
      }
      ++out.rejected_steps;
      if (++halvings > cfg.max_halvings)
        throw std::runtime_error("solve_density: mass drift " + std::to_string(drift_rate) +
                                 " per unit time persists at the minimum step");
      dt_try *= 0.5;
    }
    if (next_cp + 1 < n_checkpoints && u >= cp_time(next_cp) - 1e-12) {
      mo.slices.push_back(p);
      mo.times.push_back(u);
      mo.masses.push_back(g.mass(p));
      mo.leaks.push_back(leak);
      while (next_cp + 1 < n_checkpoints && u >= cp_time(next_cp) - 1e-12) ++next_cp;
    }
  }
  mo.slices.push_back(p);
  mo.times.push_back(t);
  mo.masses.push_back(g.mass(p));
  mo.leaks.push_back(leak);

  const Index ns = static_cast<Index>(mo.slices.size());
  out.times.resize(ns);
  out.mass.resize(ns);
  out.leak.resize(ns);
  out.p.resize(ns, n);
  for (Index i = 0; i < ns; ++i) {
    out.times[i] = mo.times[i];
    out.mass[i] = mo.masses[i];
    out.leak[i] = mo.leaks[i];
    out.p.row(i) = mo.slices[i].matrix().transpose();
  }
  return out;
}

CdfField solve_cdf(const ProcessModel& m, Real t, const PideConfig& cfg) {
  if (!(t > cfg.t_boot))
    throw std::invalid_argument("solve_cdf: horizon must exceed the bootstrap time");
  const ReversedModel rev = reverse_triplet(m, t);
  const SpaceGrid g = SpaceGrid::geometric(cfg.y_min, cfg.y_max, cfg.n_grid);
  const Index n = g.size();

  // starting slice: empirical cdf of the bootstrap samples at the grid nodes
  Array samples = bootstrap_samples(rev, cfg);
  std::sort(samples.data(), samples.data() + samples.size());
  Array F(n);
  for (Index j = 0; j < n; ++j) {
    const Real* lo = samples.data();
    F[j] = static_cast<Real>(std::upper_bound(lo, lo + samples.size(), g.y[j]) - lo) /
           samples.size();
  }
  F[0] = 0;
  F[n - 1] = 1;

  CdfField out;
  out.y = g.y;
  out.heuristic_regime = c_vanishes(rev, cfg.t_boot, t);

  const bool levy = rev.is_levy();
  LocalCdfOp local;
  JumpOp jop;
  auto assemble = [&](Real u_impl, Real u_expl) {
    jop = detail::build_jump_op(rev.jumps_bar(u_expl), g, cfg.eps_cutoff, cfg.jump_nodes_per_sign);
    const Real r0 = rev.a_bar(u_impl) - jop.comp;  // compensator folded into advection
    local = detail::assemble_local_cdf(g, r0, rev.c_bar(u_impl));
  };
  if (levy) assemble(0, 0);

  std::vector<Array> slices;
  std::vector<Real> times;
  slices.push_back(F);
  times.push_back(cfg.t_boot);

  const Index n_checkpoints = std::max<Index>(cfg.store_slices, 2);
  Index next_cp = 1;
  auto cp_time = [&](Index k) { return cfg.t_boot + (t - cfg.t_boot) * k / (n_checkpoints - 1); };

  Array jout(n);
  const Real theta = cfg.theta;
  Real u = cfg.t_boot;
  while (u < t - 1e-12) {
    const Real dt_try = std::min(cfg.dt, t - u);
    if (!levy) assemble(u + dt_try, u);
    const int nsub =
        jop.active ? std::max(1, static_cast<int>(std::ceil(jop.lambda * dt_try / 0.5))) : 1;
    const Real h = dt_try / nsub;
    for (int sub = 0; sub < nsub; ++sub) {
      jop.apply_cdf(F, jout);
      Array rhs = F + h * jout;
      if (theta < 1) rhs += h * (1 - theta) * local.apply(F);
      F = implicit_solve(local, h * theta, std::move(rhs), 0.0, 1.0);
    }
    u += dt_try;
    if (next_cp + 1 < n_checkpoints && u >= cp_time(next_cp) - 1e-12) {
      slices.push_back(F);
      times.push_back(u);
      while (next_cp + 1 < n_checkpoints && u >= cp_time(next_cp) - 1e-12) ++next_cp;
    }
  }
  slices.push_back(F);
  times.push_back(t);

  const Index ns = static_cast<Index>(slices.size());
  out.times.resize(ns);
  out.F.resize(ns, n);
  for (Index i = 0; i < ns; ++i) {
    out.times[i] = times[i];
    Array s = slices[i];
    for (Index j = 0; j < n; ++j) s[j] = std::clamp(s[j], 0.0, 1.0);
    out.max_projection = std::max(out.max_projection, isotonic_project(s));
    out.F.row(i) = s.matrix().transpose();
  }
  return out;
}

Real isotonic_project(Array& f) {
  // pool adjacent violators with unit weights
  const Index n = f.size();
  std::vector<Real> level(n), weight(n);
  std::vector<Index> count(n);
  Index m = 0;
  const Array orig = f;
  for (Index i = 0; i < n; ++i) {
    level[m] = f[i];
    weight[m] = 1;
    count[m] = 1;
    ++m;
    while (m > 1 && level[m - 2] > level[m - 1]) {
      const Real w = weight[m - 2] + weight[m - 1];
      level[m - 2] = (weight[m - 2] * level[m - 2] + weight[m - 1] * level[m - 1]) / w;
      weight[m - 2] = w;
      count[m - 2] += count[m - 1];
      --m;
    }
  }
  Index pos = 0;
  for (Index blk = 0; blk < m; ++blk)
    for (Index r = 0; r < count[blk]; ++r) f[pos++] = level[blk];
  Real max_adj = 0;
  for (Index i = 0; i < n; ++i) max_adj = std::max(max_adj, std::abs(f[i] - orig[i]));
  return max_adj;
}

}  // namespace expfun
