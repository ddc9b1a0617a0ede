#include <cmath>

#include "doctest.h"
#include "expfun/detail/operators.hpp"
#include "expfun/pide.hpp"

using namespace expfun;

namespace {

constexpr Real kSigma = 0.3;

// smooth strictly positive test density with fast tails
Real bump(Real y) {
  const Real z = std::log(y) / kSigma;
  return std::exp(-0.5 * z * z) / (y * kSigma * std::sqrt(2 * M_PI));
}

// 5-point first derivative, O(h^4)
template <class F>
Real d1(F&& f, Real y, Real h) {
  return (-f(y + 2 * h) + 8 * f(y + h) - 8 * f(y - h) + f(y - 2 * h)) / (12 * h);
}

// 5-point second derivative, O(h^4)
template <class F>
Real d2(F&& f, Real y, Real h) {
  return (-f(y + 2 * h) + 16 * f(y + h) - 30 * f(y) + 16 * f(y - h) - f(y - 2 * h)) /
         (12 * h * h);
}

// local part of the density equation at a point, from analytic derivatives:
// (c/2) (y^2 p)'' - ((a y + 1) p)'
Real local_rhs_exact(Real y, Real a, Real c) {
  const Real h = 2e-3 * y;
  const Real diff = 0.5 * c * d2([](Real z) { return z * z * bump(z); }, y, h);
  const Real adv = d1([a](Real z) { return (a * z + 1) * bump(z); }, y, h);
  return diff - adv;
}

}  // namespace

TEST_CASE("local operator converges at second order to the analytic right side") {
  ProcessModel m;
  m.b = 1.5;
  m.c = 1.0;
  const ReversedModel rev = reverse_triplet(m, 1.0);
  const Real a = rev.a_bar(0.5);
  REQUIRE(a == doctest::Approx(-1.0));

  Real err[2];
  Index ns[2] = {512, 1024};
  for (int r = 0; r < 2; ++r) {
    const SpaceGrid g = SpaceGrid::geometric(0.05, 20.0, ns[r]);
    Array p(g.size());
    for (Index j = 0; j < g.size(); ++j) p[j] = bump(g.y[j]);
    const Array rhs = apply_rhs(rev, 0.5, g, p);
    CHECK(rhs[0] == 0.0);
    CHECK(rhs[g.size() - 1] == 0.0);
    Real sup = 0;
    for (Index j = 2; j + 3 < g.size(); ++j)
      sup = std::max(sup, std::abs(rhs[j] - local_rhs_exact(g.y[j], a, 1.0)));
    err[r] = sup;
  }
  CHECK(err[0] < 1.0);
  CHECK(err[0] / err[1] > 3.0);  // second order: halving h quarters the error
}

TEST_CASE("tail primitive matches its closed form for a one-sided power tail") {
  // nu+(v) = e^{-mu v}/mu turns the primitive into (y^mu/mu) ∫_y^∞ p z^-mu dz
  const Real mu = 3;
  const JumpMeasure K = JumpMeasure::exponential_positive(mu);
  Array pts(3);
  pts << 0.5, 1.0, 2.0;
  const TailJump tj = apply_jump_tail_form(K, pts, bump);
  CHECK(tj.lambda_tot == doctest::Approx(1.0 / mu).epsilon(1e-9));
  for (Index i = 0; i < pts.size(); ++i) {
    const Real y = pts[i];
    const Real closed = std::pow(y, mu) / mu *
                        integrate_adaptive([mu](Real z) { return bump(z) * std::pow(z, -mu); },
                                           y, 25.0, 1e-13);
    CHECK(tj.T[i] == doctest::Approx(closed).epsilon(1e-8));
  }
}

TEST_CASE("displacement form and tail form of the jump operator agree") {
  auto check_measure = [](const JumpMeasure& K) {
    Array pts(3);
    pts << 0.5, 1.0, 2.0;
    const TailJump tj = apply_jump_tail_form(K, pts, bump);
    for (Index i = 0; i < pts.size(); ++i) {
      const Real direct = apply_jump_direct_point(K, pts[i], bump);
      CHECK(tj.J[i] == doctest::Approx(direct).epsilon(1e-6));
    }
  };
  check_measure(JumpMeasure::exponential_positive(2));
  check_measure(JumpMeasure::exponential_positive(3));
  check_measure(JumpMeasure::double_exponential(0.5, 2, 3));
}

TEST_CASE("compensator folding: two routes to the full right side coincide") {
  ProcessModel m;
  m.b = 1.0;
  m.c = 0.5;
  m.jumps = JumpMeasure::double_exponential(0.5, 2, 3);
  const Real a = compute_a(m, 0), r0 = compute_r0(m, 0);
  const Real comp = a - r0;  // ∫ (e^{-x}-1) K
  const JumpMeasure& K = m.jumps.at(0);
  {
    const TailQuad q = K.integrate([](Real x) { return em1(x); }, 0);
    REQUIRE(!q.diverged);
    REQUIRE(comp == doctest::Approx(q.value).epsilon(1e-10));
  }
  Array pts(3);
  pts << 0.6, 1.0, 1.7;
  const TailJump tj = apply_jump_tail_form(K, pts, bump);
  for (Index i = 0; i < pts.size(); ++i) {
    const Real y = pts[i];
    const Real h = 2e-3 * y;
    const Real direct = apply_jump_direct_point(K, y, bump);
    const Real dyp = d1([](Real z) { return z * bump(z); }, y, h);
    const Real route_a = local_rhs_exact(y, a, 0.5) + direct + comp * dyp;
    const Real route_r = local_rhs_exact(y, r0, 0.5) + tj.J[i];
    CHECK(route_a == doctest::Approx(route_r).epsilon(1e-6));
  }
}

TEST_CASE("grid jump operator tracks the adaptive point evaluation") {
  const JumpMeasure K = JumpMeasure::exponential_positive(2);
  const SpaceGrid g = SpaceGrid::geometric(1e-3, 1e3, 2048);
  Array p(g.size());
  for (Index j = 0; j < g.size(); ++j) p[j] = bump(g.y[j]);
  const detail::JumpOp op = detail::build_jump_op(K, g, 1e-3, 256);
  REQUIRE(op.active);
  Array out(g.size());
  op.apply_density(g, p, out);
  for (Real y : {0.5, 1.0, 2.0}) {
    Index j = 0;
    while (g.y[j + 1] < y) ++j;
    if (std::abs(g.y[j + 1] - y) < std::abs(g.y[j] - y)) ++j;
    const Real yj = g.y[j];
    const Real direct = apply_jump_direct_point(K, yj, bump, 1e-3);
    const Real dyp = d1([](Real z) { return z * bump(z); }, yj, 2e-3 * yj);
    const Real ref = direct + op.comp * dyp;
    CHECK(out[j] == doctest::Approx(ref).epsilon(5e-3));
  }
  // wide grid: only the farthest quadrature nodes push mass outside
  CHECK(op.offgrid_rate(g, p) < 1e-5);
  const SpaceGrid narrow = SpaceGrid::geometric(0.5, 2.0, 64);
  Array pn(narrow.size());
  for (Index j = 0; j < narrow.size(); ++j) pn[j] = bump(narrow.y[j]);
  const detail::JumpOp opn = detail::build_jump_op(K, narrow, 1e-3, 256);
  CHECK(opn.offgrid_rate(narrow, pn) > 1e-3);
}

TEST_CASE("grid tail form tracks the adaptive tail form") {
  const JumpMeasure K = JumpMeasure::double_exponential(0.5, 2, 3);
  const SpaceGrid g = SpaceGrid::geometric(1e-3, 1e3, 2048);
  Array p(g.size());
  for (Index j = 0; j < g.size(); ++j) p[j] = bump(g.y[j]);
  const TailJump grid_tj = apply_jump_tail_form_grid(K, g, p);
  Array pts(3);
  Index idx[3];
  int c = 0;
  for (Real y : {0.5, 1.0, 2.0}) {
    Index j = 0;
    while (g.y[j + 1] < y) ++j;
    idx[c] = j;
    pts[c++] = g.y[j];
  }
  const TailJump tj = apply_jump_tail_form(K, pts, bump);
  for (int i = 0; i < 3; ++i) {
    CHECK(grid_tj.T[idx[i]] == doctest::Approx(tj.T[i]).epsilon(2e-3));
    CHECK(grid_tj.J[idx[i]] == doctest::Approx(tj.J[i]).epsilon(2e-2));
  }
}

TEST_CASE("density march conserves mass plus accounted leak") {
  ProcessModel m;
  m.b = 1.0;
  m.c = 1.0;
  PideConfig cfg;
  cfg.n_grid = 512;
  cfg.boot_paths = 20000;
  cfg.dt = 1e-3;
  const DensityField f = solve_density(m, 2.0, cfg);
  CHECK(!f.heuristic_regime);
  CHECK(f.rejected_steps == 0);
  CHECK(f.times.size() == cfg.store_slices);
  CHECK(f.times[0] == doctest::Approx(cfg.t_boot));
  CHECK(f.final_time() == 2.0);
  for (Index i = 1; i < f.times.size(); ++i) CHECK(f.times[i] > f.times[i - 1]);
  const Real m0 = f.mass[0] + f.leak[0];
  for (Index i = 0; i < f.mass.size(); ++i)
    CHECK(std::abs(f.mass[i] + f.leak[i] - m0) < 1e-3 * (f.times[i] - f.times[0] + 0.1));
  CHECK(f.mass[f.mass.size() - 1] == doctest::Approx(1.0).epsilon(0.02));
  CHECK((f.final_slice() >= 0).all());
}

TEST_CASE("density march with jumps stays conservative and positive") {
  ProcessModel m;
  m.b = 1.0;
  m.c = 0.5;
  m.jumps = JumpMeasure::exponential_positive(2);
  PideConfig cfg;
  cfg.n_grid = 512;
  cfg.boot_paths = 20000;
  const DensityField f = solve_density(m, 1.0, cfg);
  CHECK(f.rejected_steps == 0);
  CHECK(f.clip_mass < 1e-6);
  const Real m0 = f.mass[0] + f.leak[0];
  const Real m1 = f.mass[f.mass.size() - 1] + f.leak[f.leak.size() - 1];
  CHECK(std::abs(m1 - m0) < 1e-3);
}

TEST_CASE("cumulative solve produces monotone slices pinned to 0 and 1") {
  ProcessModel m;
  m.b = 1.5;
  m.c = 1.0;
  PideConfig cfg;
  cfg.n_grid = 512;
  cfg.boot_paths = 20000;
  const CdfField f = solve_cdf(m, 1.0, cfg);
  CHECK(!f.heuristic_regime);
  CHECK(f.rejected_steps == 0);
  CHECK(f.times[0] == doctest::Approx(cfg.t_boot));
  CHECK(f.times[f.times.size() - 1] == 1.0);
  CHECK(f.max_projection < 1e-6);
  for (Index s = 0; s < f.F.rows(); ++s) {
    CHECK(f.F(s, 0) == 0.0);
    CHECK(f.F(s, f.F.cols() - 1) == 1.0);
    for (Index j = 1; j < f.F.cols(); ++j) CHECK(f.F(s, j) >= f.F(s, j - 1));
  }
}

TEST_CASE("cumulative solve agrees with the integrated density solve") {
  ProcessModel m;
  m.b = 1.5;
  m.c = 1.0;
  PideConfig cfg;
  cfg.n_grid = 512;
  cfg.boot_paths = 40000;
  const DensityField fd = solve_density(m, 1.0, cfg);
  const CdfField fc = solve_cdf(m, 1.0, cfg);
  const Array p = fd.final_slice();
  Array cum(p.size());
  Real acc = 0;
  cum[0] = 0;
  for (Index j = 1; j < p.size(); ++j) {
    acc += 0.5 * (p[j] + p[j - 1]) * (fd.y[j] - fd.y[j - 1]);
    cum[j] = acc;
  }
  Real sup = 0;
  for (Index j = 0; j < p.size(); ++j)
    sup = std::max(sup, std::abs(cum[j] - fc.final_slice()[j]));
  CHECK(sup < 1e-2);
}

TEST_CASE("vanishing diffusion is flagged as outside the certified regime") {
  ProcessModel m;
  m.b = 1.0;
  m.c = 0.0;
  PideConfig cfg;
  cfg.n_grid = 256;
  cfg.boot_paths = 5000;
  const DensityField f = solve_density(m, 0.5, cfg);
  CHECK(f.heuristic_regime);
}

TEST_CASE("step rejection halves dt and eventually gives up") {
  ProcessModel m;
  m.b = 1.0;
  m.c = 0.5;
  m.jumps = JumpMeasure::exponential_positive(2);
  PideConfig cfg;
  cfg.n_grid = 256;
  cfg.boot_paths = 2000;
  cfg.mass_rate_tol = 1e-18;  // unattainable: every step is rejected
  cfg.max_halvings = 2;
  CHECK_THROWS_AS(solve_density(m, 0.2, cfg), std::runtime_error);
}

TEST_CASE("pool-adjacent-violators projection") {
  Array f(4);
  f << 1, 3, 2, 4;
  const Real adj = isotonic_project(f);
  CHECK(adj == doctest::Approx(0.5));
  CHECK(f[0] == doctest::Approx(1.0));
  CHECK(f[1] == doctest::Approx(2.5));
  CHECK(f[2] == doctest::Approx(2.5));
  CHECK(f[3] == doctest::Approx(4.0));

  Array mono(5);
  mono << 0, 0.1, 0.4, 0.9, 1.0;
  CHECK(isotonic_project(mono) == 0.0);
  CHECK(mono[2] == doctest::Approx(0.4));
}
