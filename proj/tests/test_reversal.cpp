#include "doctest.h"
#include "expfun/mc_engine.hpp"
#include "expfun/reversal.hpp"

using namespace expfun;

namespace {

ProcessModel linear_drift_model() {
  ProcessModel m;
  m.b = Profile::linear(1, 1);  // b_s = 1 + s
  m.c = 1.0;
  return m;
}

}  // namespace

TEST_CASE("reversed coefficients mirror the originals with the endpoint pinned") {
  const ReversedModel rev = reverse_triplet(linear_drift_model(), 1.0);
  // b~_u = b_{t-u} on u < t
  CHECK(rev.b(0.0) == doctest::Approx(2.0));
  CHECK(rev.b(0.3) == doctest::Approx(1.7));
  CHECK(rev.b(0.999) == doctest::Approx(1.001));
  // at u = t the value is the base endpoint, not the left limit
  CHECK(rev.b(1.0) == doctest::Approx(2.0));
  CHECK(rev.c(0.5) == doctest::Approx(1.0));

  // left-limit accessors keep approaching b_0 at the horizon
  CHECK(rev.c_bar(1.0) == doctest::Approx(1.0));
}

TEST_CASE("piecewise coefficients: accessor vs left limit at the horizon") {
  ProcessModel m;
  m.b = 0.0;
  m.c = Profile::piecewise({{0.0, 1.0}, {0.5, 0.25}});
  const ReversedModel rev = reverse_triplet(m, 1.0);
  CHECK(rev.c(0.4) == doctest::Approx(0.25));  // c_{0.6}
  CHECK(rev.c(0.6) == doctest::Approx(1.0));   // c_{0.4}
  // endpoint: accessor reads c_t = 0.25, the marching left limit reads c_0 = 1
  CHECK(rev.c(1.0) == doctest::Approx(0.25));
  CHECK(rev.c_bar(1.0) == doctest::Approx(1.0));
}

TEST_CASE("double reversal restores the original profiles on (0, t]") {
  // u = 0 is excluded: the once-reversed profile pins its endpoint to the
  // base value at t, so the second reversal reads that pin at u = 0
  const ProcessModel m = linear_drift_model();
  const ReversedModel once = reverse_triplet(m, 1.0);
  const ReversedModel twice = reverse_triplet(once.model(), 1.0);
  for (Real u : {0.1, 0.37, 0.5, 0.81, 0.99, 1.0}) {
    CHECK(twice.b(u) == doctest::Approx(m.b(u)).epsilon(1e-12));
    CHECK(twice.c(u) == doctest::Approx(m.c(u)).epsilon(1e-12));
  }
}

TEST_CASE("time-homogeneous models are reversal-invariant") {
  ProcessModel m;
  m.b = 1.5;
  m.c = 1.0;
  m.jumps = JumpMeasure::exponential_positive(2);
  const ReversedModel rev = reverse_triplet(m, 2.0);
  CHECK(rev.is_levy());
  for (Real u : {0.0, 0.7, 2.0}) {
    CHECK(rev.b(u) == doctest::Approx(1.5));
    CHECK(rev.c(u) == doctest::Approx(1.0));
    CHECK(rev.jumps(u).mass_above(0) == doctest::Approx(0.5));
  }
  // a~ equals the forward compensator drift everywhere
  CHECK(rev.a_bar(0.0) == doctest::Approx(compute_a(m, 0)).epsilon(1e-12));
  CHECK(rev.a_bar(1.3) == doctest::Approx(compute_a(m, 0)).epsilon(1e-12));
}

TEST_CASE("reversed compensator drift reads the base at the mirrored time") {
  const ProcessModel m = linear_drift_model();
  const ReversedModel rev = reverse_triplet(m, 1.0);
  // a_s = -(1+s) + 1/2
  CHECK(rev.a_bar(0.25) == doctest::Approx(-(1 + 0.75) + 0.5).epsilon(1e-12));
  CHECK(rev.a_bar(0.75) == doctest::Approx(-(1 + 0.25) + 0.5).epsilon(1e-12));
  // left limit at the horizon reads the base at s = 0 where b = 1
  CHECK(rev.a_bar(1.0) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("test-function certification enforces the vanishing conditions") {
  const TestFunction w = weighted_exp_test_function(1.0);
  CHECK(w.certified);
  CHECK(w.f(0) == doctest::Approx(0.0));
  // numeric derivative matches the registered one
  const Real h = 1e-6;
  for (Real y : {0.3, 1.0, 4.0}) {
    CHECK(w.df(y) == doctest::Approx((w.f(y + h) - w.f(y - h)) / (2 * h)).epsilon(1e-7));
    CHECK(w.d2f(y) == doctest::Approx((w.df(y + h) - w.df(y - h)) / (2 * h)).epsilon(1e-6));
  }
  CHECK(w.sup_f <= 1.0 + 1e-12);

  // f(0) != 0 is rejected
  const TestFunction bad = certify_test_function(
      [](Real) { return 1.0; }, [](Real) { return 0.0; }, [](Real) { return 0.0; });
  CHECK(!bad.certified);

  // unbounded y f' is rejected (f = y^2 grows too fast)
  const TestFunction quad = certify_test_function(
      [](Real y) { return y * y; }, [](Real y) { return 2 * y; }, [](Real) { return 2.0; });
  CHECK(!quad.certified);
}

TEST_CASE("generator on the Brownian model has a root at a balance point") {
  ProcessModel m;
  m.b = 1.5;
  m.c = 1.0;
  const ReversedModel rev = reverse_triplet(m, 1.0);
  const TestFunction w = weighted_exp_test_function(1.0);
  // a~ = -1, so (1 + y a~) f' vanishes at y = 1 and f''(1) = 0 for lambda = 1
  CHECK(generator_apply(rev, w, 0.5, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  // small-y limit: A f -> f'(0) * 1 = 0 for this class
  CHECK(std::abs(generator_apply(rev, w, 0.5, 1e-5)) < 1e-4);

  // uncertified functions are refused
  TestFunction bad = w;
  bad.certified = false;
  CHECK_THROWS_AS(generator_apply(rev, bad, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(generator_apply(rev, w, 0.5, -1.0), std::domain_error);
}

TEST_CASE("generator is linear in the test function") {
  ProcessModel m;
  m.b = 1.0;
  m.c = 0.5;
  m.jumps = JumpMeasure::double_exponential(0.5, 2, 3);
  const ReversedModel rev = reverse_triplet(m, 1.0);
  const TestFunction f1 = weighted_exp_test_function(0.7);
  const TestFunction f2 = weighted_exp_test_function(2.0);
  const Real al = 0.6, be = -1.3;
  const TestFunction combo = certify_test_function(
      [=](Real y) { return al * f1.f(y) + be * f2.f(y); },
      [=](Real y) { return al * f1.df(y) + be * f2.df(y); },
      [=](Real y) { return al * f1.d2f(y) + be * f2.d2f(y); });
  REQUIRE(combo.certified);
  for (Real y : {0.4, 1.0, 2.7}) {
    const Real lhs = generator_apply(rev, combo, 0.3, y);
    const Real rhs =
        al * generator_apply(rev, f1, 0.3, y) + be * generator_apply(rev, f2, 0.3, y);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("generator jump term agrees with an independent quadrature") {
  ProcessModel m;
  m.b = 0.5;
  m.c = 0.25;
  m.jumps = JumpMeasure::exponential_positive(2);
  const ReversedModel rev = reverse_triplet(m, 1.0);
  const TestFunction w = weighted_exp_test_function(1.3);
  const Real y = 1.4, u = 0.2;

  const Real a = rev.a_bar(u);
  const Real local = (1 + y * a) * w.df(y) + 0.5 * rev.c_bar(u) * y * y * w.d2f(y);
  const Real jump = integrate_adaptive(
      [&](Real x) {
        return (w.f(y * std::exp(-x)) - w.f(y) - w.df(y) * y * (std::exp(-x) - 1)) *
               std::exp(-2 * x);
      },
      1e-10, 40.0);
  CHECK(generator_apply(rev, w, u, y) == doctest::Approx(local + jump).epsilon(1e-8));
}

TEST_CASE("deterministic pure-drift paths satisfy the Dynkin identity exactly") {
  ProcessModel m;
  m.b = 0.0;
  m.c = 0.0;
  const ReversedModel rev = reverse_triplet(m, 1.0);
  McConfig cfg;
  cfg.n_paths = 8;
  cfg.dt = 1e-3;
  const VSdeResult v = simulate_V_sde(rev, cfg);
  CHECK(v.n_clamped == 0);
  const TestFunction w = weighted_exp_test_function(1.0);
  const DynkinResult r = dynkin_check(rev, w, 1.0, v.batch);
  CHECK(r.n_paths == 8);
  CHECK(r.se == doctest::Approx(0.0).epsilon(1e-12));
  // V_u = u and A f = f'(u): the residual is pure trapezoid error
  CHECK(r.residual < 1e-6);
}

TEST_CASE("dynkin check rejects wrong batches and off-mesh times") {
  ProcessModel m;
  m.b = 1.5;
  m.c = 1.0;
  const ReversedModel rev = reverse_triplet(m, 1.0);
  McConfig cfg;
  cfg.n_paths = 16;
  cfg.dt = 0.01;
  const VSdeResult v = simulate_V_sde(rev, cfg);
  const TestFunction w = weighted_exp_test_function(1.0);
  CHECK_THROWS_AS(dynkin_check(rev, w, 0.005, v.batch), std::domain_error);

  PathBatch wrong = simulate_exp_functional(m, 1.0, cfg);
  CHECK_THROWS_AS(dynkin_check(rev, w, 1.0, wrong), std::invalid_argument);
}
