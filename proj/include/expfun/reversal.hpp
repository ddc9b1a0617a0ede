#pragma once

// Time reversal of the triplet around a fixed horizon t, the reversed-
// functional generator, and a Dynkin-formula consistency check.
//
// For Y_u = X_t - X_{(t-u)-} the reversed triplet is
//   b~_u = b_{t-u} (u < t),  b~_t = b_t,   and likewise for c and K.
// The endpoint value at u = t carries the initial jump of the original
// profiles; weak-sense integrals over [0,t] never see it, so integrators use
// the left limit there (the endpoint is reachable only by direct evaluation).

#include "expfun/process_model.hpp"

namespace expfun {

struct PathBatch;  // mc_engine.hpp

class ReversedModel {
 public:
  ReversedModel(ProcessModel base, Real t_fix);

  Real t_fix() const { return t_fix_; }
  const ProcessModel& base() const { return base_; }
  // the reversed triplet as a plain model (profiles carry the endpoint rule)
  const ProcessModel& model() const { return reversed_; }

  Real b(Real u) const { return u < t_fix_ ? base_.b(t_fix_ - u) : base_.b(t_fix_); }
  Real c(Real u) const { return u < t_fix_ ? base_.c(t_fix_ - u) : base_.c(t_fix_); }
  const JumpMeasure& jumps(Real u) const {
    return base_.jumps.at(u < t_fix_ ? t_fix_ - u : t_fix_);
  }

  // drift of the reversed-functional dynamics at time u:
  // a~_u = -b~_u + c~_u/2 + ∫ (e^{-x}-1+x) K~_u(dx)
  Real a_bar(Real u) const;
  bool is_levy() const { return base_.is_levy(); }

  // left-limit accessors at the horizon (the u = t endpoint value is only
  // reachable through b()/c()/jumps(); integrators use these)
  Real c_bar(Real u) const { return base_.c(u >= t_fix_ ? 0.0 : t_fix_ - u); }
  const JumpMeasure& jumps_bar(Real u) const {
    return base_.jumps.at(u >= t_fix_ ? 0.0 : t_fix_ - u);
  }

 private:
  ProcessModel base_;
  Real t_fix_;
  ProcessModel reversed_;
  mutable Real a_cache_ = kNaN, a_cache_u_ = kNaN;
};

inline ReversedModel reverse_triplet(ProcessModel m, Real t_fix) {
  return ReversedModel(std::move(m), t_fix);
}

// C^2 functions vanishing to second order at 0 with bounded y f', y^2 f'';
// the class the Dynkin formula is certified for.  Certification is a finite
// probe: values on a log grid spanning [1e-6, 1e6] plus the origin.
struct TestFunction {
  std::function<Real(Real)> f, df, d2f;
  bool certified = false;
  Real sup_f = kNaN, sup_ydf = kNaN, sup_y2d2f = kNaN;
};

TestFunction certify_test_function(std::function<Real(Real)> f, std::function<Real(Real)> df,
                                   std::function<Real(Real)> d2f);

// f(y) = 1 - e^{-ly} - l y e^{-ly}; smooth, bounded, f(0) = f'(0) = 0
TestFunction weighted_exp_test_function(Real lambda);

// generator of the reversed functional V at time u applied to f at y > 0:
//   A f(y) = (1 + y a~_u) f'(y) + c~_u y^2 f''(y)/2
//          + ∫ [f(y e^{-x}) - f(y) - f'(y) y (e^{-x}-1)] K~_u(dx)
Real generator_apply(const ReversedModel& rev, const TestFunction& f, Real u, Real y);

struct DynkinResult {
  Real residual = kNaN;  // | mean of f(V_s) - ∫_0^s A f(V_u) du |
  Real se = kNaN;        // monte carlo standard error of that mean
  Index n_paths = 0;
};

// checks E f(V_s) = E ∫_0^s A f(V_u) du on a simulated batch of V paths;
// the batch mesh must contain s
DynkinResult dynkin_check(const ReversedModel& rev, const TestFunction& f, Real s,
                          const PathBatch& v_paths);

}  // namespace expfun
