#pragma once

// Processes with independent increments described by the untruncated
// characteristic triplet (b_s, c_s, K_s): drift, Gaussian variance and jump
// measure profiles.  The compensator integrand convention is
// e^{i l x} - 1 - i l x, i.e. jumps are compensated by their full mean, which
// requires K to integrate |x| near infinity (guaranteed by the exponential
// moment condition checked in validate_model).

#include <string>
#include <vector>

#include "expfun/jump_measure.hpp"
#include "expfun/profile.hpp"

namespace expfun {

class JumpProfile {
 public:
  JumpProfile() : constant_(JumpMeasure::none()) {}
  JumpProfile(JumpMeasure k) : constant_(std::move(k)) {}  // implicit on purpose
  static JumpProfile callable(std::function<JumpMeasure(Real)> f) {
    JumpProfile p;
    p.is_constant_ = false;
    p.fn_ = std::move(f);
    return p;
  }

  bool is_constant() const { return is_constant_; }
  const JumpMeasure& at(Real s) const {
    if (is_constant_) return constant_;
    if (!(cache_s_ == s)) {
      cache_ = fn_(s);
      cache_s_ = s;
    }
    return cache_;
  }

 private:
  bool is_constant_ = true;
  JumpMeasure constant_;
  std::function<JumpMeasure(Real)> fn_;
  mutable JumpMeasure cache_;
  mutable Real cache_s_ = kNaN;
};

struct ProcessModel {
  Profile b;
  Profile c;
  JumpProfile jumps;

  bool is_levy() const { return b.is_constant() && c.is_constant() && jumps.is_constant(); }
};

struct ValidationReport {
  bool ok = false;
  bool c_ok = false;          // c_s finite and >= 0 on probe times
  bool rt1_ok = false;        // ∫∫ (x^2 ∧ 1) K_s(dx) ds < ∞
  bool rt11_ok = false;       // ∫∫_{|x|>1} e^{|x|} K_s(dx) ds < ∞
  Real rt1_value = kNaN;
  Real rt11_value = kNaN;
  std::vector<std::string> messages;
};

// integrability / sanity gate over [0, horizon]
ValidationReport validate_model(const ProcessModel& m, Real horizon, int time_nodes = 33);

// a_s = -b_s + c_s/2 + ∫ (e^{-x} - 1 + x) K_s(dx); drives E e^{-X_s} and the
// drift of the reversed-functional dynamics
Real compute_a(const ProcessModel& m, Real s);

// r0_s = a_s - ∫ (e^{-x} - 1) K_s(dx) = -b_s + c_s/2 + ∫ x K_s(dx); the
// advective coefficient once the jump compensator is folded in
Real compute_r0(const ProcessModel& m, Real s);

struct SmoothnessReport {
  bool gaussian_active = false;   // ∫_0^horizon c_s ds > 0
  bool exp_moment_ok = false;     // ∫_{z<-1} e^{-pz} K_s(dz) < ∞ up to p_max
  bool support_bounded = false;   // some A has K_s((A,∞)) = 0 for all s
  Real p_max = 0;
  bool all() const { return gaussian_active && exp_moment_ok && support_bounded; }
};

// sufficient conditions for the law of the exponential functional to admit a
// smooth density; for time-dependent triplets each condition is checked at
// probe times over [0, horizon]
SmoothnessReport check_smoothness_conditions(const ProcessModel& m, Real p_max = 10,
                                             Real horizon = 1, int time_nodes = 17);

}  // namespace expfun
