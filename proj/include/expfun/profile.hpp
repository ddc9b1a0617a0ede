#pragma once

// Scalar coefficient profiles s -> value on [0, horizon].  Constant, linear,
// piecewise-constant (left-continuous with jumps at breakpoints), or an
// arbitrary callable.

#include <functional>
#include <utility>
#include <vector>

#include "expfun/common.hpp"

namespace expfun {

class Profile {
 public:
  Profile() : Profile(0.0) {}
  Profile(Real v) : kind_(Kind::constant), c0_(v) {}  // implicit on purpose

  static Profile constant(Real v) { return Profile(v); }
  static Profile linear(Real intercept, Real slope) {
    Profile p(intercept);
    p.kind_ = Kind::linear;
    p.c1_ = slope;
    return p;
  }
  // value breaks[i].second on [breaks[i].first, breaks[i+1].first)
  static Profile piecewise(std::vector<std::pair<Real, Real>> breaks) {
    if (breaks.empty()) throw std::invalid_argument("profile: piecewise needs breakpoints");
    for (size_t i = 1; i < breaks.size(); ++i)
      if (!(breaks[i].first > breaks[i - 1].first))
        throw std::invalid_argument("profile: piecewise breakpoints must increase");
    Profile p(0.0);
    p.kind_ = Kind::piecewise;
    p.breaks_ = std::move(breaks);
    return p;
  }
  static Profile callable(std::function<Real(Real)> f) {
    Profile p(0.0);
    p.kind_ = Kind::callable;
    p.fn_ = std::move(f);
    return p;
  }

  Real operator()(Real s) const {
    switch (kind_) {
      case Kind::constant:
        return c0_;
      case Kind::linear:
        return c0_ + c1_ * s;
      case Kind::piecewise: {
        Real v = breaks_.front().second;
        for (const auto& [pos, val] : breaks_) {
          if (s < pos) break;
          v = val;
        }
        return v;
      }
      case Kind::callable:
        return fn_(s);
    }
    return 0;
  }

  bool is_constant() const { return kind_ == Kind::constant; }
  Real constant_value() const { return c0_; }

 private:
  enum class Kind { constant, linear, piecewise, callable };
  Kind kind_;
  Real c0_ = 0, c1_ = 0;
  std::vector<std::pair<Real, Real>> breaks_;
  std::function<Real(Real)> fn_;
};

}  // namespace expfun
