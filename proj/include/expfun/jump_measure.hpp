#pragma once

// Lévy / jump measures K(dx) = k(x) dx on R \ {0}.  Supported families:
//   none                   no jumps
//   exponential_positive   k(x) = e^{-mu x},  x > 0
//   double_exponential     k(x) = w+ e^{-mu+ x} 1{x>0} + (1-w+) e^{mu- x} 1{x<0}
//   compound_poisson       intensity * (law of one jump); the jump law may be
//                          a point mass, so k(x) need not exist
//   tabulated              piecewise-linear density on a sorted node grid
//
// All families here have finite total mass; the eps-cutoff plumbing still
// matters because the simulation contract compensates dropped small jumps.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "expfun/common.hpp"
#include "expfun/quadrature.hpp"
#include "expfun/rng.hpp"

namespace expfun {

// one-jump law for compound_poisson
struct JumpDist {
  enum class Kind { constant, exponential, normal, uniform };
  Kind kind = Kind::constant;
  Real p1 = 0, p2 = 0;  // value | rate | mean,sd | lo,hi

  static JumpDist constant(Real v) { return {Kind::constant, v, 0}; }
  static JumpDist exponential(Real rate);
  static JumpDist normal(Real mean, Real sd);
  static JumpDist uniform(Real lo, Real hi);

  bool has_density() const { return kind != Kind::constant; }
  Real density(Real x) const;
  Real cdf(Real x) const;
  Real quantile(Real u) const;
  Real mean() const;
};

class JumpMeasure {
 public:
  enum class Kind { none, exponential_positive, double_exponential, compound_poisson, tabulated };

  JumpMeasure() = default;  // none

  static JumpMeasure none() { return JumpMeasure(); }
  static JumpMeasure exponential_positive(Real mu);
  static JumpMeasure double_exponential(Real w_plus, Real mu_plus, Real mu_minus);
  static JumpMeasure compound_poisson(Real intensity, JumpDist dist);
  static JumpMeasure tabulated(Array nodes, Array densities);

  Kind kind() const { return kind_; }
  bool is_none() const { return kind_ == Kind::none; }
  bool has_density() const;
  Real density(Real x) const;  // k(x); domain_error if the measure has an atom

  Real mass_above(Real eps) const;  // K({|x| > eps})
  Real mean_above(Real eps) const;  // ∫_{|x|>eps} x K(dx)
  Real var_below(Real eps) const;   // ∫_{|x|<=eps} x^2 K(dx)

  // upper/lower tail masses; domain_error for x <= 0
  Real nu_plus(Real x) const;   // K([x, ∞))
  Real nu_minus(Real x) const;  // K((-∞, -x])

  // ∫_{|x|>eps} fn(x) K(dx) with geometric tail growth and divergence
  // detection (meaningful for nonnegative integrands)
  TailQuad integrate(const std::function<Real(Real)>& fn, Real eps = 0) const;

  // draw one jump conditioned on |x| > eps; consumes one counter block
  Real sample(const CounterRng& rng, uint32_t path, uint32_t step, uint32_t channel,
              uint32_t index, Real eps) const;

  // fixed quadrature nodes (x_q, w_q) with w_q absorbing the Lévy density, so
  // ∫_{|x|>eps} fn dK ≈ Σ w_q fn(x_q); geometric panels, n_per_sign Gauss
  // nodes per sign, radius chosen so the neglected tail mass is ~1e-14
  std::vector<std::pair<Real, Real>> quad_nodes(Real eps, int n_per_sign = 256) const;

  // A with K((A, ∞)) = 0, if the positive support is bounded
  std::optional<Real> positive_support_bound() const;
  // is ∫_{z<-1} e^{-p z} K(dz) finite?
  bool negative_exp_moment_finite(Real p) const;

  // accessors used by serialization
  Real mu() const { return mu_plus_; }
  Real w_plus() const { return w_plus_; }
  Real mu_plus() const { return mu_plus_; }
  Real mu_minus() const { return mu_minus_; }
  Real intensity() const { return intensity_; }
  const JumpDist& dist() const { return dist_; }
  const Array& nodes() const { return nodes_; }
  const Array& node_densities() const { return dens_; }

 private:
  static Real nu_plus_impl(const JumpMeasure& k, Real x);

  Kind kind_ = Kind::none;
  Real mu_plus_ = 0, mu_minus_ = 0, w_plus_ = 0;  // exponential families
  Real intensity_ = 0;                            // compound_poisson
  JumpDist dist_;
  Array nodes_, dens_;      // tabulated
  Array seg_mass_;          // cumulative segment masses for tabulated sampling
  Real tab_total_ = 0;
};

}  // namespace expfun
