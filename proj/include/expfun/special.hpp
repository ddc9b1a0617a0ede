#pragma once

// Regularized incomplete gamma functions.  Series for x < a+1, Lentz
// continued fraction otherwise; good to ~1e-14 relative over the ranges
// used here (a in [1e-2, 1e3]).

#include "expfun/common.hpp"

namespace expfun {

namespace detail {

inline Real gamma_p_series(Real a, Real x) {
  Real ap = a, sum = 1.0 / a, del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline Real gamma_q_cf(Real a, Real x) {
  const Real tiny = 1e-300;
  Real b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const Real an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const Real del = d * c;
    h *= del;
    if (std::abs(del - 1) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// P(a,x) = gamma(a,x)/Gamma(a), lower regularized
inline Real gamma_p(Real a, Real x) {
  if (!(a > 0) || x < 0) throw std::domain_error("gamma_p: need a > 0, x >= 0");
  if (x == 0) return 0;
  return x < a + 1 ? detail::gamma_p_series(a, x) : 1 - detail::gamma_q_cf(a, x);
}

// Q(a,x) = Gamma(a,x)/Gamma(a), upper regularized
inline Real gamma_q(Real a, Real x) { return 1 - gamma_p(a, x); }

inline Real normal_cdf(Real x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Acklam's rational approximation (|err| < 1.2e-9), refined by one Halley
// step against erfc to full double precision.
inline Real normal_quantile(Real u) {
  if (!(u > 0 && u < 1)) throw std::domain_error("normal_quantile: u in (0,1)");
  static const Real a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                           1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const Real b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                           6.680131188771972e+01, -1.328068155288572e+01};
  static const Real c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                           -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const Real d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                           3.754408661907416e+00};
  const Real plow = 0.02425;
  Real x;
  if (u < plow) {
    const Real q = std::sqrt(-2 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (u <= 1 - plow) {
    const Real q = u - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const Real q = std::sqrt(-2 * std::log(1 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const Real e = normal_cdf(x) - u;
  const Real g = std::exp(-0.5 * x * x) / std::sqrt(2 * M_PI);
  x -= e / (g + 0.5 * x * e);  // Halley
  return x;
}

}  // namespace expfun
