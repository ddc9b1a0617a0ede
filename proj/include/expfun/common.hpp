#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace expfun {

using Real = double;
using Array = Eigen::ArrayXd;
using Eigen::Index;

inline constexpr Real kInf = std::numeric_limits<Real>::infinity();
inline constexpr Real kNaN = std::numeric_limits<Real>::quiet_NaN();

// e^{-x} - 1, without cancellation for small |x|.
inline Real em1(Real x) { return std::expm1(-x); }

// e^{-x} - 1 + x.  The naive form loses all digits for |x| ~ 1e-8; below
// 1e-4 the Taylor tail x^2/2 - x^3/6 + x^4/24 is exact to double precision.
inline Real em1px(Real x) {
  if (std::abs(x) < 1e-4) return x * x * (0.5 + x * (-1.0 / 6.0 + x * (1.0 / 24.0)));
  return std::expm1(-x) + x;
}

// trapezoid weights for an arbitrary sorted grid
template <typename DerivedX>
Array trapezoid_weights(const Eigen::ArrayBase<DerivedX>& x) {
  const Index n = x.size();
  Array w = Array::Zero(n);
  if (n < 2) return w;
  for (Index i = 0; i + 1 < n; ++i) {
    const Real h = x[i + 1] - x[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

template <typename DerivedX, typename DerivedY>
Real trapezoid(const Eigen::ArrayBase<DerivedX>& x, const Eigen::ArrayBase<DerivedY>& y) {
  Real s = 0;
  for (Index i = 0; i + 1 < x.size(); ++i) s += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return s;
}

// cumulative trapezoid, F[0] = 0
template <typename DerivedX, typename DerivedY>
Array cumtrapz(const Eigen::ArrayBase<DerivedX>& x, const Eigen::ArrayBase<DerivedY>& y) {
  Array f = Array::Zero(x.size());
  for (Index i = 1; i < x.size(); ++i)
    f[i] = f[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return f;
}

// Thomas algorithm for a tridiagonal system; diag/rhs are overwritten.
// lower[i] multiplies x[i-1] in row i, upper[i] multiplies x[i+1].
inline Array solve_tridiagonal(const Array& lower, Array diag, const Array& upper, Array rhs) {
  const Index n = diag.size();
  for (Index i = 1; i < n; ++i) {
    const Real m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  Array x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (Index i = n - 2; i >= 0; --i) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

// linear interpolation with constant extrapolation outside [x.front, x.back]
inline Real interp_linear(const Array& x, const Array& y, Real xq) {
  const Index n = x.size();
  if (xq <= x[0]) return y[0];
  if (xq >= x[n - 1]) return y[n - 1];
  const Real* b = x.data();
  Index j = static_cast<Index>(std::upper_bound(b, b + n, xq) - b) - 1;
  const Real t = (xq - x[j]) / (x[j + 1] - x[j]);
  return (1 - t) * y[j] + t * y[j + 1];
}

}  // namespace expfun
