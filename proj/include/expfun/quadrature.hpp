#pragma once

// Gauss-Legendre panel quadrature.  Nodes are generated once per order by
// Newton iteration on the Legendre recurrence and cached.

#include <functional>
#include <map>
#include <vector>

#include "expfun/common.hpp"

namespace expfun {

struct GlRule {
  Array nodes;    // on [-1, 1]
  Array weights;
};

inline const GlRule& gauss_legendre(int n) {
  static std::map<int, GlRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GlRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    Real x = std::cos(M_PI * (i + 0.75) / (n + 0.5));  // Chebyshev seed
    Real pp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0 = 1, p1 = 0;
      for (int j = 0; j < n; ++j) {
        const Real p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
      }
      pp = n * (x * p0 - p1) / (x * x - 1);
      const Real dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = 2.0 / ((1 - x * x) * pp * pp);
    r.weights[n - 1 - i] = r.weights[i];
  }
  return cache.emplace(n, std::move(r)).first->second;
}

template <typename F>
Real integrate_gl(F&& f, Real a, Real b, int n = 32) {
  const GlRule& r = gauss_legendre(n);
  const Real mid = 0.5 * (a + b), half = 0.5 * (b - a);
  Real s = 0;
  for (Index i = 0; i < n; ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

template <typename F>
Real integrate_panels(F&& f, Real a, Real b, int panels, int n = 32) {
  Real s = 0;
  const Real h = (b - a) / panels;
  for (int k = 0; k < panels; ++k) s += integrate_gl(f, a + k * h, a + (k + 1) * h, n);
  return s;
}

// panel-doubling until two successive refinements agree
template <typename F>
Real integrate_adaptive(F&& f, Real a, Real b, Real rel_tol = 1e-12, int max_panels = 1024) {
  Real prev = integrate_gl(f, a, b, 32);
  for (int panels = 2; panels <= max_panels; panels *= 2) {
    const Real cur = integrate_panels(f, a, b, panels, 32);
    if (std::abs(cur - prev) <= rel_tol * (std::abs(cur) + 1e-300)) return cur;
    prev = cur;
  }
  return prev;
}

struct TailQuad {
  Real value = 0;
  Real radius = 0;     // final upper limit
  bool diverged = false;
};

// \int_eps^infty f, fixed sign per tail assumed for the divergence heuristic.
// The upper limit grows geometrically until the relative increment drops below
// rel_incr.  A convergent tail makes successive doubled panels shrink; three
// consecutive panels that fail to shrink (while still contributing) mean the
// integral grows without bound and we report divergence instead of a value.
template <typename F>
TailQuad integrate_tail(F&& f, Real eps, Real rel_incr = 1e-10, Real r0 = 1.0) {
  TailQuad out;
  Real lo = eps;
  Real hi = std::max(r0, 2 * eps);
  Real total = 0, prev_piece = kNaN;
  int growing = 0;
  for (int k = 0; k < 64; ++k) {
    const Real piece = integrate_adaptive(f, lo, hi, 1e-12, 256);
    if (!std::isfinite(piece)) {
      out.diverged = true;
      out.value = kInf;
      out.radius = hi;
      return out;
    }
    total += piece;
    out.radius = hi;
    const Real rel = std::abs(piece) / (std::abs(total) + 1e-300);
    if (k > 0 && rel < rel_incr) break;
    if (std::isfinite(prev_piece) && std::abs(piece) >= 0.99 * std::abs(prev_piece) &&
        rel > 1e-9)
      ++growing;
    else
      growing = 0;
    if (growing >= 3) {
      out.diverged = true;
      out.value = kInf;
      return out;
    }
    prev_piece = piece;
    lo = hi;
    hi *= 2;
  }
  out.value = total;
  return out;
}

}  // namespace expfun
