#include "expfun/reversal.hpp"

#include "expfun/mc_engine.hpp"

namespace expfun {

ReversedModel::ReversedModel(ProcessModel base, Real t_fix) : base_(std::move(base)), t_fix_(t_fix) {
  if (!(t_fix > 0) || !std::isfinite(t_fix))
    throw std::invalid_argument("reverse_triplet: horizon must be positive and finite");
  const ProcessModel& b = base_;
  const Real t = t_fix_;
  reversed_.b = Profile::callable([b, t](Real u) { return u < t ? b.b(t - u) : b.b(t); });
  reversed_.c = Profile::callable([b, t](Real u) { return u < t ? b.c(t - u) : b.c(t); });
  if (b.jumps.is_constant())
    reversed_.jumps = b.jumps;
  else
    reversed_.jumps = JumpProfile::callable(
        [b, t](Real u) { return b.jumps.at(u < t ? t - u : t); });
}

Real ReversedModel::a_bar(Real u) const {
  // left limit at the horizon: integrals over [0,t] never see the endpoint
  const Real s_base = u >= t_fix_ ? 0.0 : t_fix_ - u;
  if (is_levy() && !std::isnan(a_cache_u_)) return a_cache_;  // time-free, cached once
  const JumpMeasure& k = base_.jumps.at(s_base);
  Real jump_part = 0;
  if (!k.is_none()) {
    TailQuad q = k.integrate([](Real x) { return em1px(x); }, 0);
    if (q.diverged) throw std::domain_error("a_bar: jump integral diverges");
    jump_part = q.value;
  }
  const Real a = -base_.b(s_base) + 0.5 * base_.c(s_base) + jump_part;
  if (is_levy()) {
    a_cache_ = a;
    a_cache_u_ = 0;
  }
  return a;
}

TestFunction certify_test_function(std::function<Real(Real)> f, std::function<Real(Real)> df,
                                   std::function<Real(Real)> d2f) {
  TestFunction t;
  t.f = std::move(f);
  t.df = std::move(df);
  t.d2f = std::move(d2f);

  const Real f0 = t.f(0.0), df0 = t.df(0.0);
  if (!(std::abs(f0) < 1e-12) || !(std::abs(df0) < 1e-12)) return t;  // not in class

  Real sf = 0, sydf = 0, sy2d2f = 0;
  bool ok = true;
  for (int k = -120; k <= 120; ++k) {  // log-spaced probes over [1e-6, 1e6]
    const Real y = std::pow(10.0, k / 20.0);
    const Real v = t.f(y), dv = t.df(y), ddv = t.d2f(y);
    if (!std::isfinite(v) || !std::isfinite(dv) || !std::isfinite(ddv)) {
      ok = false;
      break;
    }
    sf = std::max(sf, std::abs(v));
    sydf = std::max(sydf, std::abs(y * dv));
    sy2d2f = std::max(sy2d2f, std::abs(y * y * ddv));
  }
  const Real cap = 1e12;  // "bounded" on the probe scale
  if (ok && sf < cap && sydf < cap && sy2d2f < cap) {
    t.certified = true;
    t.sup_f = sf;
    t.sup_ydf = sydf;
    t.sup_y2d2f = sy2d2f;
  }
  return t;
}

TestFunction weighted_exp_test_function(Real lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("test function: lambda must be > 0");
  const Real l = lambda;
  return certify_test_function(
      [l](Real y) { return 1 - std::exp(-l * y) - l * y * std::exp(-l * y); },
      [l](Real y) { return l * l * y * std::exp(-l * y); },
      [l](Real y) { return l * l * std::exp(-l * y) * (1 - l * y); });
}

namespace {

// precomputed generator coefficients at one time
struct GenCoeffs {
  Real a_bar, c_bar;
  std::vector<std::pair<Real, Real>> jump_nodes;
};

GenCoeffs gen_coeffs(const ReversedModel& rev, Real u) {
  const Real s_base = u >= rev.t_fix() ? 0.0 : rev.t_fix() - u;
  GenCoeffs g;
  g.a_bar = rev.a_bar(u);
  g.c_bar = rev.base().c(s_base);
  const JumpMeasure& k = rev.base().jumps.at(s_base);
  if (!k.is_none()) g.jump_nodes = k.quad_nodes(0, 256);
  return g;
}

Real apply_gen(const GenCoeffs& g, const TestFunction& f, Real y) {
  const Real dfy = f.df(y);
  Real out = (1 + y * g.a_bar) * dfy + 0.5 * g.c_bar * y * y * f.d2f(y);
  if (!g.jump_nodes.empty()) {
    const Real fy = f.f(y);
    Real jsum = 0;
    for (const auto& [x, w] : g.jump_nodes)
      jsum += w * (f.f(y * std::exp(-x)) - fy - dfy * y * em1(x));
    out += jsum;
  }
  return out;
}

}  // namespace

Real generator_apply(const ReversedModel& rev, const TestFunction& f, Real u, Real y) {
  if (!f.certified)
    throw std::invalid_argument("generator_apply: test function lacks a class certificate");
  if (!(y > 0)) throw std::domain_error("generator_apply: y must be > 0");

  const Real s_base = u >= rev.t_fix() ? 0.0 : rev.t_fix() - u;
  const Real a = rev.a_bar(u), c = rev.base().c(s_base);
  Real out = (1 + y * a) * f.df(y) + 0.5 * c * y * y * f.d2f(y);
  // adaptive jump integral for the one-shot evaluation
  const JumpMeasure& k = rev.base().jumps.at(s_base);
  if (!k.is_none()) {
    const Real fy = f.f(y), dfy = f.df(y);
    TailQuad q = k.integrate(
        [&](Real x) { return f.f(y * std::exp(-x)) - fy - dfy * y * em1(x); }, 0);
    if (q.diverged) throw std::domain_error("generator_apply: jump integral diverges");
    out += q.value;
  }
  return out;
}

DynkinResult dynkin_check(const ReversedModel& rev, const TestFunction& f, Real s,
                          const PathBatch& v_paths) {
  if (!f.certified)
    throw std::invalid_argument("dynkin_check: test function lacks a class certificate");
  if (v_paths.kind != BatchKind::v_path)
    throw std::invalid_argument("dynkin_check: batch must hold V paths");
  const Array& mesh = v_paths.time_mesh;
  Index i_s = -1;
  for (Index j = 0; j < mesh.size(); ++j)
    if (std::abs(mesh[j] - s) < 1e-12) i_s = j;
  if (i_s < 0 || mesh[0] > 1e-12)
    throw std::domain_error("dynkin_check: batch mesh does not cover [0, s]");

  // coefficients per mesh time (one set if the base is Lévy)
  std::vector<GenCoeffs> coeffs;
  coeffs.reserve(rev.is_levy() ? 1 : i_s + 1);
  for (Index j = 0; j <= (rev.is_levy() ? 0 : i_s); ++j) coeffs.push_back(gen_coeffs(rev, mesh[j]));

  const Index n = v_paths.n_paths();
  Real sum = 0, sum2 = 0;
  for (Index i = 0; i < n; ++i) {
    Real integ = 0, prev = kNaN;
    for (Index j = 0; j <= i_s; ++j) {
      const GenCoeffs& g = coeffs[rev.is_levy() ? 0 : j];
      const Real v = v_paths.values(i, j);
      const Real av = v > 0 ? apply_gen(g, f, v) : f.df(0.0);  // A f(0) = f'(0) = 0
      if (j > 0) integ += 0.5 * (mesh[j] - mesh[j - 1]) * (prev + av);
      prev = av;
    }
    const Real ri = f.f(v_paths.values(i, i_s)) - integ;
    sum += ri;
    sum2 += ri * ri;
  }
  DynkinResult r;
  r.n_paths = n;
  const Real mean = sum / n;
  const Real var = std::max(sum2 / n - mean * mean, 0.0);
  r.residual = std::abs(mean);
  r.se = std::sqrt(var / n);
  return r;
}

}  // namespace expfun
