#include "expfun/process_model.hpp"

namespace expfun {

namespace {

// time-averaged spatial integral ∫_0^h ∫ fn dK_s ds with divergence carried
// through; trapezoid in s, one shot for time-constant measures
TailQuad time_integral(const ProcessModel& m, Real horizon, int nodes,
                       const std::function<Real(Real)>& fn, Real eps) {
  if (m.jumps.is_constant()) {
    TailQuad q = m.jumps.at(0).integrate(fn, eps);
    q.value *= horizon;
    return q;
  }
  TailQuad out;
  Real acc = 0;
  const Real h = horizon / (nodes - 1);
  for (int i = 0; i < nodes; ++i) {
    const Real s = i * h;
    TailQuad q = m.jumps.at(s).integrate(fn, eps);
    if (q.diverged) {
      out.diverged = true;
      out.value = kInf;
      return out;
    }
    acc += q.value * ((i == 0 || i == nodes - 1) ? 0.5 : 1.0) * h;
    out.radius = std::max(out.radius, q.radius);
  }
  out.value = acc;
  return out;
}

}  // namespace

ValidationReport validate_model(const ProcessModel& m, Real horizon, int time_nodes) {
  if (!(horizon > 0)) throw std::invalid_argument("validate_model: horizon must be > 0");
  ValidationReport r;

  r.c_ok = true;
  for (int i = 0; i < time_nodes; ++i) {
    const Real s = horizon * i / (time_nodes - 1);
    const Real cs = m.c(s), bs = m.b(s);
    if (!std::isfinite(bs)) {
      r.c_ok = false;
      r.messages.push_back("drift profile b is not finite at s=" + std::to_string(s));
      break;
    }
    if (!std::isfinite(cs) || cs < 0) {
      r.c_ok = false;
      r.messages.push_back("variance profile c must be finite and >= 0 (s=" + std::to_string(s) +
                           ")");
      break;
    }
  }

  TailQuad rt1 =
      time_integral(m, horizon, time_nodes, [](Real x) { return std::min(x * x, 1.0); }, 0);
  r.rt1_value = rt1.value;
  r.rt1_ok = !rt1.diverged && std::isfinite(rt1.value);
  if (!r.rt1_ok) r.messages.push_back("small-jump integrability fails: ∫(x²∧1)K diverges");

  TailQuad rt11 =
      time_integral(m, horizon, time_nodes, [](Real x) { return std::exp(std::abs(x)); }, 1.0);
  r.rt11_value = rt11.value;
  r.rt11_ok = !rt11.diverged && std::isfinite(rt11.value);
  if (!r.rt11_ok)
    r.messages.push_back("exponential moment fails: ∫_{|x|>1} e^{|x|} K diverges; "
                         "the exponential functional is not covered");

  r.ok = r.c_ok && r.rt1_ok && r.rt11_ok;
  return r;
}

Real compute_a(const ProcessModel& m, Real s) {
  const JumpMeasure& k = m.jumps.at(s);
  Real jump_part = 0;
  if (!k.is_none()) {
    TailQuad q = k.integrate([](Real x) { return em1px(x); }, 0);
    if (q.diverged) throw std::domain_error("compute_a: jump integral diverges");
    jump_part = q.value;
  }
  return -m.b(s) + 0.5 * m.c(s) + jump_part;
}

Real compute_r0(const ProcessModel& m, Real s) {
  const JumpMeasure& k = m.jumps.at(s);
  Real comp = 0;
  if (!k.is_none()) {
    TailQuad q = k.integrate([](Real x) { return em1(x); }, 0);
    if (q.diverged) throw std::domain_error("compute_r0: jump integral diverges");
    comp = q.value;
  }
  return compute_a(m, s) - comp;
}

SmoothnessReport check_smoothness_conditions(const ProcessModel& m, Real p_max, Real horizon,
                                             int time_nodes) {
  if (!(p_max >= 2)) throw std::invalid_argument("check_smoothness_conditions: p_max >= 2");
  SmoothnessReport r;
  r.p_max = p_max;

  if (m.is_levy()) {
    r.gaussian_active = m.c(0) > 0;
    const JumpMeasure& k = m.jumps.at(0);
    r.exp_moment_ok = k.negative_exp_moment_finite(p_max);
    r.support_bounded = k.positive_support_bound().has_value();
    return r;
  }

  // time-dependent triplet: Gaussian part must act over the window, the jump
  // conditions must hold at every probe time
  Real c_int = 0;
  r.exp_moment_ok = true;
  r.support_bounded = true;
  const Real h = horizon / (time_nodes - 1);
  for (int i = 0; i < time_nodes; ++i) {
    const Real s = i * h;
    c_int += m.c(s) * ((i == 0 || i == time_nodes - 1) ? 0.5 : 1.0) * h;
    const JumpMeasure& k = m.jumps.at(s);
    r.exp_moment_ok = r.exp_moment_ok && k.negative_exp_moment_finite(p_max);
    r.support_bounded = r.support_bounded && k.positive_support_bound().has_value();
  }
  r.gaussian_active = c_int > 0;
  return r;
}

}  // namespace expfun
