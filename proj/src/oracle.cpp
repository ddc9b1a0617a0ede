#include "expfun/oracle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace expfun {

namespace {

using nlohmann::json;

OracleReport make_report(std::string name, Real expected, Real observed, Real tol,
                         std::string method) {
  OracleReport r;
  r.name = std::move(name);
  r.expected = expected;
  r.observed = observed;
  r.tolerance = tol;
  r.pass = std::abs(expected - observed) <= tol;
  r.method = std::move(method);
  return r;
}

OracleReport skipped(std::string name, std::string reason) {
  return make_report(std::move(name), 0, 0, 0, "skipped: " + std::move(reason));
}

struct Moments {
  Real mean, se;
};

Moments sample_moments(const Array& v) {
  const Real mean = v.mean();
  const Real var = (v - mean).square().sum() / (v.size() - 1);
  return {mean, std::sqrt(var / v.size())};
}

McConfig scenario_mc(const Scenario& sc, uint64_t seed_shift) {
  McConfig mc;
  mc.seed = sc.seed + seed_shift;
  mc.n_paths = sc.paths;
  mc.dt = sc.dt;
  mc.eps_cutoff = sc.eps_cutoff;
  return mc;
}

}  // namespace

std::string to_json_line(const OracleReport& r) {
  json j{{"name", r.name},           {"expected", r.expected}, {"observed", r.observed},
         {"tolerance", r.tolerance}, {"pass", r.pass},         {"method", r.method}};
  return j.dump();
}

Real mean_It(const ProcessModel& m, Real t) {
  if (!m.is_levy()) throw std::invalid_argument("mean_It: model must be time-homogeneous");
  if (!(t >= 0)) throw std::invalid_argument("mean_It: need t >= 0");
  const Real a0 = compute_a(m, 0);
  if (a0 == 0) return t;
  return std::expm1(a0 * t) / a0;
}

std::vector<OracleReport> crosscheck_suite(const std::vector<Scenario>& scenarios) {
  std::vector<OracleReport> out;
  for (const Scenario& sc : scenarios) {
    const bool levy = sc.model.is_levy();
    for (const std::string& chk : sc.checks) {
      const std::string label = sc.name + "/" + chk;
      try {
        if (chk == "mc-mean") {
          if (!levy) {
            out.push_back(skipped(label, "moment identity needs a time-homogeneous model"));
            continue;
          }
          const Real exact = mean_It(sc.model, sc.t);
          const PathBatch b = simulate_exp_functional(sc.model, sc.t, scenario_mc(sc, 0));
          const Moments mo = sample_moments(b.terminal());
          out.push_back(make_report(label, exact, mo.mean, std::max(3 * mo.se, 1e-12),
                                    "closed-form mean vs simulated functional"));
        } else if (chk == "v-mean") {
          const ReversedModel rev = reverse_triplet(sc.model, sc.t);
          const Moments v =
              sample_moments(simulate_v_functional(rev, sc.t, scenario_mc(sc, 0)).terminal());
          const Moments i =
              sample_moments(simulate_exp_functional(sc.model, sc.t, scenario_mc(sc, 7777)).terminal());
          out.push_back(make_report(label, i.mean, v.mean,
                                    std::max(3 * std::hypot(i.se, v.se), 1e-12),
                                    "reversed-functional mean vs direct simulation"));
        } else if (chk == "moment") {
          if (!levy) {
            out.push_back(skipped(label, "moment identity needs a time-homogeneous model"));
            continue;
          }
          const Real exact = std::exp(compute_a(sc.model, 0) * sc.t);
          McConfig mc = scenario_mc(sc, 0);
          mc.store_stride = 1 << 30;  // terminal only
          const Array xt = simulate_X(sc.model, sc.t, mc).terminal();
          const Moments mo = sample_moments((-xt).exp());
          out.push_back(make_report(label, exact, mo.mean, std::max(3 * mo.se, 1e-12),
                                    "exponential moment identity vs simulated paths"));
        } else if (chk == "reversal-law") {
          const Array a = simulate_exp_functional(sc.model, sc.t, scenario_mc(sc, 0)).terminal();
          const ReversedModel rev = reverse_triplet(sc.model, sc.t);
          const Array b = simulate_v_functional(rev, sc.t, scenario_mc(sc, 7777)).terminal();
          const KsResult ks = ks_two_sample(a, b);
          out.push_back(make_report(label, 1, ks.p_value, 0.99, "two-sample KS, disjoint seeds"));
        } else if (chk == "stationary-closed-form") {
          if (!levy || !sc.model.jumps.at(0).is_none() || !(sc.model.b(0) > 0) ||
              !(sc.model.c(0) > 0)) {
            out.push_back(skipped(label, "closed form needs Brownian with positive drift"));
            continue;
          }
          const StationarySolution sol = solve_stationary(sc.model);
          const InverseGammaLaw law = brownian_closed_form(sc.model.b(0), sc.model.c(0));
          Real sup = 0;
          for (Index j = 0; j < sol.y.size(); ++j)
            if (sol.y[j] >= 0.2 && sol.y[j] <= 5)
              sup = std::max(sup, std::abs(sol.p_inf[j] - law.pdf(sol.y[j])));
          out.push_back(make_report(label, 0, sup, 1e-3, "stationary solver vs closed form"));
        } else {
          out.push_back(skipped(label, "unknown check"));
        }
      } catch (const std::exception& e) {
        out.push_back(skipped(label, std::string("error: ") + e.what()));
      }
    }
  }
  return out;
}

}  // namespace expfun
