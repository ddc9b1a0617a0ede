#include <cmath>

#include "doctest.h"
#include "expfun/oracle.hpp"
#include "json.hpp"

using namespace expfun;

namespace {

ProcessModel zero_model() {
  ProcessModel m;
  m.b = 0.0;
  m.c = 0.0;
  return m;
}

}  // namespace

TEST_CASE("functional mean identity: frozen values") {
  CHECK(mean_It(zero_model(), 2.0) == doctest::Approx(2.0).epsilon(1e-12));

  ProcessModel up;
  up.b = 1.5;
  up.c = 1.0;  // a0 = -1
  CHECK(mean_It(up, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));

  ProcessModel diff;
  diff.b = 0.0;
  diff.c = 1.0;  // a0 = 1/2
  CHECK(mean_It(diff, 1.0) == doctest::Approx(1.2974425414002564).epsilon(1e-12));

  ProcessModel jumps;
  jumps.b = 1.0;
  jumps.c = 0.5;
  jumps.jumps = JumpMeasure::exponential_positive(2);  // a0 = -1 + 1/4 + 1/12
  CHECK(mean_It(jumps, 1.0) == doctest::Approx(-std::expm1(-2.0 / 3.0) / (2.0 / 3.0)).epsilon(1e-10));

  ProcessModel nonhom;
  nonhom.b = Profile::linear(1.0, 1.0);
  nonhom.c = 1.0;
  CHECK_THROWS_AS(mean_It(nonhom, 1.0), std::invalid_argument);
}

TEST_CASE("zero process cross-check is exact") {
  Scenario sc;
  sc.name = "zero";
  sc.model = zero_model();
  sc.checks = {"mc-mean"};
  sc.paths = 500;
  sc.dt = 0.01;
  const auto reports = crosscheck_suite({sc});
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].pass);
  CHECK(reports[0].name == "zero/mc-mean");
  CHECK(reports[0].expected == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(reports[0].observed - reports[0].expected) < 1e-10);
}

TEST_CASE("unsupported checks are reported as skips, not failures") {
  Scenario sc;
  sc.name = "s";
  sc.model = zero_model();
  sc.checks = {"no-such-check"};
  const auto reports = crosscheck_suite({sc});
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].pass);
  CHECK(reports[0].method.find("skip") != std::string::npos);

  // the closed-form stationary check needs a diffusion without jumps
  Scenario sj;
  sj.name = "j";
  sj.model = zero_model();
  sj.model.b = 1.0;
  sj.model.c = 0.5;
  sj.model.jumps = JumpMeasure::exponential_positive(2);
  sj.checks = {"stationary-closed-form"};
  const auto rj = crosscheck_suite({sj});
  REQUIRE(rj.size() == 1);
  CHECK(rj[0].pass);
  CHECK(rj[0].method.find("skip") != std::string::npos);
}

TEST_CASE("report pass flag encodes the tolerance comparison") {
  Scenario sc;
  sc.name = "b";
  sc.model = zero_model();
  sc.model.b = 1.5;
  sc.model.c = 1.0;
  sc.checks = {"mc-mean", "moment", "stationary-closed-form"};
  sc.paths = 20000;
  sc.dt = 2e-3;
  const auto reports = crosscheck_suite({sc});
  REQUIRE(reports.size() == 3);
  for (const auto& r : reports) {
    CHECK(r.pass == (std::abs(r.expected - r.observed) <= r.tolerance));
    CHECK(r.pass);
  }
}

TEST_CASE("reversed-functional mean check on a compound poisson model") {
  Scenario sc;
  sc.name = "cp";
  sc.model = zero_model();
  sc.model.jumps = JumpMeasure::compound_poisson(1.0, JumpDist::constant(1.0));
  sc.checks = {"v-mean"};
  sc.paths = 10000;
  sc.dt = 5e-3;
  const auto reports = crosscheck_suite({sc});
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].pass);
}

TEST_CASE("suite output is deterministic") {
  Scenario sc;
  sc.name = "d";
  sc.model = zero_model();
  sc.model.b = 1.0;
  sc.model.c = 1.0;
  sc.checks = {"mc-mean", "moment"};
  sc.paths = 5000;
  sc.dt = 5e-3;
  const auto a = crosscheck_suite({sc});
  const auto b = crosscheck_suite({sc});
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(to_json_line(a[i]) == to_json_line(b[i]));
}

TEST_CASE("report lines are valid json with the full field set") {
  OracleReport r;
  r.name = "x/y";
  r.expected = 1.25;
  r.observed = 1.5;
  r.tolerance = 0.1;
  r.pass = false;
  r.method = "test";
  const auto j = nlohmann::json::parse(to_json_line(r));
  CHECK(j.at("name") == "x/y");
  CHECK(j.at("expected").get<double>() == doctest::Approx(1.25));
  CHECK(j.at("observed").get<double>() == doctest::Approx(1.5));
  CHECK(j.at("tolerance").get<double>() == doctest::Approx(0.1));
  CHECK(j.at("pass") == false);
  CHECK(j.at("method") == "test");
}
