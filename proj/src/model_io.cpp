#include "expfun/model_io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace expfun {

using nlohmann::json;

namespace {

Real get_real(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::invalid_argument(std::string("model schema: missing numeric field '") + key + "'");
  return j[key].get<Real>();
}

JumpDist dist_from_json(const json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "constant") return JumpDist::constant(get_real(j, "value"));
  if (kind == "exponential") return JumpDist::exponential(get_real(j, "rate"));
  if (kind == "normal") return JumpDist::normal(get_real(j, "mean"), get_real(j, "sd"));
  if (kind == "uniform") return JumpDist::uniform(get_real(j, "lo"), get_real(j, "hi"));
  throw std::invalid_argument("model schema: unknown jump distribution kind '" + kind + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot read file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace

Profile profile_from_json(const json& j) {
  if (j.is_number()) return Profile(j.get<Real>());
  if (!j.is_object())
    throw std::invalid_argument("model schema: profile must be a number or an object");
  const std::string kind = j.value("kind", "");
  if (kind == "linear") return Profile::linear(get_real(j, "intercept"), get_real(j, "slope"));
  if (kind == "piecewise") {
    const auto& times = j.at("times");
    const auto& values = j.at("values");
    if (!times.is_array() || !values.is_array() || times.size() != values.size())
      throw std::invalid_argument("model schema: piecewise needs equal-length times and values");
    std::vector<std::pair<Real, Real>> breaks;
    for (size_t i = 0; i < times.size(); ++i)
      breaks.emplace_back(times[i].get<Real>(), values[i].get<Real>());
    return Profile::piecewise(std::move(breaks));
  }
  throw std::invalid_argument("model schema: unknown profile kind '" + kind + "'");
}

JumpMeasure jump_measure_from_json(const json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "none") return JumpMeasure::none();
  if (kind == "exponential_positive") return JumpMeasure::exponential_positive(get_real(j, "mu"));
  if (kind == "double_exponential")
    return JumpMeasure::double_exponential(get_real(j, "w_plus"), get_real(j, "mu_plus"),
                                           get_real(j, "mu_minus"));
  if (kind == "compound_poisson")
    return JumpMeasure::compound_poisson(get_real(j, "intensity"), dist_from_json(j.at("dist")));
  if (kind == "tabulated") {
    const auto& xs = j.at("x");
    const auto& ds = j.at("density");
    if (!xs.is_array() || !ds.is_array() || xs.size() != ds.size())
      throw std::invalid_argument("model schema: tabulated needs equal-length x and density");
    Array x(xs.size()), d(ds.size());
    for (size_t i = 0; i < xs.size(); ++i) {
      x[i] = xs[i].get<Real>();
      d[i] = ds[i].get<Real>();
    }
    return JumpMeasure::tabulated(std::move(x), std::move(d));
  }
  throw std::invalid_argument("model schema: unknown jump measure kind '" + kind + "'");
}

ProcessModel model_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("model schema: top level must be an object");
  ProcessModel m;
  m.b = profile_from_json(j.at("b"));
  m.c = profile_from_json(j.at("c"));
  m.jumps = j.contains("jumps") ? JumpProfile(jump_measure_from_json(j["jumps"]))
                                : JumpProfile(JumpMeasure::none());
  return m;
}

LoadedModel load_model(const std::string& path) {
  json j = read_json_file(path);
  return {model_from_json(j), std::move(j)};
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  const json j = read_json_file(path);
  if (!j.contains("scenarios") || !j["scenarios"].is_array())
    throw std::invalid_argument("scenario schema: expected top-level 'scenarios' array");
  const auto base = std::filesystem::path(path).parent_path();
  std::vector<Scenario> out;
  for (const json& s : j["scenarios"]) {
    Scenario sc;
    sc.name = s.value("name", "unnamed");
    const json& mj = s.at("model");
    if (mj.is_string())
      sc.model = load_model((base / mj.get<std::string>()).string()).model;
    else
      sc.model = model_from_json(mj);
    sc.t = s.value("t", 1.0);
    sc.seed = s.value("seed", uint64_t{1});
    sc.paths = s.value("paths", Index{100000});
    sc.dt = s.value("dt", 1e-3);
    sc.eps_cutoff = s.value("eps_cutoff", 1e-3);
    if (s.contains("checks"))
      for (const json& c : s["checks"]) sc.checks.push_back(c.get<std::string>());
    out.push_back(std::move(sc));
  }
  return out;
}

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const json& j) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(j.dump());
  return os.str();
}

}  // namespace expfun
