#pragma once

// JSON model / scenario schema and config digests.
//
// Model files:
//   { "b": <profile>, "c": <profile>, "jumps": <measure> }
// where <profile> is a number (constant) or
//   {"kind": "linear", "intercept": r, "slope": r}
//   {"kind": "piecewise", "times": [t0, t1, ...], "values": [v0, v1, ...]}
// and <measure> is one of
//   {"kind": "none"}
//   {"kind": "exponential_positive", "mu": r}
//   {"kind": "double_exponential", "w_plus": r, "mu_plus": r, "mu_minus": r}
//   {"kind": "compound_poisson", "intensity": r, "dist":
//       {"kind": "constant", "value": r} | {"kind": "exponential", "rate": r}
//     | {"kind": "normal", "mean": r, "sd": r} | {"kind": "uniform", "lo": r, "hi": r}}
//   {"kind": "tabulated", "x": [...], "density": [...]}
// Omitted "jumps" means none.  Time-dependent jump measures are code-only.

#include <string>
#include <vector>

#include "json.hpp"

#include "expfun/oracle.hpp"

namespace expfun {

// unreadable-file errors get their own type so the CLI can map them to a
// distinct exit code
struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Profile profile_from_json(const nlohmann::json& j);
JumpMeasure jump_measure_from_json(const nlohmann::json& j);
ProcessModel model_from_json(const nlohmann::json& j);

struct LoadedModel {
  ProcessModel model;
  nlohmann::json config;  // parsed source; hashed into the run manifest
};

LoadedModel load_model(const std::string& path);

// scenario files: {"scenarios": [{"name": ..., "model": <inline model or path
// relative to the file>, "t": ..., "checks": [...], "seed": ..., "paths": ...,
// "dt": ...}, ...]}
std::vector<Scenario> load_scenarios(const std::string& path);

uint64_t fnv1a64(std::string_view s);

// digest of the canonicalized (parsed and re-serialized) JSON config
std::string config_hash(const nlohmann::json& j);

}  // namespace expfun
