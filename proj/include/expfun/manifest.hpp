#pragma once

// One manifest per run directory: what ran, on which canonical config, what
// it produced.  wall_time is the only field allowed to differ between
// identical runs.

#include <string>
#include <vector>

#include "json.hpp"

#include "expfun/csv.hpp"

namespace expfun {

struct RunManifest {
  std::string command;
  std::string config_hash;
  uint64_t seed = 0;
  std::string versions;
  std::vector<std::string> outputs;
  double wall_time = 0;
  std::vector<std::string> notes;
};

inline std::string compiler_versions() {
  return std::string("eigen ") + std::to_string(EIGEN_WORLD_VERSION) + "." +
         std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION) +
         "; compiler " + __VERSION__;
}

inline void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::json j{{"command", m.command},   {"config_hash", m.config_hash},
                   {"seed", m.seed},         {"versions", m.versions},
                   {"outputs", m.outputs},   {"wall_time", m.wall_time},
                   {"notes", m.notes}};
  csv::atomic_write(path, j.dump(2) + "\n");
}

}  // namespace expfun
