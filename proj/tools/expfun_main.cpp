// command-line front end: model validation, simulation, density estimation,
// the evolution / stationary solvers, and the oracle cross-check suite

#include <chrono>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "expfun/csv.hpp"
#include "expfun/manifest.hpp"
#include "expfun/model_io.hpp"

namespace fs = std::filesystem;
using namespace expfun;
using nlohmann::json;

namespace {

struct Opts {
  std::string model_path, scenarios_path, out = ".";
  Real t = 1, dt = 1e-3, eps = 1e-3;
  Real grid_min = 0.01, grid_max = 200;
  Index grid_points = 1024;
  Index paths = 100000;
  uint64_t seed = 1;
  Real p_max = 10;
};

void add_common(CLI::App* cmd, Opts& o, bool needs_model = true) {
  if (needs_model)
    cmd->add_option("--model", o.model_path, "model JSON file")->required();
  cmd->add_option("--t", o.t, "time horizon");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--paths", o.paths, "Monte Carlo paths");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--grid-min", o.grid_min, "lower grid edge");
  cmd->add_option("--grid-max", o.grid_max, "upper grid edge");
  cmd->add_option("--grid-points", o.grid_points, "grid size");
  cmd->add_option("--eps-cutoff", o.eps, "small-jump cutoff");
  cmd->add_option("--out", o.out, "output directory");
}

json flags_json(const Opts& o, const json& model_cfg) {
  return json{{"model", model_cfg},         {"t", o.t},
              {"seed", o.seed},             {"paths", o.paths},
              {"dt", o.dt},                 {"grid_min", o.grid_min},
              {"grid_max", o.grid_max},     {"grid_points", o.grid_points},
              {"eps_cutoff", o.eps}};
}

McConfig mc_config(const Opts& o) {
  McConfig mc;
  mc.seed = o.seed;
  mc.n_paths = o.paths;
  mc.dt = o.dt;
  mc.eps_cutoff = o.eps;
  return mc;
}

PideConfig pide_config(const Opts& o) {
  PideConfig cfg;
  cfg.y_min = o.grid_min;
  cfg.y_max = o.grid_max;
  cfg.n_grid = o.grid_points;
  cfg.dt = o.dt;
  cfg.boot_dt = o.dt;
  cfg.boot_paths = o.paths;
  cfg.seed = o.seed;
  cfg.eps_cutoff = o.eps;
  return cfg;
}

// run fn, then drop a manifest next to whatever it produced
int with_manifest(const Opts& o, const std::string& command, const json& cfg,
                  const std::vector<std::string>& notes,
                  const std::function<std::vector<std::string>()>& fn) {
  fs::create_directories(o.out);
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest m;
  m.command = command;
  m.config_hash = config_hash(cfg);
  m.seed = o.seed;
  m.versions = compiler_versions();
  m.notes = notes;
  m.outputs = fn();
  m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest((fs::path(o.out) / "manifest.json").string(), m);
  return 0;
}

int cmd_validate(const Opts& o) {
  const LoadedModel lm = load_model(o.model_path);
  const ValidationReport r = validate_model(lm.model, o.t);
  std::cout << "ok=" << (r.ok ? "true" : "false") << " c_ok=" << (r.c_ok ? "true" : "false")
            << " rt1_ok=" << (r.rt1_ok ? "true" : "false")
            << " rt11_ok=" << (r.rt11_ok ? "true" : "false") << " rt1=" << r.rt1_value
            << " rt11=" << r.rt11_value << "\n";
  for (const auto& msg : r.messages) std::cout << "note: " << msg << "\n";
  return r.ok ? 0 : 1;
}

int cmd_simulate(const Opts& o) {
  const LoadedModel lm = load_model(o.model_path);
  return with_manifest(o, "simulate", flags_json(o, lm.config), {}, [&] {
    const PathBatch b = simulate_exp_functional(lm.model, o.t, mc_config(o));
    const std::string path = (fs::path(o.out) / "samples.csv").string();
    csv::write_samples(path, b.terminal());
    std::cout << "samples=" << b.n_paths() << " mean=" << b.terminal().mean() << "\n";
    return std::vector<std::string>{path};
  });
}

int cmd_density_mc(const Opts& o) {
  const LoadedModel lm = load_model(o.model_path);
  return with_manifest(o, "density-mc", flags_json(o, lm.config), {}, [&] {
    const PathBatch b = simulate_exp_functional(lm.model, o.t, mc_config(o));
    const SpaceGrid g = SpaceGrid::geometric(o.grid_min, o.grid_max, o.grid_points);
    const DensityEstimate de = estimate_density(b.terminal(), g.y);
    const std::string samples = (fs::path(o.out) / "samples.csv").string();
    const std::string density = (fs::path(o.out) / "density.csv").string();
    csv::write_samples(samples, b.terminal());
    csv::write_xy(density, "y,p", de.y, de.p);
    std::cout << "samples=" << de.n_used << " bandwidth=" << de.bandwidth << "\n";
    return std::vector<std::string>{samples, density};
  });
}

int cmd_solve_pide(const Opts& o) {
  const LoadedModel lm = load_model(o.model_path);
  const std::vector<std::string> notes = {
      "starting slice is a kernel estimate from a short simulation bootstrap; its law is "
      "assumed well represented at the bootstrap time"};
  return with_manifest(o, "solve-pide", flags_json(o, lm.config), notes, [&] {
    const DensityField f = solve_density(lm.model, o.t, pide_config(o));
    const std::string path = (fs::path(o.out) / "pide_density.csv").string();
    csv::write_density_field(path, f);
    std::cout << "final_mass=" << f.mass[f.mass.size() - 1]
              << " leak=" << f.leak[f.leak.size() - 1] << " clipped=" << f.clip_count
              << " rejected_steps=" << f.rejected_steps
              << (f.heuristic_regime ? " heuristic_regime=true" : "") << "\n";
    return std::vector<std::string>{path};
  });
}

int cmd_solve_cdf(const Opts& o) {
  const LoadedModel lm = load_model(o.model_path);
  const std::vector<std::string> notes = {
      "starting slice is the empirical cdf of a short simulation bootstrap"};
  return with_manifest(o, "solve-cdf", flags_json(o, lm.config), notes, [&] {
    const CdfField f = solve_cdf(lm.model, o.t, pide_config(o));
    const std::string path = (fs::path(o.out) / "pide_cdf.csv").string();
    csv::write_cdf_field(path, f);
    std::cout << "max_projection=" << f.max_projection
              << (f.heuristic_regime ? " heuristic_regime=true" : "") << "\n";
    return std::vector<std::string>{path};
  });
}

int cmd_solve_stationary(const Opts& o) {
  const LoadedModel lm = load_model(o.model_path);
  return with_manifest(o, "solve-stationary", flags_json(o, lm.config), {}, [&] {
    StationaryConfig cfg;
    cfg.y_min = o.grid_min;
    cfg.y_max = o.grid_max;
    cfg.n_grid = o.grid_points;
    cfg.eps_cutoff = o.eps;
    const StationarySolution sol = solve_stationary(lm.model, cfg);
    if (!sol.converged)
      throw std::runtime_error("stationary iteration did not converge (last change " +
                               std::to_string(sol.final_change) + ")");
    const std::string path = (fs::path(o.out) / "stationary.csv").string();
    csv::write_stationary(path, sol);
    std::cout << "iterations=" << sol.iterations << " max_projection=" << sol.max_projection
              << "\n";
    return std::vector<std::string>{path};
  });
}

int cmd_check_smoothness(const Opts& o) {
  const LoadedModel lm = load_model(o.model_path);
  const SmoothnessReport r = check_smoothness_conditions(lm.model, o.p_max, o.t);
  std::cout << "gaussian_active=" << (r.gaussian_active ? "true" : "false")
            << " exp_moment_ok=" << (r.exp_moment_ok ? "true" : "false")
            << " support_bounded=" << (r.support_bounded ? "true" : "false")
            << " all=" << (r.all() ? "true" : "false") << "\n";
  return 0;
}

int cmd_compare(const Opts& o) {
  const std::vector<Scenario> scenarios = load_scenarios(o.scenarios_path);
  bool all_pass = true;
  std::string lines;
  for (const OracleReport& r : crosscheck_suite(scenarios)) {
    const std::string line = to_json_line(r);
    std::cout << line << "\n";
    lines += line + "\n";
    all_pass = all_pass && r.pass;
  }
  fs::create_directories(o.out);
  csv::atomic_write((fs::path(o.out) / "reports.jsonl").string(), lines);
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exponential functionals of independent-increment processes"};
  app.require_subcommand(1);
  Opts o;

  add_common(app.add_subcommand("validate", "integrability checks on a model"), o);
  add_common(app.add_subcommand("simulate", "draw functional samples"), o);
  add_common(app.add_subcommand("density-mc", "kernel density from simulation"), o);
  add_common(app.add_subcommand("solve-pide", "march the density equation"), o);
  add_common(app.add_subcommand("solve-cdf", "march the cumulative equation"), o);
  add_common(app.add_subcommand("solve-stationary", "long-run law"), o);
  auto* smooth = app.add_subcommand("check-smoothness", "density-smoothness conditions");
  add_common(smooth, o);
  smooth->add_option("--p-max", o.p_max, "largest negative exponential moment probed");
  auto* comp = app.add_subcommand("compare", "run the oracle cross-check suite");
  add_common(comp, o, false);
  comp->add_option("--scenarios", o.scenarios_path, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;  // usage errors; --help stays 0
  }

  try {
    if (app.got_subcommand("validate")) return cmd_validate(o);
    if (app.got_subcommand("simulate")) return cmd_simulate(o);
    if (app.got_subcommand("density-mc")) return cmd_density_mc(o);
    if (app.got_subcommand("solve-pide")) return cmd_solve_pide(o);
    if (app.got_subcommand("solve-cdf")) return cmd_solve_cdf(o);
    if (app.got_subcommand("solve-stationary")) return cmd_solve_stationary(o);
    if (app.got_subcommand("check-smoothness")) return cmd_check_smoothness(o);
    if (app.got_subcommand("compare")) return cmd_compare(o);
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 66;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 64;
}
