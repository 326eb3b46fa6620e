#pragma once
// Experiment orchestration: configuration, seed bookkeeping, parallel Monte
// Carlo over trajectories, aggregation and artifact output.
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rshe/constants.hpp"
#include "rshe/rng.hpp"
#include "rshe/she_solver.hpp"

namespace rshe {

enum ExitCode : int { kExitPass = 0, kExitTolerance = 1, kExitConfig = 2, kExitAborts = 3 };

struct McConfig {
  std::size_t n_paths = 200;
  std::uint64_t root_seed = 1;
  std::size_t workers = 1;
};

struct OutputConfig {
  std::filesystem::path dir;
  std::string format = "json";  // per-path records as records.jsonl (json) or records.csv (csv)
  bool write_paths = false;     // one t,value CSV per path under paths/
};

/// Acceptance tolerances; defaults are the shipped acceptance criteria.
struct Tolerances {
  double constants_rel = 1e-12;
  double quadrature_rel = 1e-6;
  double sample_z = 4.0;
  double qvar_z = 3.0;
  double ratio_lo = 0.85;
  double ratio_hi = 1.15;
  double decay_lo = -1.4;
  double decay_hi = -0.6;
  double cross_rel = 0.1;
  double exact_slope_abs = 0.02;
  double solver_slope_abs = 0.1;
  double lil_lo = 0.2;
  double lil_hi = 3.0;
  double lil_fraction = 0.9;
  double chung_stability = 0.3;
  double pvar_rel = 0.1;
  double theta_rel = 0.1;
  double hurst_abs = 0.03;
  double abort_fraction = 0.05;
};

struct ExperimentConfig {
  std::string experiment;       // verify-constants, sample, solve, qvar, lil, pvar, estimate, tailbounds, scaling
  ModelParams model;
  SolverConfig solver;          // numeric settings for solver-backed runs (params mirrors model)
  std::string source = "exact"; // exact | solver
  std::string kernel = "linear_she";  // sample: linear_she | T | fbm
  std::string weight = "one";   // pvar weight function
  std::size_t N = 1024;         // sampler grid t_i = i/N on [0, 1]
  int eps_lo = 8;               // lil: eps in [2^-eps_hi, 2^-eps_lo]
  int eps_hi = 20;
  McConfig mc;
  OutputConfig output;
  Tolerances tol;

  /// Throws ConfigError (or DomainError) on any invalid field.
  void validate() const;
  /// Full resolved config; workers is omitted since it never affects results.
  nlohmann::json manifest() const;
};

/// Sectioned key/value view of a config source.
using ConfigTree = std::map<std::string, std::map<std::string, std::string>>;

/// INI (sections experiment, model, solver, mc, output, tolerances) or a
/// manifest.json written by a previous run.
ConfigTree read_config_tree(const std::filesystem::path& file);
/// Applies a tree on top of cfg; unknown sections or keys are errors.
void apply_config_tree(ExperimentConfig& cfg, const ConfigTree& tree);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Default output directory: $RSHE_OUT_DIR, else ./rshe_out.
std::filesystem::path default_output_dir();

/// Streams (root_seed, 0..n_paths-1).
std::vector<SeedStream> seed_plan(std::uint64_t root_seed, std::size_t n_paths);

/// Per-statistic ensemble summary with pass/fail against a declared tolerance.
struct EnsembleSummary {
  std::string stat;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
  double target = 0.0;
  std::string tolerance;  // human-readable rule
  bool pass = true;
  nlohmann::json to_json() const;
};

struct RunResult {
  int exit_code = kExitPass;
  nlohmann::json summary;
  std::vector<EnsembleSummary> checks;
  std::size_t aborted = 0;
};

/// Runs a validated experiment and writes manifest.json, summary.json and
/// the tables into cfg.output.dir.
RunResult run(const ExperimentConfig& cfg);

}  // namespace rshe
