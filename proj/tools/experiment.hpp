#pragma once

#include <string>

#include "tslip/config.hpp"
#include "tslip/gain_table.hpp"
#include "tslip/gait.hpp"
#include "tslip/tuning.hpp"

namespace tslip::cli {

/// Fully resolved experiment: model parameters with the effective damping,
/// the controller cell (tuned or explicit), and the run options.
struct ResolvedExperiment {
  std::string name;
  ModelParams params;
  GainCell cell;
  TerrainSpec terrain;
  GaitOptions gait;
  IntegratorSettings integrator;
};

/// Resolve a parsed config against the gain table (empty path = no table;
/// cell references then fail).  Throws ConfigError/GainTableError.
ResolvedExperiment resolve(const ExperimentConfig& cfg,
                           const std::string& gain_table_path);

struct ExperimentOutcome {
  std::string name;
  GaitResult gait;
  bool converged = false;
  int exit_code = 1;
};

/// Run one experiment and write trajectory.csv, steps.csv, summary.json and
/// the SVG plots into out_dir (created if needed).  quiet suppresses the
/// per-experiment stdout line.
ExperimentOutcome run_experiment(const ResolvedExperiment& exp,
                                 const std::string& out_dir, bool quiet);

/// One line of the sweep aggregate for this outcome (CSV, no newline).
std::string aggregate_row(const ResolvedExperiment& exp,
                          const ExperimentOutcome& out);
std::string aggregate_header();

}  // namespace tslip::cli
