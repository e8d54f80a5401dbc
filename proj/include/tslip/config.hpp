#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tslip/control.hpp"
#include "tslip/gait.hpp"
#include "tslip/model.hpp"
#include "tslip/terrain.hpp"

namespace tslip {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Reference into the shipped gain table.
struct CellRef {
  double speed = 0.0;
  double grade = 0.0;
  char vp_side = 'B';
};

/// Controller source: a gain-table cell, explicit values, or a cell with
/// selected fields overridden.
struct ControllerSpec {
  std::optional<CellRef> cell;
  std::optional<ControllerGains> gains;
  std::optional<double> theta_td0;
  std::optional<VpConfig> vp0;
  std::optional<ApexState> apex0;
  std::optional<double> damping;  ///< overrides the cell's damping
};

struct ExperimentConfig {
  std::string name = "experiment";
  ModelParams model;
  TerrainSpec terrain;
  GaitOptions gait;
  IntegratorSettings integrator;
  ControllerSpec controller;
};

/// Parse a config file: either a single experiment object or
/// {"experiments": [...]} with shared top-level defaults.  Unknown keys are
/// rejected with the offending path in the error message.  schema_version 1.
std::vector<ExperimentConfig> load_experiments(const std::string& path);

/// Optional top-level "gain_table" override in the same file ("" if absent).
std::string config_gain_table(const std::string& path);

}  // namespace tslip
