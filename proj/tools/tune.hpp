#pragma once

#include <string>

namespace tslip::cli {

struct TuneOptions {
  std::string out_path = "data/gains.json";
  std::string filter;   ///< substring filter on cell names ("B-3-level", ...)
  bool quick = false;   ///< reduced search, for smoke-testing the pipeline
  bool verbose = true;
};

/// Regenerate the gain table: seed periodic orbits by continuation from the
/// conservative gait, tune the discrete-controller gains, pick the damping
/// per cell, and freeze the converged closed-loop fixed points.
int run_tune(const TuneOptions& opt);

}  // namespace tslip::cli
