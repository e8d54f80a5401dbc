#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tslip/tuning.hpp"

namespace tslip {

struct GainTableError : std::runtime_error {
  explicit GainTableError(const std::string& what) : std::runtime_error(what) {}
};

/// Tuned controller cells shipped with the repository, keyed by
/// (speed, grade, vp_side).  The table is regenerable with `tslip tune`.
struct GainTable {
  int schema_version = 1;
  std::vector<GainCell> cells;
};

GainTable load_gain_table(const std::string& path);
void save_gain_table(const std::string& path, const GainTable& table);

/// Exact-key lookup (tolerance 1e-9 on the numeric keys).
std::optional<GainCell> find_cell(const GainTable& table, double speed,
                                  double grade, char vp_side);

}  // namespace tslip
