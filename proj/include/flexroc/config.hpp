#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flexroc/bounds.hpp"
#include "flexroc/milp.hpp"
#include "flexroc/reform.hpp"
#include "flexroc/system.hpp"

namespace flexroc {

/// Everything one run needs, loadable from a versioned JSON file. Matrices
/// are row-major nested arrays; all module invariants are enforced at load
/// with field-precise error paths.
struct ScenarioConfig {
  int schema_version = 1;
  SystemDynamics dynamics;
  double sampling_minutes = 30.0;
  ConstraintSet constraints;
  CostSpec cost;
  UncertaintyPartition uncertainty;
  ReformOptions reform;
  SolverOptions solver;
  std::optional<FlipModel> flip_model;

  /// Display metadata for envelope emission: reported value = state + offset.
  double state_offset = 0.0;
  std::optional<std::pair<double, double>> display_bounds;
};

struct ConfigError {
  std::string path;  // e.g. "uncertainty.r_bar[3]"
  std::string message;
};

struct ConfigLoadResult {
  std::optional<ScenarioConfig> config;
  std::vector<ConfigError> errors;

  bool ok() const { return config.has_value() && errors.empty(); }
};

/// Parses and fully validates; on failure every detected problem is listed,
/// not just the first.
ConfigLoadResult load_config(const std::string& path);
ConfigLoadResult parse_config_text(const std::string& text);

std::string config_to_text(const ScenarioConfig& cfg);
void save_config(const ScenarioConfig& cfg, const std::string& path);

/// FNV-1a over the canonical serialized form; embedded in run reports so
/// results are traceable to their inputs.
std::string config_hash(const ScenarioConfig& cfg);

}  // namespace flexroc
