#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flexroc/config.hpp"
#include "flexroc/montecarlo.hpp"
#include "flexroc/oracle.hpp"

namespace flexroc {

struct BoundsReport {
  std::vector<ProbabilityBound> per_row;   // row-wise violation bounds
  std::optional<ProbabilityBound> budget;  // undefined when gamma = 0
  McReport mc;
};

/// Everything a scheme run produces. Wall time is kept out of the
/// serialized report (reports are byte-identical across reruns of the same
/// config); it travels in the scaling table instead.
struct RunReport {
  int scheme = 1;
  SolveStatus status = SolveStatus::infeasible;
  int gamma_star = -1;
  std::vector<std::uint8_t> delta;
  std::optional<AffinePolicy> policy;  // schemes 1 and 3
  std::optional<double> theta;
  double objective = 0.0;
  SolverStats stats;
  long long model_rows = 0;  // emitted MILP rows for schemes 1 and 3
  unsigned long long scenario_count_at_gamma = 0;
  unsigned long long scenarios_checked = 0;
  std::optional<PolicyVerification> verification;
  std::optional<Scenario> blocking;
  std::optional<BoundsReport> bounds;
  double wall_seconds = 0.0;
  std::string config_hash_hex;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::vector<std::string> warnings;
};

struct RunOptions {
  ParallelMode parallel = default_parallel_mode();
  unsigned long long mc_samples = 100000;
  /// Forwarded to the reformulation builder; probes a pipeline at a budget
  /// it did not choose (criterion checks use it against scheme 3).
  int force_gamma_min = -1;
};

/// scheme 1: affine reformulation pipeline; scheme 2: exhaustive
/// per-scenario search; scheme 3: open-loop reformulation. Schemes 1 and 3
/// verify their extracted policy by full enumeration and attach bound /
/// Monte-Carlo sections when the config carries a flip model.
RunReport run_scheme(const ScenarioConfig& cfg, int scheme, const RunOptions& opts = {});

/// Deterministic serialized form (JSON text, sorted keys, exact decimals).
std::string report_to_text(const RunReport& rep);
void write_report(const RunReport& rep, const std::string& path);

/// Reads a policy back out of a serialized report, for the verify/bounds
/// subcommands. Throws on malformed input.
struct SavedRun {
  int scheme = 0;
  int gamma_star = 0;
  AffinePolicy policy;
};
SavedRun parse_report_text(const std::string& text);
SavedRun load_report(const std::string& path);

/// Scaling table: one row per (u_size, scheme) pair.
std::string scaling_csv_header();
std::string scaling_csv_row(int u_size, int scheme, double wall_seconds, int gamma_star,
                            long long row_count, unsigned long long scen_count);

/// Envelope table rows: time_index, min, max, lower bound, upper bound, all
/// in display units (state + offset).
void write_envelope_csv(const std::string& path, const StateEnvelope& env, double lower,
                        double upper, double offset);

}  // namespace flexroc
