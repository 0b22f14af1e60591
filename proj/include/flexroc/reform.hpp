#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flexroc/milp.hpp"
#include "flexroc/system.hpp"

namespace flexroc {

/// Affine recourse maps from the realized references to the control inputs:
///   u_k = sum_j cont_gain(k,j) r_{U[j]} + cont_offset_k
///   v_k = sum_j bin_gain(k,j)  r_{U[j]} + bin_offset_k
/// Integer gains and offsets are stored exactly, so v is integer-valued by
/// construction for any binary realization.
struct AffinePolicy {
  Matrix cont_gain;  // pN x |U|
  Vec cont_offset;   // pN
  std::vector<std::vector<int>> bin_gain;  // qN rows of |U| entries
  std::vector<int> bin_offset;             // qN
  std::vector<int> flexible;               // column order, copied from the partition
};

struct SolverStats {
  long nodes = 0;
  long lp_iterations = 0;
  double wall_seconds = 0.0;
};

/// Outcome of a reformulation solve: the reserved budget, its certificate
/// delta, the recourse policy and solver accounting.
struct FlexibilityResult {
  int gamma_star = 0;
  std::vector<std::uint8_t> delta;
  AffinePolicy policy;
  std::optional<double> theta;
  double objective = 0.0;
  SolverStats stats;
  std::vector<std::string> warnings;
};

/// Which sign the dual rows use for the nominal-reference term. `derivation`
/// subtracts it (the sound convention); `statement` adds it and is kept
/// selectable because it demonstrably over-claims flexibility on fixtures
/// with down-ward flexible references.
enum class DualSign : std::uint8_t { derivation, statement };

enum class PolicyMode : std::uint8_t { affine, open_loop };

struct ReformOptions {
  double big_m = 1e4;
  PolicyMode policy_mode = PolicyMode::affine;
  DualSign dual_sign = DualSign::derivation;
  double gain_bound = 1e3;  // |cont_gain| bound
  int bin_gain_lo = -1;
  int bin_gain_hi = 1;
  int bin_offset_lo = 0;
  int bin_offset_hi = 1;
  /// When >= 0, adds one extra row sum(delta) >= force_gamma_min. Diagnostic
  /// escape hatch for probing a pipeline at a budget it did not choose.
  int force_gamma_min = -1;

  void validate() const;
};

/// Records where every named decision variable landed in the emitted MILP.
struct VariableMap {
  int theta = -1;
  std::vector<int> delta;
  std::vector<int> cont_gain;    // pN * |U|, row-major; empty in open-loop mode
  std::vector<int> cont_offset;  // pN
  std::vector<int> bin_gain;     // qN * |U|; empty in open-loop mode
  std::vector<int> bin_offset;   // qN
  std::vector<int> mu;    // |I| * |U|
  std::vector<int> pi;    // |I|
  std::vector<int> phi;   // |I|
  std::vector<int> yabs;  // |I| * |U|
  std::vector<int> beta;  // |I| * |U|
  int u_size = 0;
  int n_compact_rows = 0;
  int pN = 0;
  int qN = 0;
};

struct ReformModel {
  MilpProblem milp;
  VariableMap vmap;
  std::vector<std::string> warnings;
};

/// Emits the strong-duality + big-M reformulation of the robust program as a
/// single MILP. Row layout per compact row i: one master row, |U| dual rows,
/// 2|U| absolute-value rows, one nominal-term row, 4|U| big-M rows; total
/// |I| * (2 + 7 |U|) rows, linear in |U|.
ReformModel build_theorem1_milp(const CompactConstraints& cc, const UncertaintyPartition& part,
                                const CostSpec& cost, const ReformOptions& opts = {});

/// Same construction with the policy restricted to constant (open-loop)
/// inputs: the gain columns are removed from the model, not just fixed.
ReformModel build_open_loop_milp(const CompactConstraints& cc, const UncertaintyPartition& part,
                                 const CostSpec& cost, const ReformOptions& opts = {});

/// Maps an optimal MILP solution back to the budget and policy. Integer
/// variables are rounded with a residual check of 1e-6; larger residuals
/// throw, signalling a solver tolerance failure.
FlexibilityResult extract_solution(const MilpSolution& sol, const ReformModel& model,
                                   const UncertaintyPartition& part, const CostSpec& cost,
                                   const ReformOptions& opts = {});

/// Evaluates the policy at a realization. The realization must agree with
/// the nominal pattern off the flexible set; anything else throws.
std::pair<Vec, Vec> policy_response(const AffinePolicy& policy, const Vec& r_realized,
                                    const UncertaintyPartition& part);

struct ConstraintCounts {
  long long theorem1_rows = 0;
  unsigned long long exhaustive_scenarios = 0;
};

/// Closed-form size comparison: rows of the reformulated MILP (for a compact
/// program with `compact_rows` rows plus the epigraph row in cost mode)
/// versus the scenario count sum_{i<=gamma} C(u_size, i) of the exhaustive
/// route.
ConstraintCounts count_constraints(int compact_rows, int u_size, int gamma, CostMode mode);

/// sum_{i=0}^{gamma} C(u_size, i); the number of admissible scenarios.
unsigned long long scenario_count(int u_size, int gamma);

}  // namespace flexroc
