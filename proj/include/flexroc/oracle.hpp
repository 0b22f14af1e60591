#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "flexroc/milp.hpp"
#include "flexroc/parallel.hpp"
#include "flexroc/reform.hpp"
#include "flexroc/system.hpp"

namespace flexroc {

/// One admissible realization: the flipped subset S of the flexible set and
/// the induced reference vector (r_j = 1 - r_bar_j on S, nominal elsewhere).
struct Scenario {
  std::vector<int> flipped;  // actual reference indices, ascending in U order
  Vec r;                     // length mN
};

/// All scenarios with |S| <= gamma, ordered by cardinality and then
/// lexicographically in the flexible set's ordering. The count is
/// sum_{i<=gamma} C(|U|, i); enumeration is the ground truth the rest of the
/// library is checked against.
std::vector<Scenario> enumerate_scenarios(const UncertaintyPartition& part, int gamma);

enum class ExhaustiveMode : std::uint8_t { adjustable, static_single };

struct GammaCertificate {
  int gamma_star = 0;
  /// First infeasible scenario in enumeration order when gamma_star < |U|
  /// (adjustable mode only).
  std::optional<Scenario> blocking;
  unsigned long long scenarios_checked = 0;
  long milp_nodes = 0;
  long lp_iterations = 0;
};

/// Exhaustive-search budget. adjustable: every scenario gets its own
/// recourse (u, v); scenarios are checked level by level and the search
/// stops after the first level with an infeasible scenario. static_single:
/// one (u, v) must serve every scenario with |S| <= gamma, searched over
/// gamma descending; exact but exponential, desk-scale only. The nominal
/// scenario must be feasible or a std::runtime_error is thrown.
GammaCertificate exhaustive_gamma(const CompactConstraints& cc, const UncertaintyPartition& part,
                                  ExhaustiveMode mode, const SolverOptions& solver_opts = {},
                                  ParallelMode par = default_parallel_mode());

struct ScenarioViolation {
  std::size_t scenario = 0;  // index in enumeration order
  int row = -1;              // raw constraint row, or box index for binary breaches
  RowKind kind = RowKind::state;
  double margin = 0.0;
};

struct PolicyVerification {
  unsigned long long scenarios_checked = 0;
  std::vector<ScenarioViolation> violations;
  double max_margin = 0.0;
  std::optional<double> worst_cost;  // present when a cost spec is supplied

  bool ok() const { return violations.empty(); }
};

/// Replays the policy through every scenario with |S| <= gamma: apply the
/// recourse, check the binary outputs stay in {0,1}, simulate, and check all
/// raw constraints at the given tolerance. Results are identical in serial
/// and OpenMP mode (violations are merged in enumeration order).
PolicyVerification verify_policy(const AffinePolicy& policy, int gamma, const SystemDynamics& dyn,
                                 const ConstraintSet& cons, const UncertaintyPartition& part,
                                 double tol = 1e-6, const CostSpec* cost = nullptr,
                                 ParallelMode par = default_parallel_mode());

/// Exact maximum of the stage cost over all scenarios with |S| <= gamma;
/// ties resolve to the earliest scenario in enumeration order.
std::pair<double, Scenario> worst_case_cost(const AffinePolicy& policy, int gamma,
                                            const CostSpec& cost, const SystemDynamics& dyn,
                                            const UncertaintyPartition& part);

/// Per-step min/max of one state coordinate over all enumerated scenarios.
struct StateEnvelope {
  Vec min_state;  // length N
  Vec max_state;  // length N
};

StateEnvelope state_envelope(const AffinePolicy& policy, int gamma, const SystemDynamics& dyn,
                             const UncertaintyPartition& part, int state_dim = 0,
                             ParallelMode par = default_parallel_mode());

}  // namespace flexroc
