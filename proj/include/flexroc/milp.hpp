#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "flexroc/matrix.hpp"
#include "flexroc/parallel.hpp"

namespace flexroc {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : std::uint8_t { le, eq, ge };
enum class VarType : std::uint8_t { continuous, integer, binary };

struct SparseRow {
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  RowSense sense = RowSense::le;
  double rhs = 0.0;
  std::string name;
};

/// Standard-form mixed-integer program, minimization sense.
struct MilpProblem {
  Vec objective;
  std::vector<SparseRow> rows;
  Vec lower;  // -inf allowed
  Vec upper;  // +inf allowed
  std::vector<VarType> vtype;
  std::vector<std::string> var_names;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_var(const std::string& name, double lo, double up,
              VarType type = VarType::continuous, double obj = 0.0) {
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(up);
    vtype.push_back(type);
    var_names.push_back(name);
    return num_vars() - 1;
  }

  void add_row(SparseRow row) { rows.push_back(std::move(row)); }

  /// Throws std::invalid_argument on malformed input: out-of-range variable
  /// indices, binary bounds outside [0,1], or integer variables without
  /// finite bounds (branch-and-bound requires them).
  void validate() const;
};

enum class SolveStatus : std::uint8_t { optimal, infeasible, unbounded, node_limit, iteration_limit };

std::string to_string(SolveStatus s);

struct LpSolution {
  SolveStatus status = SolveStatus::infeasible;
  Vec x;
  /// Per original row. Convention: the Lagrangian is c'x + sum_i dual_i *
  /// (a_i'x - b_i), so dual_i >= 0 for <= rows, dual_i <= 0 for >= rows,
  /// free for equalities.
  Vec duals;
  double objective = 0.0;
  long iterations = 0;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::infeasible;
  Vec x;
  double objective = 0.0;
  long nodes = 0;
  long lp_iterations = 0;
  double wall_seconds = 0.0;
};

struct SolverOptions {
  double lp_tol = 1e-7;
  double int_tol = 1e-6;
  double abs_gap = 1e-6;
  long max_nodes = 1'000'000;
  long max_lp_iterations = 500'000;
  std::uint64_t seed = 0;  // tie-breaks in node selection and branching
  bool rounding_heuristic = true;
  ParallelMode parallel = default_parallel_mode();

  void validate() const;
};

/// Solves the LP relaxation (integrality dropped). Optional bound overrides
/// replace the problem's variable bounds; used by branch-and-bound nodes.
LpSolution solve_lp(const MilpProblem& p, const SolverOptions& opts = {},
                    const Vec* lower_override = nullptr, const Vec* upper_override = nullptr);

/// Branch-and-bound with best-bound node selection and most-fractional
/// branching. Deterministic given the options seed.
MilpSolution solve_milp(const MilpProblem& p, const SolverOptions& opts = {});

/// True iff the primal/dual pair certifies optimality: objectives agree
/// within 10 * lp_tol and complementary slackness holds at the same scale.
bool lp_duality_check(const MilpProblem& p, const LpSolution& sol, const SolverOptions& opts = {});

/// Writes the problem in LP-style text (objective, rows, bounds, general /
/// binary sections) with full-precision decimal literals so the file is
/// byte-stable across runs.
std::string to_lp_format(const MilpProblem& p);

}  // namespace flexroc
