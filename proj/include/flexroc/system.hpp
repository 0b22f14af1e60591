#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flexroc/matrix.hpp"

namespace flexroc {

/// Discrete-time LTI model
///   x(t+1) = A x(t) + B r(t) + D u(t) + E v(t)
/// with n states, m binary reference inputs r, p continuous recourse inputs u
/// and q binary recourse inputs v, over a horizon of `horizon` steps.
struct SystemDynamics {
  Matrix A;  // n x n
  Matrix B;  // n x m
  Matrix D;  // n x p
  Matrix E;  // n x q
  Vec x0;    // length n
  int horizon = 1;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(D.cols()); }
  int q() const { return static_cast<int>(E.cols()); }

  /// Throws std::invalid_argument naming the offending matrix on any
  /// dimension inconsistency.
  void validate() const;
};

/// Per-step linear constraints
///   Gx x(t) <= gx
///   Gr r(t) + Gu u(t) + Gv v(t) <= gr.
/// The optional per-step right-hand sides gx_steps / gr_steps (one row of
/// bounds per time step) override the repeated gx / gr, which is how
/// time-varying resource caps (e.g. a solar availability profile) enter.
struct ConstraintSet {
  Matrix Gx;  // rows_x x n
  Vec gx;     // rows_x
  Matrix Gr;  // rows_u x m
  Matrix Gu;  // rows_u x p
  Matrix Gv;  // rows_u x q
  Vec gr;     // rows_u

  Matrix gx_steps;  // optional, N x rows_x
  Matrix gr_steps;  // optional, N x rows_u

  int rows_x() const { return static_cast<int>(Gx.rows()); }
  int rows_u() const { return static_cast<int>(Gr.rows()); }

  void validate(const SystemDynamics& dyn) const;
};

/// Horizon-stacked prediction and constraint data:
///   x = Fx x0 + Fr r + Fu u + Fv v
/// with x = [x(1); ...; x(N)] and r, u, v stacked the same way, plus the
/// block-diagonal stacked constraint matrices and bounds.
struct StackedSystem {
  Matrix Fx;  // nN x n
  Matrix Fr;  // nN x mN
  Matrix Fu;  // nN x pN
  Matrix Fv;  // nN x qN

  Matrix Gx_s;  // (N rows_x) x nN, block diagonal
  Vec gx_s;
  Matrix Gr_s;  // (N rows_u) x mN
  Matrix Gu_s;  // (N rows_u) x pN
  Matrix Gv_s;  // (N rows_u) x qN
  Vec gr_s;

  int n = 0, m = 0, p = 0, q = 0, N = 0;
};

enum class CostMode : std::uint8_t { gamma_only, cost_and_gamma };

/// Linear stage costs summed over the horizon plus the flexibility weight.
/// In gamma_only mode all cost vectors must be zero and the objective is
/// purely the reserved flexibility budget.
struct CostSpec {
  Vec c_x;  // nN
  Vec c_u;  // pN
  Vec c_v;  // qN
  Vec c_r;  // mN
  double lambda = 1.0;
  CostMode mode = CostMode::gamma_only;

  void validate(const StackedSystem& st) const;
};

/// Which reference-input indices (within the stacked horizon, 0..mN-1) are
/// flexible. Indices in `flexible` may be flipped by the external entity;
/// all others stay at the nominal pattern r_bar. Because references are
/// binary, a flipped index k takes the value 1 - r_bar[k].
struct UncertaintyPartition {
  std::vector<int> flexible;     // ordered set U
  std::vector<std::uint8_t> r_bar;  // length mN, entries in {0,1}

  int u_size() const { return static_cast<int>(flexible.size()); }

  /// Complement of `flexible` in {0,...,mN-1}, ascending.
  std::vector<int> fixed_indices() const;

  void validate(int mN) const;
};

enum class RowKind : std::uint8_t { state, input, binary_box, epigraph };

/// The robust program data: every constraint of the stacked problem written
/// as  O r + P u + Q v <= h, with the initial state folded into h. Rows are
/// state rows, input rows, the binary box rows 0 <= v <= 1, and (in
/// cost_and_gamma mode) one epigraph row carrying an implicit -theta term.
struct CompactConstraints {
  Matrix O;  // |I| x mN
  Matrix P;  // |I| x pN
  Matrix Q;  // |I| x qN
  Vec h;     // |I|
  std::vector<RowKind> kind;
  int epigraph_row = -1;  // -1 when gamma_only
  std::vector<std::string> warnings;

  int num_rows() const { return static_cast<int>(h.size()); }
};

/// Report entry for one violated constraint row; margin = lhs - rhs > tol.
struct Violation {
  int row = -1;
  RowKind kind = RowKind::state;
  double margin = 0.0;
};

struct ViolationReport {
  std::vector<Violation> violations;
  double max_margin = 0.0;  // largest lhs - rhs over all rows (may be <= 0)

  bool ok() const { return violations.empty(); }
};

/// Builds the stacked prediction matrices and block-diagonal constraints.
StackedSystem build_stacked(const SystemDynamics& dyn, const ConstraintSet& cons);

/// Assembles the compact robust program. Emits rows in the order: state
/// rows, input rows, binary box rows, then the epigraph row if cost mode
/// asks for one; |I| = N rows_x + N rows_u + 2 q N + [cost_and_gamma].
CompactConstraints build_compact(const StackedSystem& st, const CostSpec& cost,
                                 const UncertaintyPartition& part, const Vec& x0);

/// Runs the state recursion; returns [x(1); ...; x(N)] stacked.
Vec simulate(const SystemDynamics& dyn, const Vec& x0, const Vec& r, const Vec& u, const Vec& v);

/// Checks the raw per-step constraints against a simulated trajectory.
/// Rows are indexed: step-major state rows first (N * rows_x), then
/// step-major input rows (N * rows_u). Boundary points within tol pass.
ViolationReport check_constraints(const Vec& traj, const Vec& r, const Vec& u, const Vec& v,
                                  const SystemDynamics& dyn, const ConstraintSet& cons,
                                  double tol = 1e-6);

/// Evaluates the compact rows at (r, u, v); returns lhs vector O r + P u + Q v.
/// The epigraph row, if present, is evaluated without the -theta term.
Vec compact_lhs(const CompactConstraints& cc, const Vec& r, const Vec& u, const Vec& v);

}  // namespace flexroc
