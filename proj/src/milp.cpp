#include "flexroc/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <queue>
#include <set>
#include <stdexcept>

#include "flexroc/rng.hpp"
#include "flexroc/simplex.hpp"

namespace flexroc {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::node_limit: return "node_limit";
    case SolveStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

void MilpProblem::validate() const {
  const int n = num_vars();
  if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n ||
      static_cast<int>(vtype.size()) != n)
    throw std::invalid_argument("variable arrays have inconsistent lengths");
  for (int j = 0; j < n; ++j) {
    if (lower[j] > upper[j])
      throw std::invalid_argument("variable " + std::to_string(j) + ": lower bound above upper");
    if (vtype[j] == VarType::binary && (lower[j] < -1e-9 || upper[j] > 1.0 + 1e-9))
      throw std::invalid_argument("variable " + std::to_string(j) + ": binary bounds outside [0,1]");
    if (vtype[j] != VarType::continuous && (!std::isfinite(lower[j]) || !std::isfinite(upper[j])))
      throw std::invalid_argument("variable " + std::to_string(j) +
                                  ": integer variables need finite bounds");
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [j, coef] : rows[i].terms) {
      (void)coef;
      if (j < 0 || j >= n)
        throw std::invalid_argument("row " + std::to_string(i) + ": variable index out of range");
    }
}

void SolverOptions::validate() const {
  if (!(lp_tol > 0.0) || !(int_tol > 0.0) || !(abs_gap > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (max_nodes < 1 || max_lp_iterations < 1)
    throw std::invalid_argument("solver limits must be positive");
}

namespace {

constexpr double kPivTol = 1e-9;
constexpr double kDegenTol = 1e-11;
constexpr int kBlandStall = 50;  // consecutive degenerate pivots before Bland's rule

enum class CState : std::int8_t { at_lower, at_upper, interior, basic };

struct Simplex {
  // Canonical internal form: min c'x s.t. A x <= b, clo <= x <= cup, with
  // slack columns appended and artificial columns for initially violated
  // rows. Rows of `tab` are the m constraint rows plus two reduced-cost
  // rows (phase 1, phase 2).
  int n_struct = 0;
  int m = 0;
  int n_art = 0;
  int ncols = 0;
  std::vector<double> tab;
  Vec x_basic;
  std::vector<int> basis;
  std::vector<CState> state;
  Vec val;  // current value of nonbasic columns
  Vec clo, cup;
  std::vector<char> banned;
  Vec cost;  // phase-2 objective per column (structural only nonzero)
  long iterations = 0;
  ParallelMode mode = ParallelMode::serial;

  double* row(int i) { return tab.data() + static_cast<std::size_t>(i) * ncols; }
  const double* row(int i) const { return tab.data() + static_cast<std::size_t>(i) * ncols; }
  double* d1() { return row(m); }
  double* d2() { return row(m + 1); }

  double col_value(int j) const {
    if (state[j] == CState::basic) {
      for (int i = 0; i < m; ++i)
        if (basis[i] == j) return x_basic[i];
      return 0.0;
    }
    return val[j];
  }
};

struct InternalRow {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;
  int orig = -1;
  int sign = 1;  // +1: original direction, -1: negated (from >= or the >= half of =)
};

std::vector<InternalRow> canonicalize(const MilpProblem& p) {
  std::vector<InternalRow> out;
  out.reserve(p.rows.size());
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const SparseRow& r = p.rows[i];
    if (r.sense == RowSense::le || r.sense == RowSense::eq)
      out.push_back({r.terms, r.rhs, static_cast<int>(i), +1});
    if (r.sense == RowSense::ge || r.sense == RowSense::eq) {
      InternalRow neg;
      neg.terms = r.terms;
      for (auto& [j, c] : neg.terms) c = -c;
      neg.rhs = -r.rhs;
      neg.orig = static_cast<int>(i);
      neg.sign = -1;
      out.push_back(std::move(neg));
    }
  }
  return out;
}

// Entering-candidate bookkeeping for one pricing pass.
struct Entering {
  int col = -1;
  int dir = 0;
  double score = 0.0;
};

Entering price(const Simplex& s, const double* d, double dtol, bool bland) {
  Entering best;
  for (int j = 0; j < s.ncols; ++j) {
    if (s.state[j] == CState::basic || s.banned[j]) continue;
    if (s.clo[j] == s.cup[j]) continue;  // fixed, cannot move
    const double dj = d[j];
    int dir = 0;
    double score = 0.0;
    switch (s.state[j]) {
      case CState::at_lower:
        if (dj < -dtol) { dir = +1; score = -dj; }
        break;
      case CState::at_upper:
        if (dj > dtol) { dir = -1; score = dj; }
        break;
      case CState::interior:
        if (dj < -dtol) { dir = +1; score = -dj; }
        else if (dj > dtol) { dir = -1; score = dj; }
        break;
      default: break;
    }
    if (dir == 0) continue;
    if (bland) return {j, dir, score};
    if (score > best.score) best = {j, dir, score};
  }
  return best;
}

struct RatioResult {
  double step = kInf;
  int leave_row = -1;
  int bound_side = 0;  // -1: leaving var hits lower, +1: hits upper
};

RatioResult ratio_test(const Simplex& s, const Vec& ycol, int dir, bool bland) {
  RatioResult res;
  double best_piv = 0.0;
  for (int i = 0; i < s.m; ++i) {
    const double y = ycol[i];
    const double rate = dir * y;  // basic value changes by -rate * step
    if (rate > kPivTol) {
      const double lo = s.clo[s.basis[i]];
      if (lo == -kInf) continue;
      double ratio = (s.x_basic[i] - lo) / rate;
      if (ratio < 0.0) ratio = 0.0;
      const bool better =
          ratio < res.step - 1e-12 ||
          (ratio < res.step + 1e-12 &&
           (bland ? (res.leave_row < 0 || s.basis[i] < s.basis[res.leave_row])
                  : std::abs(y) > best_piv));
      if (better) {
        res = {ratio, i, -1};
        best_piv = std::abs(y);
      }
    } else if (rate < -kPivTol) {
      const double up = s.cup[s.basis[i]];
      if (up == kInf) continue;
      double ratio = (up - s.x_basic[i]) / (-rate);
      if (ratio < 0.0) ratio = 0.0;
      const bool better =
          ratio < res.step - 1e-12 ||
          (ratio < res.step + 1e-12 &&
           (bland ? (res.leave_row < 0 || s.basis[i] < s.basis[res.leave_row])
                  : std::abs(y) > best_piv));
      if (better) {
        res = {ratio, i, +1};
        best_piv = std::abs(y);
      }
    }
  }
  return res;
}

void apply_pivot(Simplex& s, int leave_row, int enter_col) {
  double* prow = s.row(leave_row);
  const double piv = prow[enter_col];
  const double inv = 1.0 / piv;
  for (int j = 0; j < s.ncols; ++j) prow[j] *= inv;
  prow[enter_col] = 1.0;

  static thread_local std::vector<int> nz;
  nz.clear();
  for (int j = 0; j < s.ncols; ++j)
    if (prow[j] != 0.0) nz.push_back(j);

  detail::eliminate_rows(s.tab.data(), static_cast<std::size_t>(s.m) + 2,
                         static_cast<std::size_t>(s.ncols), static_cast<std::size_t>(leave_row),
                         static_cast<std::size_t>(enter_col), nz.data(),
                         static_cast<int>(nz.size()), s.mode);
}

// One simplex phase; drow selects the reduced-cost row. Returns optimal /
// unbounded / iteration_limit.
SolveStatus run_phase(Simplex& s, int drow_index, double dtol, long max_iters) {
  int degen_run = 0;
  bool bland = false;
  Vec ycol(static_cast<std::size_t>(s.m));
  while (true) {
    if (s.iterations >= max_iters) return SolveStatus::iteration_limit;
    const double* d = s.row(drow_index);
    Entering ent = price(s, d, dtol, bland);
    if (ent.col < 0) return SolveStatus::optimal;

    const int e = ent.col;
    const int dir = ent.dir;
    const double own_limit =
        dir > 0 ? (s.cup[e] == kInf ? kInf : s.cup[e] - s.val[e])
                : (s.clo[e] == -kInf ? kInf : s.val[e] - s.clo[e]);

    for (int i = 0; i < s.m; ++i) ycol[static_cast<std::size_t>(i)] = s.row(i)[e];
    RatioResult rr = ratio_test(s, ycol, dir, bland);
    const double step = std::min(own_limit, rr.step);
    if (step == kInf) return SolveStatus::unbounded;

    ++s.iterations;
    if (step > 0.0)
      for (int i = 0; i < s.m; ++i)
        if (ycol[static_cast<std::size_t>(i)] != 0.0)
          s.x_basic[i] -= dir * step * ycol[static_cast<std::size_t>(i)];

    if (own_limit <= rr.step) {
      // Bound flip: the entering variable reaches its other bound first.
      s.val[e] = dir > 0 ? s.cup[e] : s.clo[e];
      s.state[e] = dir > 0 ? CState::at_upper : CState::at_lower;
      degen_run = 0;
      bland = false;
      continue;
    }

    const int r = rr.leave_row;
    const int leave_col = s.basis[r];
    const double enter_val = s.val[e] + dir * step;
    apply_pivot(s, r, e);
    s.basis[r] = e;
    s.state[e] = CState::basic;
    s.x_basic[r] = enter_val;
    s.state[leave_col] = rr.bound_side < 0 ? CState::at_lower : CState::at_upper;
    s.val[leave_col] = rr.bound_side < 0 ? s.clo[leave_col] : s.cup[leave_col];

    if (step <= kDegenTol) {
      if (++degen_run >= kBlandStall) bland = true;
    } else {
      degen_run = 0;
      bland = false;
    }
  }
}

}  // namespace

LpSolution solve_lp(const MilpProblem& p, const SolverOptions& opts, const Vec* lower_override,
                    const Vec* upper_override) {
  p.validate();
  opts.validate();
  const int n = p.num_vars();
  const Vec& lo = lower_override ? *lower_override : p.lower;
  const Vec& up = upper_override ? *upper_override : p.upper;

  LpSolution sol;
  sol.duals.assign(p.rows.size(), 0.0);

  for (int j = 0; j < n; ++j)
    if (lo[j] > up[j] + 1e-12) {
      sol.status = SolveStatus::infeasible;
      return sol;
    }

  const std::vector<InternalRow> irows = canonicalize(p);
  const int m = static_cast<int>(irows.size());

  // No constraint rows: optimize each variable against its own bounds.
  if (m == 0) {
    sol.x.assign(static_cast<std::size_t>(n), 0.0);
    double obj = 0.0;
    for (int j = 0; j < n; ++j) {
      const double c = p.objective[j];
      double xj;
      if (c > 0.0) xj = lo[j];
      else if (c < 0.0) xj = up[j];
      else xj = std::isfinite(lo[j]) ? std::min(std::max(0.0, lo[j]), up[j])
                                     : (std::isfinite(up[j]) ? std::min(up[j], 0.0) : 0.0);
      if (!std::isfinite(xj)) {
        sol.status = SolveStatus::unbounded;
        return sol;
      }
      sol.x[j] = xj;
      obj += c * xj;
    }
    sol.objective = obj;
    sol.status = SolveStatus::optimal;
    return sol;
  }

  Simplex s;
  s.n_struct = n;
  s.m = m;
  s.mode = opts.parallel;

  // Starting point: doubly-signed ranges start at an interior zero so the
  // first basis is not dragged to a far-away bound; everything else starts
  // at its nearest finite bound.
  s.state.assign(static_cast<std::size_t>(n), CState::at_lower);
  s.val.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    if (lo[j] == -kInf && up[j] == kInf) {
      s.state[j] = CState::interior;
      s.val[j] = 0.0;
    } else if (lo[j] < 0.0 && up[j] > 0.0) {
      s.state[j] = CState::interior;
      s.val[j] = 0.0;
    } else if (lo[j] == -kInf) {
      s.state[j] = CState::at_upper;
      s.val[j] = up[j];
    } else if (up[j] == kInf) {
      s.state[j] = CState::at_lower;
      s.val[j] = lo[j];
    } else if (std::abs(lo[j]) <= std::abs(up[j])) {
      s.state[j] = CState::at_lower;
      s.val[j] = lo[j];
    } else {
      s.state[j] = CState::at_upper;
      s.val[j] = up[j];
    }
  }

  Vec slack0(static_cast<std::size_t>(m), 0.0);
  std::vector<char> violated(static_cast<std::size_t>(m), 0);
  int n_art = 0;
  for (int i = 0; i < m; ++i) {
    double act = 0.0;
    for (const auto& [j, c] : irows[i].terms) act += c * s.val[j];
    slack0[i] = irows[i].rhs - act;
    if (slack0[i] < -1e-10) {
      violated[i] = 1;
      ++n_art;
    }
  }
  s.n_art = n_art;
  s.ncols = n + m + n_art;
  s.tab.assign(static_cast<std::size_t>(s.m + 2) * s.ncols, 0.0);
  s.basis.assign(static_cast<std::size_t>(m), -1);
  s.x_basic.assign(static_cast<std::size_t>(m), 0.0);
  s.state.resize(static_cast<std::size_t>(s.ncols), CState::at_lower);
  s.val.resize(static_cast<std::size_t>(s.ncols), 0.0);
  s.clo.assign(static_cast<std::size_t>(s.ncols), 0.0);
  s.cup.assign(static_cast<std::size_t>(s.ncols), kInf);
  s.banned.assign(static_cast<std::size_t>(s.ncols), 0);
  s.cost.assign(static_cast<std::size_t>(s.ncols), 0.0);
  for (int j = 0; j < n; ++j) {
    s.clo[j] = lo[j];
    s.cup[j] = up[j];
    s.cost[j] = p.objective[j];
  }

  int art = n + m;
  for (int i = 0; i < m; ++i) {
    double* trow = s.row(i);
    const double sign = violated[i] ? -1.0 : 1.0;
    for (const auto& [j, c] : irows[i].terms) trow[j] += sign * c;
    trow[n + i] = sign;
    if (violated[i]) {
      trow[art] = 1.0;
      s.basis[i] = art;
      s.state[art] = CState::basic;
      s.x_basic[i] = -slack0[i];
      ++art;
    } else {
      s.basis[i] = n + i;
      s.state[n + i] = CState::basic;
      s.x_basic[i] = slack0[i];
    }
  }

  // Reduced-cost rows. Phase 1 minimizes the artificial sum; with every
  // artificial basic at unit cost, d1 = -sum of artificial rows outside the
  // artificial columns. Phase 2 costs sit untouched until the switch.
  double* d1 = s.d1();
  double* d2 = s.d2();
  for (int i = 0; i < m; ++i)
    if (violated[i]) {
      const double* trow = s.row(i);
      for (int j = 0; j < s.ncols; ++j) d1[j] -= trow[j];
    }
  for (int j = n + m; j < s.ncols; ++j) d1[j] += 1.0;
  for (int j = 0; j < n; ++j) d2[j] = p.objective[j];

  double cscale = 1.0;
  for (int j = 0; j < n; ++j) cscale = std::max(cscale, std::abs(p.objective[j]));
  const long max_iters = opts.max_lp_iterations;

  if (n_art > 0) {
    SolveStatus st = run_phase(s, s.m, opts.lp_tol, max_iters);
    if (st == SolveStatus::iteration_limit) {
      sol.status = st;
      sol.iterations = s.iterations;
      return sol;
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (s.basis[i] >= n + m) infeas += s.x_basic[i];
    for (int j = n + m; j < s.ncols; ++j)
      if (s.state[j] != CState::basic && s.val[j] > 0.0) infeas += s.val[j];
    if (infeas > 1e-7 * std::max(1.0, static_cast<double>(m))) {
      sol.status = SolveStatus::infeasible;
      sol.iterations = s.iterations;
      return sol;
    }
    // Pivot surviving basic artificials out where a usable column exists;
    // rows without one are redundant and stay inert.
    for (int i = 0; i < m; ++i) {
      if (s.basis[i] < n + m) continue;
      const double* trow = s.row(i);
      int cand = -1;
      for (int j = 0; j < n + m; ++j)
        if (s.state[j] != CState::basic && !s.banned[j] && std::abs(trow[j]) > 1e-7) {
          cand = j;
          break;
        }
      if (cand < 0) continue;
      const int old_art = s.basis[i];
      const double enter_val = s.val[cand];
      apply_pivot(s, i, cand);
      s.basis[i] = cand;
      s.state[cand] = CState::basic;
      s.x_basic[i] = enter_val;
      s.state[old_art] = CState::at_lower;
      s.val[old_art] = 0.0;
    }
    for (int j = n + m; j < s.ncols; ++j) s.banned[j] = 1;
  }

  SolveStatus st = run_phase(s, s.m + 1, opts.lp_tol * cscale, max_iters);
  sol.iterations = s.iterations;
  if (st != SolveStatus::optimal) {
    sol.status = st;
    return sol;
  }

  sol.x.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) sol.x[j] = s.val[j];
  for (int i = 0; i < m; ++i)
    if (s.basis[i] < n) sol.x[s.basis[i]] = s.x_basic[i];
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(lo[j])) sol.x[j] = std::max(sol.x[j], lo[j]);
    if (std::isfinite(up[j])) sol.x[j] = std::min(sol.x[j], up[j]);
  }
  sol.objective = dot(sol.x, p.objective);

  const double* d2f = s.d2();
  for (int i = 0; i < m; ++i) {
    const double lam = d2f[n + i];  // reduced cost of the slack column
    if (irows[i].sign > 0)
      sol.duals[irows[i].orig] += lam;
    else
      sol.duals[irows[i].orig] -= lam;
  }
  sol.status = SolveStatus::optimal;
  return sol;
}

bool lp_duality_check(const MilpProblem& p, const LpSolution& sol, const SolverOptions& opts) {
  if (sol.status != SolveStatus::optimal) return false;
  const int n = p.num_vars();
  const double tol = 10.0 * opts.lp_tol;
  double scale = 1.0;
  for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(sol.x[j]));
  for (double d : sol.duals) scale = std::max(scale, std::abs(d));

  // Reduced costs under the reported duals.
  Vec red = p.objective;
  for (std::size_t i = 0; i < p.rows.size(); ++i)
    for (const auto& [j, c] : p.rows[i].terms) red[j] += sol.duals[i] * c;

  double dual_obj = 0.0;
  for (std::size_t i = 0; i < p.rows.size(); ++i) dual_obj -= sol.duals[i] * p.rows[i].rhs;
  for (int j = 0; j < n; ++j) {
    const double r = red[j];
    if (std::abs(r) <= tol * scale) continue;
    if (r > 0.0) {
      if (!std::isfinite(p.lower[j])) return false;
      dual_obj += r * p.lower[j];
    } else {
      if (!std::isfinite(p.upper[j])) return false;
      dual_obj += r * p.upper[j];
    }
  }
  if (std::abs(dual_obj - sol.objective) > tol * std::max(1.0, std::abs(sol.objective)))
    return false;

  // Complementary slackness on rows and dual-sign consistency.
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    double act = 0.0;
    for (const auto& [j, c] : p.rows[i].terms) act += c * sol.x[j];
    const double slack = p.rows[i].rhs - act;
    if (p.rows[i].sense == RowSense::le && sol.duals[i] < -tol * scale) return false;
    if (p.rows[i].sense == RowSense::ge && sol.duals[i] > tol * scale) return false;
    if (p.rows[i].sense != RowSense::eq &&
        std::abs(sol.duals[i] * slack) > tol * scale * std::max(1.0, std::abs(p.rows[i].rhs)))
      return false;
  }
  return true;
}

namespace {

struct BnbNode {
  double bound = -kInf;
  long id = 0;
  std::uint64_t tie = 0;
  Vec lo, up;
};

struct NodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.tie > b.tie;
  }
};

bool integral_enough(const MilpProblem& p, const Vec& x, double int_tol) {
  for (int j = 0; j < p.num_vars(); ++j) {
    if (p.vtype[j] == VarType::continuous) continue;
    if (std::abs(x[j] - std::round(x[j])) > int_tol) return false;
  }
  return true;
}

}  // namespace

MilpSolution solve_milp(const MilpProblem& p, const SolverOptions& opts) {
  p.validate();
  opts.validate();
  const auto t0 = std::chrono::steady_clock::now();
  MilpSolution out;

  std::vector<int> int_vars;
  for (int j = 0; j < p.num_vars(); ++j)
    if (p.vtype[j] != VarType::continuous) int_vars.push_back(j);

  std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> open;
  open.push({-kInf, 0, hash_mix(opts.seed, 0), p.lower, p.upper});
  long next_id = 1;

  bool have_inc = false;
  Vec inc_x;
  double inc_obj = kInf;
  std::set<Vec> tried_roundings;

  auto consider_incumbent = [&](const Vec& x, double obj) {
    if (!have_inc || obj < inc_obj) {
      have_inc = true;
      inc_obj = obj;
      inc_x = x;
      for (int j : int_vars) inc_x[j] = std::round(inc_x[j]);
    }
  };

  SolveStatus final_status = SolveStatus::infeasible;
  while (!open.empty()) {
    if (out.nodes >= opts.max_nodes) {
      final_status = SolveStatus::node_limit;
      break;
    }
    BnbNode node = open.top();
    open.pop();
    if (have_inc && node.bound >= inc_obj - opts.abs_gap) continue;

    ++out.nodes;
    LpSolution rel = solve_lp(p, opts, &node.lo, &node.up);
    out.lp_iterations += rel.iterations;
    if (rel.status == SolveStatus::infeasible) continue;
    if (rel.status == SolveStatus::unbounded) {
      final_status = SolveStatus::unbounded;
      break;
    }
    if (rel.status == SolveStatus::iteration_limit) {
      final_status = SolveStatus::iteration_limit;
      break;
    }
    if (have_inc && rel.objective >= inc_obj - opts.abs_gap) continue;

    if (integral_enough(p, rel.x, opts.int_tol)) {
      consider_incumbent(rel.x, rel.objective);
      continue;
    }

    if (opts.rounding_heuristic && !int_vars.empty()) {
      Vec rlo = node.lo, rup = node.up;
      Vec key(int_vars.size());
      for (std::size_t k = 0; k < int_vars.size(); ++k) {
        const int j = int_vars[k];
        double r = std::round(rel.x[j]);
        r = std::min(std::max(r, node.lo[j]), node.up[j]);
        rlo[j] = rup[j] = r;
        key[k] = r;
      }
      if (tried_roundings.insert(key).second) {
        LpSolution fix = solve_lp(p, opts, &rlo, &rup);
        out.lp_iterations += fix.iterations;
        if (fix.status == SolveStatus::optimal &&
            (!have_inc || fix.objective < inc_obj - opts.abs_gap))
          consider_incumbent(fix.x, fix.objective);
      }
      if (have_inc && rel.objective >= inc_obj - opts.abs_gap) continue;
    }

    // Most-fractional branching, seeded hash breaking ties.
    int branch_var = -1;
    double best_score = -1.0;
    std::uint64_t best_tie = 0;
    for (int j : int_vars) {
      const double f = rel.x[j] - std::floor(rel.x[j]);
      const double score = std::min(f, 1.0 - f);
      if (score <= opts.int_tol) continue;
      const std::uint64_t tie = hash_mix(opts.seed, static_cast<std::uint64_t>(j) + 101);
      if (score > best_score + 1e-15 || (std::abs(score - best_score) <= 1e-15 && tie < best_tie)) {
        best_score = score;
        branch_var = j;
        best_tie = tie;
      }
    }
    if (branch_var < 0) {
      consider_incumbent(rel.x, rel.objective);
      continue;
    }

    BnbNode down{rel.objective, next_id, hash_mix(opts.seed, static_cast<std::uint64_t>(next_id)),
                 node.lo, node.up};
    ++next_id;
    down.up[branch_var] = std::floor(rel.x[branch_var]);
    BnbNode upn{rel.objective, next_id, hash_mix(opts.seed, static_cast<std::uint64_t>(next_id)),
                node.lo, node.up};
    ++next_id;
    upn.lo[branch_var] = std::ceil(rel.x[branch_var]);
    open.push(std::move(down));
    open.push(std::move(upn));
  }

  if (final_status != SolveStatus::node_limit && final_status != SolveStatus::unbounded &&
      final_status != SolveStatus::iteration_limit)
    final_status = have_inc ? SolveStatus::optimal : SolveStatus::infeasible;
  if (final_status == SolveStatus::node_limit && have_inc) {
    out.x = inc_x;
    out.objective = inc_obj;
  }
  if (final_status == SolveStatus::optimal) {
    out.x = inc_x;
    out.objective = inc_obj;
  }
  out.status = final_status;
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string var_name(const MilpProblem& p, int j) {
  if (j < static_cast<int>(p.var_names.size()) && !p.var_names[j].empty()) return p.var_names[j];
  return "x" + std::to_string(j);
}

}  // namespace

std::string to_lp_format(const MilpProblem& p) {
  std::string out = "\\ flexroc model export\nMinimize\n obj:";
  for (int j = 0; j < p.num_vars(); ++j) {
    if (p.objective[j] == 0.0) continue;
    out += (p.objective[j] >= 0 ? " + " : " - ") + fmt(std::abs(p.objective[j])) + " " +
           var_name(p, j);
  }
  out += "\nSubject To\n";
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const SparseRow& r = p.rows[i];
    out += " " + (r.name.empty() ? "r" + std::to_string(i) : r.name) + ":";
    if (r.terms.empty()) out += " 0 " + var_name(p, 0);
    for (const auto& [j, c] : r.terms)
      out += (c >= 0 ? " + " : " - ") + fmt(std::abs(c)) + " " + var_name(p, j);
    switch (r.sense) {
      case RowSense::le: out += " <= "; break;
      case RowSense::eq: out += " = "; break;
      case RowSense::ge: out += " >= "; break;
    }
    out += fmt(r.rhs) + "\n";
  }
  out += "Bounds\n";
  for (int j = 0; j < p.num_vars(); ++j) {
    if (p.lower[j] == -kInf && p.upper[j] == kInf)
      out += " " + var_name(p, j) + " free\n";
    else if (p.lower[j] == -kInf)
      out += " -inf <= " + var_name(p, j) + " <= " + fmt(p.upper[j]) + "\n";
    else if (p.upper[j] == kInf)
      out += " " + fmt(p.lower[j]) + " <= " + var_name(p, j) + "\n";
    else
      out += " " + fmt(p.lower[j]) + " <= " + var_name(p, j) + " <= " + fmt(p.upper[j]) + "\n";
  }
  std::string gen, bin;
  for (int j = 0; j < p.num_vars(); ++j) {
    if (p.vtype[j] == VarType::integer) gen += " " + var_name(p, j) + "\n";
    if (p.vtype[j] == VarType::binary) bin += " " + var_name(p, j) + "\n";
  }
  if (!gen.empty()) out += "Generals\n" + gen;
  if (!bin.empty()) out += "Binaries\n" + bin;
  out += "End\n";
  return out;
}

}  // namespace flexroc
