#include "flexroc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flexroc {

namespace {

Vec realize(const UncertaintyPartition& part, const std::vector<int>& flipped) {
  Vec r(part.r_bar.size());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = part.r_bar[k];
  for (int k : flipped) {
    auto& x = r[static_cast<std::size_t>(k)];
    x = 1.0 - x;
  }
  return r;
}

void emit_level(const UncertaintyPartition& part, int level, std::vector<Scenario>& out) {
  const int U = part.u_size();
  std::vector<int> pick(static_cast<std::size_t>(level));
  // Lexicographic combinations over positions 0..U-1 of the flexible set.
  auto rec = [&](auto&& self, int pos, int start) -> void {
    if (pos == level) {
      std::vector<int> flipped(static_cast<std::size_t>(level));
      for (int t = 0; t < level; ++t)
        flipped[static_cast<std::size_t>(t)] = part.flexible[static_cast<std::size_t>(pick[static_cast<std::size_t>(t)])];
      out.push_back({flipped, realize(part, flipped)});
      return;
    }
    for (int i = start; i <= U - (level - pos); ++i) {
      pick[static_cast<std::size_t>(pos)] = i;
      self(self, pos + 1, i + 1);
    }
  };
  rec(rec, 0, 0);
}

/// Feasibility program for one scenario: find (u, v), v binary, with
/// P u + Q v <= h - O r. Epigraph rows are skipped (theta absorbs them).
MilpProblem scenario_feasibility(const CompactConstraints& cc, const Vec& r) {
  const int pN = static_cast<int>(cc.P.cols());
  const int qN = static_cast<int>(cc.Q.cols());
  MilpProblem mp;
  for (int k = 0; k < pN; ++k) mp.add_var("u" + std::to_string(k), -kInf, kInf);
  for (int k = 0; k < qN; ++k)
    mp.add_var("v" + std::to_string(k), 0.0, 1.0, VarType::binary);
  const Vec olift = cc.O * r;
  for (int i = 0; i < cc.num_rows(); ++i) {
    if (cc.kind[static_cast<std::size_t>(i)] == RowKind::epigraph) continue;
    SparseRow row;
    for (int k = 0; k < pN; ++k) {
      const double c = cc.P(i, k);
      if (c != 0.0) row.terms.push_back({k, c});
    }
    for (int k = 0; k < qN; ++k) {
      const double c = cc.Q(i, k);
      if (c != 0.0) row.terms.push_back({pN + k, c});
    }
    row.sense = RowSense::le;
    row.rhs = cc.h[static_cast<std::size_t>(i)] - olift[static_cast<std::size_t>(i)];
    mp.add_row(std::move(row));
  }
  return mp;
}

struct ScenarioCheck {
  bool feasible = false;
  long nodes = 0;
  long lp_iterations = 0;
};

ScenarioCheck check_scenario(const CompactConstraints& cc, const Vec& r,
                             const SolverOptions& opts) {
  MilpProblem mp = scenario_feasibility(cc, r);
  MilpSolution sol = solve_milp(mp, opts);
  if (sol.status != SolveStatus::optimal && sol.status != SolveStatus::infeasible)
    throw std::runtime_error("scenario feasibility solve ended with status " +
                             to_string(sol.status));
  return {sol.status == SolveStatus::optimal, sol.nodes, sol.lp_iterations};
}

}  // namespace

std::vector<Scenario> enumerate_scenarios(const UncertaintyPartition& part, int gamma) {
  const int U = part.u_size();
  if (gamma < 0 || gamma > U)
    throw std::invalid_argument("gamma " + std::to_string(gamma) + " out of range [0, " +
                                std::to_string(U) + "]");
  std::vector<Scenario> out;
  out.reserve(scenario_count(U, gamma));
  for (int level = 0; level <= gamma; ++level) emit_level(part, level, out);
  return out;
}

GammaCertificate exhaustive_gamma(const CompactConstraints& cc, const UncertaintyPartition& part,
                                  ExhaustiveMode mode, const SolverOptions& solver_opts,
                                  ParallelMode par) {
  const int U = part.u_size();
  GammaCertificate cert;

  // The feasibility assumption: the nominal scenario must admit recourse.
  {
    ScenarioCheck nom = check_scenario(cc, realize(part, {}), solver_opts);
    cert.scenarios_checked += 1;
    cert.milp_nodes += nom.nodes;
    cert.lp_iterations += nom.lp_iterations;
    if (!nom.feasible) throw std::runtime_error("nominal scenario infeasible");
  }

  if (mode == ExhaustiveMode::adjustable) {
    for (int level = 1; level <= U; ++level) {
      std::vector<Scenario> scen;
      emit_level(part, level, scen);
      std::vector<char> ok(scen.size(), 1);
      std::vector<long> nodes(scen.size(), 0), iters(scen.size(), 0);
      if (par == ParallelMode::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (long long s = 0; s < static_cast<long long>(scen.size()); ++s) {
          ScenarioCheck c = check_scenario(cc, scen[static_cast<std::size_t>(s)].r, solver_opts);
          ok[static_cast<std::size_t>(s)] = c.feasible ? 1 : 0;
          nodes[static_cast<std::size_t>(s)] = c.nodes;
          iters[static_cast<std::size_t>(s)] = c.lp_iterations;
        }
      } else {
        for (std::size_t s = 0; s < scen.size(); ++s) {
          ScenarioCheck c = check_scenario(cc, scen[s].r, solver_opts);
          ok[s] = c.feasible ? 1 : 0;
          nodes[s] = c.nodes;
          iters[s] = c.lp_iterations;
        }
      }
      cert.scenarios_checked += scen.size();
      for (std::size_t s = 0; s < scen.size(); ++s) {
        cert.milp_nodes += nodes[s];
        cert.lp_iterations += iters[s];
      }
      // Deterministic merge: the first infeasible scenario in enumeration
      // order blocks the level regardless of thread scheduling.
      for (std::size_t s = 0; s < scen.size(); ++s)
        if (!ok[s]) {
          cert.gamma_star = level - 1;
          cert.blocking = scen[s];
          return cert;
        }
    }
    cert.gamma_star = U;
    return cert;
  }

  // static_single: one shared (u, v) across every admissible scenario,
  // searched over gamma descending.
  const int pN = static_cast<int>(cc.P.cols());
  const int qN = static_cast<int>(cc.Q.cols());
  for (int gamma = U; gamma >= 0; --gamma) {
    std::vector<Scenario> scen = enumerate_scenarios(part, gamma);
    MilpProblem mp;
    for (int k = 0; k < pN; ++k) mp.add_var("u" + std::to_string(k), -kInf, kInf);
    for (int k = 0; k < qN; ++k) mp.add_var("v" + std::to_string(k), 0.0, 1.0, VarType::binary);
    for (const Scenario& sc : scen) {
      const Vec olift = cc.O * sc.r;
      for (int i = 0; i < cc.num_rows(); ++i) {
        if (cc.kind[static_cast<std::size_t>(i)] == RowKind::epigraph) continue;
        SparseRow row;
        for (int k = 0; k < pN; ++k) {
          const double c = cc.P(i, k);
          if (c != 0.0) row.terms.push_back({k, c});
        }
        for (int k = 0; k < qN; ++k) {
          const double c = cc.Q(i, k);
          if (c != 0.0) row.terms.push_back({pN + k, c});
        }
        row.sense = RowSense::le;
        row.rhs = cc.h[static_cast<std::size_t>(i)] - olift[static_cast<std::size_t>(i)];
        mp.add_row(std::move(row));
      }
    }
    MilpSolution sol = solve_milp(mp, solver_opts);
    cert.scenarios_checked += scen.size();
    cert.milp_nodes += sol.nodes;
    cert.lp_iterations += sol.lp_iterations;
    if (sol.status == SolveStatus::optimal) {
      cert.gamma_star = gamma;
      return cert;
    }
  }
  throw std::runtime_error("nominal scenario infeasible");
}

namespace {

struct PerScenarioResult {
  std::vector<ScenarioViolation> violations;
  double max_margin = -kInf;
  double cost = 0.0;
};

PerScenarioResult check_one(const AffinePolicy& policy, const Scenario& sc, std::size_t index,
                            const SystemDynamics& dyn, const ConstraintSet& cons,
                            const UncertaintyPartition& part, double tol, const CostSpec* cost) {
  PerScenarioResult res;
  auto [u, v] = policy_response(policy, sc.r, part);
  // Binary recourse must land in {0,1}; integer-valued by construction, so
  // only box escapes are possible.
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k] < 0.0 || v[k] > 1.0) {
      const double margin = v[k] > 1.0 ? v[k] - 1.0 : -v[k];
      res.violations.push_back({index, static_cast<int>(k), RowKind::binary_box, margin});
      if (margin > res.max_margin) res.max_margin = margin;
    }
  Vec traj = simulate(dyn, dyn.x0, sc.r, u, v);
  ViolationReport rep = check_constraints(traj, sc.r, u, v, dyn, cons, tol);
  if (rep.max_margin > res.max_margin) res.max_margin = rep.max_margin;
  for (const Violation& viol : rep.violations)
    res.violations.push_back({index, viol.row, viol.kind, viol.margin});
  if (cost)
    res.cost = dot(cost->c_x, traj) + dot(cost->c_u, u) + dot(cost->c_v, v) + dot(cost->c_r, sc.r);
  return res;
}

}  // namespace

PolicyVerification verify_policy(const AffinePolicy& policy, int gamma, const SystemDynamics& dyn,
                                 const ConstraintSet& cons, const UncertaintyPartition& part,
                                 double tol, const CostSpec* cost, ParallelMode par) {
  std::vector<Scenario> scen = enumerate_scenarios(part, gamma);
  std::vector<PerScenarioResult> results(scen.size());
  if (par == ParallelMode::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long s = 0; s < static_cast<long long>(scen.size()); ++s)
      results[static_cast<std::size_t>(s)] =
          check_one(policy, scen[static_cast<std::size_t>(s)], static_cast<std::size_t>(s), dyn,
                    cons, part, tol, cost);
  } else {
    for (std::size_t s = 0; s < scen.size(); ++s)
      results[s] = check_one(policy, scen[s], s, dyn, cons, part, tol, cost);
  }

  PolicyVerification out;
  out.scenarios_checked = scen.size();
  out.max_margin = -kInf;
  double worst = -kInf;
  for (std::size_t s = 0; s < results.size(); ++s) {
    for (const ScenarioViolation& viol : results[s].violations) out.violations.push_back(viol);
    if (results[s].max_margin > out.max_margin) out.max_margin = results[s].max_margin;
    if (cost && results[s].cost > worst) worst = results[s].cost;
  }
  if (cost) out.worst_cost = worst;
  return out;
}

std::pair<double, Scenario> worst_case_cost(const AffinePolicy& policy, int gamma,
                                            const CostSpec& cost, const SystemDynamics& dyn,
                                            const UncertaintyPartition& part) {
  std::vector<Scenario> scen = enumerate_scenarios(part, gamma);
  double best = -kInf;
  std::size_t arg = 0;
  for (std::size_t s = 0; s < scen.size(); ++s) {
    auto [u, v] = policy_response(policy, scen[s].r, part);
    Vec traj = simulate(dyn, dyn.x0, scen[s].r, u, v);
    const double J =
        dot(cost.c_x, traj) + dot(cost.c_u, u) + dot(cost.c_v, v) + dot(cost.c_r, scen[s].r);
    if (J > best) {
      best = J;
      arg = s;
    }
  }
  return {best, scen[arg]};
}

StateEnvelope state_envelope(const AffinePolicy& policy, int gamma, const SystemDynamics& dyn,
                             const UncertaintyPartition& part, int state_dim, ParallelMode par) {
  if (state_dim < 0 || state_dim >= dyn.n()) throw std::invalid_argument("state_dim out of range");
  std::vector<Scenario> scen = enumerate_scenarios(part, gamma);
  const int n = dyn.n(), N = dyn.horizon;
  std::vector<Vec> values(scen.size());
  if (par == ParallelMode::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long s = 0; s < static_cast<long long>(scen.size()); ++s) {
      const Scenario& sc = scen[static_cast<std::size_t>(s)];
      auto [u, v] = policy_response(policy, sc.r, part);
      Vec traj = simulate(dyn, dyn.x0, sc.r, u, v);
      Vec slice(static_cast<std::size_t>(N));
      for (int t = 0; t < N; ++t) slice[static_cast<std::size_t>(t)] = traj[static_cast<std::size_t>(n) * t + state_dim];
      values[static_cast<std::size_t>(s)] = std::move(slice);
    }
  } else {
    for (std::size_t s = 0; s < scen.size(); ++s) {
      auto [u, v] = policy_response(policy, scen[s].r, part);
      Vec traj = simulate(dyn, dyn.x0, scen[s].r, u, v);
      Vec slice(static_cast<std::size_t>(N));
      for (int t = 0; t < N; ++t) slice[static_cast<std::size_t>(t)] = traj[static_cast<std::size_t>(n) * t + state_dim];
      values[s] = std::move(slice);
    }
  }
  StateEnvelope env;
  env.min_state.assign(static_cast<std::size_t>(N), kInf);
  env.max_state.assign(static_cast<std::size_t>(N), -kInf);
  for (const Vec& slice : values)
    for (int t = 0; t < N; ++t) {
      env.min_state[static_cast<std::size_t>(t)] = std::min(env.min_state[static_cast<std::size_t>(t)], slice[static_cast<std::size_t>(t)]);
      env.max_state[static_cast<std::size_t>(t)] = std::max(env.max_state[static_cast<std::size_t>(t)], slice[static_cast<std::size_t>(t)]);
    }
  return env;
}

}  // namespace flexroc
