#include "flexroc/reform.hpp"

#include "doctest.h"
#include "flexroc/oracle.hpp"
#include "test_util.hpp"

using namespace flexroc;
using namespace flexroc::testutil;

namespace {

struct WorkedInstance {
  SystemDynamics dyn = worked_dynamics();
  ConstraintSet cons = worked_constraints();
  StackedSystem st;
  UncertaintyPartition part = worked_partition();
  CostSpec cost;
  CompactConstraints cc;

  WorkedInstance() {
    st = build_stacked(dyn, cons);
    cost = zero_cost(st);
    cc = build_compact(st, cost, part, dyn.x0);
  }
};

FlexibilityResult solve_reform(const WorkedInstance& w, const ReformOptions& opts) {
  ReformModel model = build_theorem1_milp(w.cc, w.part, w.cost, opts);
  MilpSolution sol = solve_milp(model.milp);
  REQUIRE(sol.status == SolveStatus::optimal);
  return extract_solution(sol, model, w.part, w.cost, opts);
}

}  // namespace

TEST_CASE("worked instance: affine budget is 2 and the policy verifies") {
  WorkedInstance w;
  ReformOptions opts;
  FlexibilityResult res = solve_reform(w, opts);
  CHECK(res.gamma_star == 2);

  PolicyVerification ver = verify_policy(res.policy, res.gamma_star, w.dyn, w.cons, w.part);
  CHECK(ver.scenarios_checked == 4);
  CHECK(ver.ok());
}

TEST_CASE("worked instance: open-loop budget is 1") {
  WorkedInstance w;
  ReformOptions opts;
  opts.policy_mode = PolicyMode::open_loop;
  ReformModel model = build_theorem1_milp(w.cc, w.part, w.cost, opts);
  // Gain columns must be absent, not fixed.
  CHECK(model.vmap.cont_gain.empty());
  CHECK(model.vmap.bin_gain.empty());
  MilpSolution sol = solve_milp(model.milp);
  REQUIRE(sol.status == SolveStatus::optimal);
  FlexibilityResult res = extract_solution(sol, model, w.part, w.cost, opts);
  CHECK(res.gamma_star == 1);

  PolicyVerification ver = verify_policy(res.policy, res.gamma_star, w.dyn, w.cons, w.part);
  CHECK(ver.ok());
}

TEST_CASE("emitted row count matches the closed form, linear in |U|") {
  WorkedInstance w;
  ReformOptions opts;
  ReformModel model = build_theorem1_milp(w.cc, w.part, w.cost, opts);
  const int I = w.cc.num_rows();
  const int U = w.part.u_size();
  CHECK(model.milp.num_rows() == I * (2 + 7 * U));
  CHECK(count_constraints(I, U, 2, CostMode::gamma_only).theorem1_rows == I * (2 + 7 * U));

  // Variable census for the 2-step instance: 2 delta + 4 gains + 2 offsets
  // plus 5 locals per compact row and per flexible index.
  CHECK(model.milp.num_vars() == 2 + 4 + 2 + I * (3 * U + 2));
}

TEST_CASE("|U| = 0 reduces to nominal feasibility") {
  WorkedInstance w;
  UncertaintyPartition nom;
  nom.flexible = {};
  nom.r_bar = {0, 0};
  CompactConstraints cc = build_compact(w.st, w.cost, nom, w.dyn.x0);
  ReformOptions opts;
  ReformModel model = build_theorem1_milp(cc, nom, w.cost, opts);
  MilpSolution sol = solve_milp(model.milp);
  REQUIRE(sol.status == SolveStatus::optimal);
  FlexibilityResult res = extract_solution(sol, model, nom, w.cost, opts);
  CHECK(res.gamma_star == 0);
  CHECK(sol.objective == doctest::Approx(0.0));

  ReformModel ol = build_open_loop_milp(cc, nom, w.cost, opts);
  MilpSolution sol2 = solve_milp(ol.milp);
  REQUIRE(sol2.status == SolveStatus::optimal);
  CHECK(sol2.objective == doctest::Approx(sol.objective));
}

TEST_CASE("extraction: budget from delta, fractional residual rejected") {
  WorkedInstance w;
  ReformOptions opts;
  ReformModel model = build_theorem1_milp(w.cc, w.part, w.cost, opts);
  MilpSolution sol = solve_milp(model.milp);
  REQUIRE(sol.status == SolveStatus::optimal);
  FlexibilityResult res = extract_solution(sol, model, w.part, w.cost, opts);
  int sum = 0;
  for (auto d : res.delta) sum += d;
  CHECK(sum == res.gamma_star);

  MilpSolution bad = sol;
  bad.x[model.vmap.delta[0]] = 0.5;
  CHECK_THROWS_AS(extract_solution(bad, model, w.part, w.cost, opts), std::runtime_error);
}

TEST_CASE("policy_response: zero policy, worked policy, integer recourse") {
  UncertaintyPartition part = worked_partition();

  AffinePolicy zero;
  zero.flexible = part.flexible;
  zero.cont_gain = Matrix(2, 2);
  zero.cont_offset = {0.0, 0.0};
  auto [u0, v0] = policy_response(zero, {1.0, 1.0}, part);
  CHECK(u0[0] == 0.0);
  CHECK(u0[1] == 0.0);
  CHECK(v0.empty());

  AffinePolicy ident = zero;
  ident.cont_gain(0, 0) = 1.0;
  ident.cont_gain(1, 1) = 1.0;
  auto [u1, v1] = policy_response(ident, {1.0, 1.0}, part);
  CHECK(u1[0] == doctest::Approx(1.0));
  CHECK(u1[1] == doctest::Approx(1.0));

  // Binary recourse v = L r + eps stays integer by construction.
  UncertaintyPartition p1;
  p1.flexible = {0};
  p1.r_bar = {0};
  AffinePolicy bp;
  bp.flexible = p1.flexible;
  bp.cont_gain = Matrix(0, 1);
  bp.cont_offset = {};
  bp.bin_gain = {{1}};
  bp.bin_offset = {0};
  auto [u2, v2] = policy_response(bp, {1.0}, p1);
  CHECK(u2.empty());
  CHECK(v2[0] == 1.0);

  // Realizations that move a fixed index are rejected.
  UncertaintyPartition fixed;
  fixed.flexible = {0};
  fixed.r_bar = {0, 1};
  AffinePolicy pol = zero;
  pol.flexible = fixed.flexible;
  CHECK_THROWS_AS(policy_response(pol, {0.0, 0.0}, fixed), std::invalid_argument);
}

TEST_CASE("count_constraints: scenario sums") {
  CHECK(count_constraints(8, 3, 1, CostMode::gamma_only).exhaustive_scenarios == 4);
  CHECK(count_constraints(8, 8, 5, CostMode::gamma_only).exhaustive_scenarios == 219);
  CHECK(count_constraints(8, 4, 0, CostMode::gamma_only).exhaustive_scenarios == 1);
  CHECK(count_constraints(10, 6, 2, CostMode::cost_and_gamma).theorem1_rows == 11 * (2 + 42));
  CHECK_THROWS_AS(scenario_count(3, 4), std::invalid_argument);
}

TEST_CASE("dual-sign statement variant over-claims on a down-flex fixture") {
  // x(t+1) = x(t) + r(t), x0 = 0, states must stay >= 1, nominal r = (1,1),
  // no recourse at all. Flipping index 0 drops x(1) below its floor, so the
  // true budget is 0. The statement-sign rows lose that coupling and claim
  // the full budget instead.
  SystemDynamics dyn;
  dyn.A = Matrix(1, 1);
  dyn.A(0, 0) = 1.0;
  dyn.B = Matrix(1, 1);
  dyn.B(0, 0) = 1.0;
  dyn.D = Matrix(1, 0);
  dyn.E = Matrix(1, 0);
  dyn.x0 = {0.0};
  dyn.horizon = 2;
  ConstraintSet cons;
  cons.Gx = Matrix(1, 1);
  cons.Gx(0, 0) = -1.0;  // -x <= -1
  cons.gx = {-1.0};
  cons.Gr = Matrix(0, 1);
  cons.Gu = Matrix(0, 0);
  cons.Gv = Matrix(0, 0);
  cons.gr = {};
  StackedSystem st = build_stacked(dyn, cons);
  UncertaintyPartition part;
  part.flexible = {0, 1};
  part.r_bar = {1, 1};
  CostSpec cost = zero_cost(st);
  CompactConstraints cc = build_compact(st, cost, part, dyn.x0);

  // Ground truth by enumeration: flipping {0} is infeasible.
  GammaCertificate oracle = exhaustive_gamma(cc, part, ExhaustiveMode::adjustable);
  REQUIRE(oracle.gamma_star == 0);

  ReformOptions minus;
  ReformModel m1 = build_theorem1_milp(cc, part, cost, minus);
  MilpSolution s1 = solve_milp(m1.milp);
  REQUIRE(s1.status == SolveStatus::optimal);
  FlexibilityResult r1 = extract_solution(s1, m1, part, cost, minus);
  CHECK(r1.gamma_star == 0);

  ReformOptions plus;
  plus.dual_sign = DualSign::statement;
  ReformModel m2 = build_theorem1_milp(cc, part, cost, plus);
  MilpSolution s2 = solve_milp(m2.milp);
  REQUIRE(s2.status == SolveStatus::optimal);
  FlexibilityResult r2 = extract_solution(s2, m2, part, cost, plus);
  CHECK(r2.gamma_star > oracle.gamma_star);  // unsound over-claim

  PolicyVerification ver = verify_policy(r2.policy, r2.gamma_star, dyn, cons, part);
  CHECK(!ver.ok());
}

TEST_CASE("builder warnings: small big_m flagged") {
  WorkedInstance w;
  ReformOptions opts;
  opts.big_m = 5.0;
  ReformModel model = build_theorem1_milp(w.cc, w.part, w.cost, opts);
  REQUIRE(!model.warnings.empty());
  CHECK(model.warnings[0].find("big_m") != std::string::npos);
}

TEST_CASE("cost-and-gamma mode: theta matches the enumerated worst cost") {
  WorkedInstance w;
  CostSpec cost = w.cost;
  cost.mode = CostMode::cost_and_gamma;
  cost.c_u = {1.0, 1.0};
  cost.lambda = 10.0;  // flexibility dominates, budget stays 2
  CompactConstraints cc = build_compact(w.st, cost, w.part, w.dyn.x0);
  REQUIRE(cc.epigraph_row >= 0);

  ReformOptions opts;
  ReformModel model = build_theorem1_milp(cc, w.part, cost, opts);
  MilpSolution sol = solve_milp(model.milp);
  REQUIRE(sol.status == SolveStatus::optimal);
  FlexibilityResult res = extract_solution(sol, model, w.part, cost, opts);
  CHECK(res.gamma_star == 2);
  REQUIRE(res.theta.has_value());
  CHECK(res.objective == doctest::Approx(*res.theta - cost.lambda * res.gamma_star).epsilon(1e-6));

  auto [wc, arg] = worst_case_cost(res.policy, res.gamma_star, cost, w.dyn, w.part);
  CHECK(*res.theta >= wc - 1e-6);
}
