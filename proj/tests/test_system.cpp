#include "flexroc/system.hpp"

#include <random>

#include "doctest.h"
#include "test_util.hpp"

using namespace flexroc;
using namespace flexroc::testutil;

TEST_CASE("stacking: identity system with zero inputs keeps the state") {
  SystemDynamics dyn;
  dyn.A = Matrix::identity(1);
  dyn.B = Matrix(1, 1);
  dyn.D = Matrix(1, 1);
  dyn.E = Matrix(1, 1);
  dyn.x0 = {3.0};
  dyn.horizon = 2;
  ConstraintSet cons;
  cons.Gx = Matrix(1, 1);
  cons.Gx(0, 0) = 1.0;
  cons.gx = {10.0};
  cons.Gr = Matrix(0, 1);
  cons.Gu = Matrix(0, 1);
  cons.Gv = Matrix(0, 1);
  cons.gr = {};

  StackedSystem st = build_stacked(dyn, cons);
  CHECK(st.Fx(0, 0) == 1.0);
  CHECK(st.Fx(1, 0) == 1.0);
  Vec x = st.Fx * dyn.x0;
  CHECK(x[0] == 3.0);
  CHECK(x[1] == 3.0);
}

TEST_CASE("stacking: scalar recursion example") {
  // x+ = 0.5 x + r + u, x0 = 2, r = (1,0), u = (0,1) -> x = (2,2).
  SystemDynamics dyn;
  dyn.A = Matrix(1, 1);
  dyn.A(0, 0) = 0.5;
  dyn.B = Matrix(1, 1);
  dyn.B(0, 0) = 1.0;
  dyn.D = Matrix(1, 1);
  dyn.D(0, 0) = 1.0;
  dyn.E = Matrix(1, 0);
  dyn.x0 = {2.0};
  dyn.horizon = 2;

  Vec traj = simulate(dyn, dyn.x0, {1.0, 0.0}, {0.0, 1.0}, {});
  REQUIRE(traj.size() == 2);
  CHECK(traj[0] == doctest::Approx(2.0));
  CHECK(traj[1] == doctest::Approx(2.0));

  ConstraintSet cons;
  cons.Gx = Matrix(1, 1);
  cons.Gx(0, 0) = 1.0;
  cons.gx = {100.0};
  cons.Gr = Matrix(0, 1);
  cons.Gu = Matrix(0, 1);
  cons.Gv = Matrix(0, 0);
  cons.gr = {};
  StackedSystem st = build_stacked(dyn, cons);
  Vec xs = st.Fx * dyn.x0;
  Vec fr = st.Fr * Vec{1.0, 0.0};
  Vec fu = st.Fu * Vec{0.0, 1.0};
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] += fr[i] + fu[i];
  CHECK(inf_norm_diff(xs, traj) <= 1e-12);
}

TEST_CASE("stacking equals recursion on random dense systems") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    SystemDynamics dyn;
    dyn.A = random_matrix(rng, 2, 2);
    dyn.B = random_matrix(rng, 2, 1);
    dyn.D = random_matrix(rng, 2, 2);
    dyn.E = random_matrix(rng, 2, 1);
    dyn.x0 = random_vec(rng, 2);
    dyn.horizon = 4;
    ConstraintSet cons;
    cons.Gx = Matrix(1, 2);
    cons.Gx(0, 0) = 1.0;
    cons.gx = {100.0};
    cons.Gr = Matrix(0, 1);
    cons.Gu = Matrix(0, 2);
    cons.Gv = Matrix(0, 1);
    cons.gr = {};
    StackedSystem st = build_stacked(dyn, cons);

    Vec r = random_vec(rng, 4), u = random_vec(rng, 8), v = random_vec(rng, 4);
    Vec traj = simulate(dyn, dyn.x0, r, u, v);
    Vec xs = st.Fx * dyn.x0;
    Vec fr = st.Fr * r, fu = st.Fu * u, fv = st.Fv * v;
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] += fr[i] + fu[i] + fv[i];
    CHECK(inf_norm_diff(xs, traj) <= 1e-10);
  }
}

TEST_CASE("stacked prediction matrices carry the single-step gains on the diagonal") {
  SystemDynamics dyn = worked_dynamics();
  ConstraintSet cons = worked_constraints();
  StackedSystem st = build_stacked(dyn, cons);
  CHECK(st.Fr(0, 0) == 1.0);
  CHECK(st.Fr(0, 1) == 0.0);
  CHECK(st.Fr(1, 0) == 1.0);
  CHECK(st.Fr(1, 1) == 1.0);
  CHECK(st.Fu(0, 0) == -1.0);
  CHECK(st.Fu(1, 1) == -1.0);
}

TEST_CASE("build_stacked rejects dimension mismatches by matrix name") {
  SystemDynamics dyn = worked_dynamics();
  dyn.B = Matrix(2, 1);  // wrong row count vs n = 1
  ConstraintSet cons = worked_constraints();
  CHECK_THROWS_WITH_AS(build_stacked(dyn, cons), doctest::Contains("B"), std::invalid_argument);

  SystemDynamics dyn2 = worked_dynamics();
  dyn2.x0 = {0.0, 0.0};
  CHECK_THROWS_WITH_AS(build_stacked(dyn2, cons), doctest::Contains("x0"), std::invalid_argument);

  SystemDynamics dyn3 = worked_dynamics();
  ConstraintSet cons3 = worked_constraints();
  cons3.gx = {1.0};
  CHECK_THROWS_WITH_AS(build_stacked(dyn3, cons3), doctest::Contains("gx"), std::invalid_argument);
}

TEST_CASE("compact rows: counts, kinds and the worked-instance sign pattern") {
  SystemDynamics dyn = worked_dynamics();
  ConstraintSet cons = worked_constraints();
  StackedSystem st = build_stacked(dyn, cons);
  UncertaintyPartition part = worked_partition();
  CostSpec cost = zero_cost(st);

  CompactConstraints cc = build_compact(st, cost, part, dyn.x0);
  // N (rows_x + rows_u) + 2 q N, no epigraph row in gamma_only mode.
  CHECK(cc.num_rows() == 2 * (2 + 2));
  CHECK(cc.epigraph_row == -1);

  // State rows x(1) <= 1, -x(1) <= 0, x(2) <= 1, -x(2) <= 0.
  CHECK(cc.O(0, 0) == 1.0);
  CHECK(cc.O(0, 1) == 0.0);
  CHECK(cc.O(1, 0) == -1.0);
  CHECK(cc.O(2, 0) == 1.0);
  CHECK(cc.O(2, 1) == 1.0);
  CHECK(cc.O(3, 0) == -1.0);
  CHECK(cc.O(3, 1) == -1.0);
  CHECK(cc.P(0, 0) == -1.0);
  CHECK(cc.P(2, 1) == -1.0);
  CHECK(cc.h[0] == 1.0);
  CHECK(cc.h[1] == 0.0);

  // With a cost the epigraph row appears and the count grows by one.
  CostSpec cg = cost;
  cg.mode = CostMode::cost_and_gamma;
  cg.c_u = {1.0, 1.0};
  CompactConstraints cc2 = build_compact(st, cg, part, dyn.x0);
  CHECK(cc2.num_rows() == cc.num_rows() + 1);
  CHECK(cc2.epigraph_row == cc2.num_rows() - 1);
  CHECK(cc2.kind.back() == RowKind::epigraph);
  CHECK(cc2.P(cc2.epigraph_row, 0) == 1.0);
  CHECK(cc2.P(cc2.epigraph_row, 1) == 1.0);
}

TEST_CASE("compact rows evaluate like simulate + raw constraints") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    SystemDynamics dyn;
    dyn.A = random_matrix(rng, 2, 2, 0.6);
    dyn.B = random_matrix(rng, 2, 1);
    dyn.D = random_matrix(rng, 2, 1);
    dyn.E = random_matrix(rng, 2, 1);
    dyn.x0 = random_vec(rng, 2);
    dyn.horizon = 3;
    ConstraintSet cons;
    cons.Gx = random_matrix(rng, 2, 2);
    cons.gx = random_vec(rng, 2, 2.0);
    cons.Gr = random_matrix(rng, 1, 1);
    cons.Gu = random_matrix(rng, 1, 1);
    cons.Gv = random_matrix(rng, 1, 1);
    cons.gr = random_vec(rng, 1, 2.0);
    StackedSystem st = build_stacked(dyn, cons);
    UncertaintyPartition part;
    part.flexible = {0, 2};
    part.r_bar = {0, 1, 0};
    CostSpec cost = zero_cost(st);
    CompactConstraints cc = build_compact(st, cost, part, dyn.x0);

    Vec r = {1.0, 0.0, 1.0};
    Vec u = random_vec(rng, 3), v = {1.0, 0.0, 1.0};
    Vec lhs = compact_lhs(cc, r, u, v);
    Vec traj = simulate(dyn, dyn.x0, r, u, v);

    // State rows must match Gx_s traj - fold-in within 1e-10.
    const int n_state = 2 * 3;
    Vec gx_traj = st.Gx_s * traj;
    for (int i = 0; i < n_state; ++i)
      CHECK(std::abs((lhs[i] - cc.h[i]) - (gx_traj[i] - st.gx_s[i])) <= 1e-10);

    // Raw check agrees with compact sign for every row kind.
    ViolationReport rep = check_constraints(traj, r, u, v, dyn, cons, 1e-9);
    int flagged = 0;
    for (int i = 0; i < cc.num_rows(); ++i)
      if (cc.kind[i] != RowKind::binary_box && lhs[i] - cc.h[i] > 1e-9) ++flagged;
    CHECK(flagged == static_cast<int>(rep.violations.size()));
  }
}

TEST_CASE("simulate: all-zero system gives all-zero trajectory") {
  SystemDynamics dyn;
  dyn.A = Matrix(1, 1);
  dyn.B = Matrix(1, 1);
  dyn.D = Matrix(1, 1);
  dyn.E = Matrix(1, 1);
  dyn.x0 = {0.0};
  dyn.horizon = 3;
  Vec traj = simulate(dyn, dyn.x0, {0, 0, 0}, {0, 0, 0}, {0, 0, 0});
  for (double x : traj) CHECK(x == 0.0);
}

TEST_CASE("simulate rejects wrong input lengths") {
  SystemDynamics dyn = worked_dynamics();
  CHECK_THROWS_AS(simulate(dyn, dyn.x0, {1.0}, {0.0, 0.0}, {}), std::invalid_argument);
}

TEST_CASE("check_constraints reports margins and respects the boundary tolerance") {
  SystemDynamics dyn = worked_dynamics();
  ConstraintSet cons = worked_constraints();

  // Feasible point -> empty report.
  Vec traj = simulate(dyn, dyn.x0, {0, 0}, {0, 0}, {});
  CHECK(check_constraints(traj, {0, 0}, {0, 0}, {}, dyn, cons).ok());

  // x = (2, ...) violates x <= 1 with margin 1.
  Vec bad = {2.0, 0.0};
  ViolationReport rep = check_constraints(bad, {0, 0}, {0, 0}, {}, dyn, cons);
  REQUIRE(!rep.ok());
  CHECK(rep.violations[0].row == 0);
  CHECK(rep.violations[0].margin == doctest::Approx(1.0));

  // Boundary point within tol is not flagged.
  Vec edge = {1.0 + 1e-10, 0.0};
  CHECK(check_constraints(edge, {0, 0}, {0, 0}, {}, dyn, cons, 1e-9).ok());
}
