#include "flexroc/bounds.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "flexroc/montecarlo.hpp"
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

AffinePolicy identity_policy() {
  AffinePolicy pol;
  pol.flexible = {0, 1};
  pol.cont_gain = Matrix::identity(2);
  pol.cont_offset = {0.0, 0.0};
  return pol;
}

}  // namespace

TEST_CASE("compute_ab: worked policy cancels references on state rows") {
  WorkedInstance w;
  AffinePolicy pol = identity_policy();
  ConstraintCoefficients coef = compute_ab(w.cc, pol, w.part);
  // State rows: the compensating gain wipes out the reference effect.
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) CHECK(coef.a(i, j) == doctest::Approx(0.0));
  // Input rows keep the gain: u_1 <= 1 becomes a = M row.
  CHECK(coef.a(4, 0) == doctest::Approx(1.0));
  CHECK(coef.b[4] == doctest::Approx(1.0));
}

TEST_CASE("compute_ab: zero policy reduces to the raw reference columns") {
  WorkedInstance w;
  AffinePolicy zero = identity_policy();
  zero.cont_gain = Matrix(2, 2);
  ConstraintCoefficients coef = compute_ab(w.cc, zero, w.part);
  for (int i = 0; i < w.cc.num_rows(); ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(coef.a(i, j) == doctest::Approx(w.cc.O(i, w.part.flexible[j])));
  for (int i = 0; i < w.cc.num_rows(); ++i) CHECK(coef.b[i] == doctest::Approx(w.cc.h[i]));
}

TEST_CASE("compute_ab sign agrees with check_constraints on random realizations") {
  WorkedInstance w;
  AffinePolicy pol = identity_policy();
  pol.cont_gain(0, 0) = 0.5;  // partial compensation keeps margins interesting
  ConstraintCoefficients coef = compute_ab(w.cc, pol, w.part);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Vec r = {static_cast<double>(rng() % 2), static_cast<double>(rng() % 2)};
    auto [u, v] = policy_response(pol, r, w.part);
    Vec traj = simulate(w.dyn, w.dyn.x0, r, u, v);
    ViolationReport raw = check_constraints(traj, r, u, v, w.dyn, w.cons, 1e-9);

    std::vector<char> raw_flag(static_cast<std::size_t>(w.cc.num_rows()), 0);
    for (const Violation& viol : raw.violations) {
      // check_constraints indexes state rows then input rows, like the
      // compact layout without box rows.
      raw_flag[static_cast<std::size_t>(viol.row)] = 1;
    }
    for (int i = 0; i < w.cc.num_rows(); ++i) {
      if (w.cc.kind[static_cast<std::size_t>(i)] == RowKind::binary_box) continue;
      double lhs = 0.0;
      for (int j = 0; j < 2; ++j) lhs += coef.a(i, j) * r[static_cast<std::size_t>(w.part.flexible[j])];
      const bool ab_viol = lhs > coef.b[static_cast<std::size_t>(i)] + 1e-9;
      CHECK(ab_viol == static_cast<bool>(raw_flag[static_cast<std::size_t>(i)]));
    }
  }
}

TEST_CASE("prop1: closed-form single-index value and limit cases") {
  UncertaintyPartition part;
  part.flexible = {0};
  part.r_bar = {0};
  FlipModel fm;
  fm.epsilon = {0.5};

  ConstraintCoefficients coef;
  coef.a = Matrix(1, 1);
  coef.a(0, 0) = 1.0;
  coef.b = {1.0};
  ProbabilityBound b = prop1_bound(coef, fm, part, 0);
  CHECK(b.bound == doctest::Approx((0.5 + 0.5 * std::exp(1.0)) / std::exp(1.0)).epsilon(1e-9));
  CHECK(b.bound == doctest::Approx(0.6839397).epsilon(1e-6));
  CHECK(!b.vacuous);

  // a = 0, b = 0: the raw bound is exactly 1 and flagged vacuous.
  ConstraintCoefficients flat;
  flat.a = Matrix(1, 1);
  flat.b = {0.0};
  ProbabilityBound v = prop1_bound(flat, fm, part, 0);
  CHECK(v.bound == 1.0);
  CHECK(v.vacuous);

  // b -> +inf drives the bound to 0.
  ConstraintCoefficients far;
  far.a = Matrix(1, 1);
  far.a(0, 0) = 1.0;
  far.b = {1e6};
  CHECK(prop1_bound(far, fm, part, 0).bound <= 1e-300);
}

TEST_CASE("prop2: direct evaluation, zero flips, cap convention") {
  FlipModel fm;
  fm.epsilon.assign(8, 0.1);
  ProbabilityBound b = prop2_bound(fm, 5);
  CHECK(b.bound == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(!b.vacuous);

  FlipModel zero;
  zero.epsilon.assign(4, 0.0);
  CHECK(prop2_bound(zero, 2).bound == 0.0);

  FlipModel heavy;
  heavy.epsilon.assign(4, 0.9);
  ProbabilityBound cap = prop2_bound(heavy, 2);
  CHECK(cap.bound == 1.0);
  CHECK(cap.vacuous);
  CHECK(cap.raw == doctest::Approx(1.8));

  CHECK_THROWS_AS(prop2_bound(fm, 0), std::invalid_argument);
}

TEST_CASE("prop2 monotonicity: nonincreasing in gamma, nondecreasing in epsilon") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> eps(0.0, 0.4);
  for (int trial = 0; trial < 20; ++trial) {
    FlipModel fm;
    fm.epsilon.resize(6);
    for (auto& e : fm.epsilon) e = eps(rng);
    double prev = 2.0;
    for (int g = 1; g <= 6; ++g) {
      const double b = prop2_bound(fm, g).bound;
      CHECK(b <= prev + 1e-12);
      prev = b;
    }
    FlipModel bigger = fm;
    bigger.epsilon[2] = std::min(1.0, bigger.epsilon[2] + 0.2);
    CHECK(prop2_bound(bigger, 3).bound >= prop2_bound(fm, 3).bound - 1e-12);
  }
}
