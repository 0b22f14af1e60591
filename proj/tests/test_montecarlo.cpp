#include "flexroc/montecarlo.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "flexroc/oracle.hpp"
#include "flexroc/reform.hpp"
#include "instance_gen.hpp"
#include "test_util.hpp"

using namespace flexroc;
using namespace flexroc::testutil;

namespace {

AffinePolicy identity_policy() {
  AffinePolicy pol;
  pol.flexible = {0, 1};
  pol.cont_gain = Matrix::identity(2);
  pol.cont_offset = {0.0, 0.0};
  return pol;
}

}  // namespace

TEST_CASE("monte carlo: no flips means no violations for a verified policy") {
  SystemDynamics dyn = worked_dynamics();
  ConstraintSet cons = worked_constraints();
  UncertaintyPartition part = worked_partition();
  FlipModel fm;
  fm.epsilon = {0.0, 0.0};
  McReport rep = monte_carlo_violation(identity_policy(), dyn, cons, part, fm, 2, 2000, 7);
  CHECK(rep.any_row_freq == 0.0);
  for (double f : rep.per_row_freq) CHECK(f == 0.0);
  CHECK(rep.rng_algorithm == std::string("splitmix64-counter"));
}

TEST_CASE("monte carlo: deterministic flips saturate the budget tally") {
  UncertaintyPartition part;
  part.flexible = {0, 1, 2};
  part.r_bar = {0, 0, 0};
  FlipModel fm;
  fm.epsilon = {1.0, 1.0, 1.0};
  ConstraintCoefficients coef;
  coef.a = Matrix(1, 3);
  coef.b = {10.0};
  McReport rep = monte_carlo_violation_ab(coef, part, fm, 2, 5000, 11);
  CHECK(rep.budget_exceed_freq == 1.0);
  CHECK(rep.budget_exceed_stderr == 0.0);
}

TEST_CASE("monte carlo: budget tail matches the exact binomial oracle") {
  UncertaintyPartition part;
  part.flexible = {0, 1, 2, 3, 4, 5, 6, 7};
  part.r_bar.assign(8, 0);
  FlipModel fm;
  fm.epsilon.assign(8, 0.1);
  ConstraintCoefficients coef;
  coef.a = Matrix(1, 8);
  coef.b = {1.0};

  const double exact = binomial_tail_at_least(8, 0.1, 5);
  CHECK(exact == doctest::Approx(4.31649e-4).epsilon(1e-4));

  McReport rep = monte_carlo_violation_ab(coef, part, fm, 5, 100000, 2024);
  const double err = std::max(rep.budget_exceed_stderr, 1e-9);
  CHECK(std::abs(rep.budget_exceed_freq - exact) <= 3.0 * err + 1e-12);
}

TEST_CASE("monte carlo: serial and OpenMP tallies are bit-identical") {
  std::mt19937_64 rng(3);
  RandomInstance inst = random_instance(rng, 2, 4, 4, false);
  AffinePolicy zero;
  zero.flexible = inst.part.flexible;
  zero.cont_gain = Matrix(inst.cc.P.cols(), inst.part.flexible.size());
  zero.cont_offset.assign(inst.cc.P.cols(), 0.0);
  zero.bin_gain.assign(inst.cc.Q.cols(), std::vector<int>(inst.part.flexible.size(), 0));
  zero.bin_offset.assign(inst.cc.Q.cols(), 0);

  FlipModel fm;
  fm.epsilon.assign(inst.part.flexible.size(), 0.25);
  ConstraintCoefficients coef = compute_ab(inst.cc, zero, inst.part);

  McOptions ser;
  ser.parallel = ParallelMode::serial;
  McOptions par;
  par.parallel = ParallelMode::openmp;
  McReport a = monte_carlo_violation_ab(coef, inst.part, fm, 2, 20000, 99, ser);
  McReport b = monte_carlo_violation_ab(coef, inst.part, fm, 2, 20000, 99, par);
  CHECK(a.any_row_freq == b.any_row_freq);
  CHECK(a.budget_exceed_freq == b.budget_exceed_freq);
  for (std::size_t i = 0; i < a.per_row_freq.size(); ++i)
    CHECK(a.per_row_freq[i] == b.per_row_freq[i]);
}

TEST_CASE("per-row empirical frequency stays under the prop1 bound") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> eps(0.0, 0.3);
  int tested = 0;
  for (int trial = 0; trial < 6; ++trial) {
    RandomInstance inst = random_instance(rng, 2, 4, 5, false);
    ReformOptions opts;
    ReformModel model = build_theorem1_milp(inst.cc, inst.part, inst.cost, opts);
    MilpSolution sol = solve_milp(model.milp);
    if (sol.status != SolveStatus::optimal) continue;
    FlexibilityResult res = extract_solution(sol, model, inst.part, inst.cost, opts);
    PolicyVerification ver =
        verify_policy(res.policy, res.gamma_star, inst.dyn, inst.cons, inst.part);
    REQUIRE(ver.ok());
    ++tested;

    FlipModel fm;
    fm.epsilon.resize(inst.part.flexible.size());
    for (auto& e : fm.epsilon) e = eps(rng);
    ConstraintCoefficients coef = compute_ab(inst.cc, res.policy, inst.part);
    McReport rep = monte_carlo_violation_ab(coef, inst.part, fm, std::max(res.gamma_star, 1),
                                            20000, 4242 + trial);
    for (int i = 0; i < static_cast<int>(coef.b.size()); ++i) {
      const double bound = prop1_bound(coef, fm, inst.part, i).bound;
      CHECK(rep.per_row_freq[i] <= bound + 3.0 * rep.per_row_stderr[i] + 1e-9);
    }
  }
  CHECK(tested >= 4);
}
