#include "doctest.h"
#include "flexroc/oracle.hpp"
#include "flexroc/reform.hpp"
#include "instance_gen.hpp"

using namespace flexroc;
using namespace flexroc::testutil;

namespace {

FlexibilityResult run_pipeline(const RandomInstance& inst, PolicyMode mode) {
  ReformOptions opts;
  opts.policy_mode = mode;
  ReformModel model = build_theorem1_milp(inst.cc, inst.part, inst.cost, opts);
  MilpSolution sol = solve_milp(model.milp);
  REQUIRE(sol.status == SolveStatus::optimal);
  return extract_solution(sol, model, inst.part, inst.cost, opts);
}

}  // namespace

TEST_CASE("soundness and ordering across pipelines on random instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    RandomInstance inst = random_instance(rng);

    FlexibilityResult affine = run_pipeline(inst, PolicyMode::affine);
    FlexibilityResult open = run_pipeline(inst, PolicyMode::open_loop);
    GammaCertificate adj = exhaustive_gamma(inst.cc, inst.part, ExhaustiveMode::adjustable);
    GammaCertificate stat = exhaustive_gamma(inst.cc, inst.part, ExhaustiveMode::static_single);

    INFO("trial ", trial, ": affine ", affine.gamma_star, " open ", open.gamma_star,
         " adjustable ", adj.gamma_star, " static ", stat.gamma_star);

    // Conservatism: the reformulation never over-claims.
    CHECK(affine.gamma_star <= adj.gamma_star);
    // Policy-space inclusions.
    CHECK(open.gamma_star <= affine.gamma_star);
    CHECK(stat.gamma_star <= affine.gamma_star);

    // Both implementations of the open-loop question answer alike: the
    // dualized open-loop program is exact for constant recourse.
    CHECK(open.gamma_star == stat.gamma_star);

    // The extracted policy survives full enumeration at its own budget.
    PolicyVerification ver =
        verify_policy(affine.policy, affine.gamma_star, inst.dyn, inst.cons, inst.part, 1e-6,
                      inst.cost.mode == CostMode::cost_and_gamma ? &inst.cost : nullptr);
    CHECK(ver.ok());
    if (inst.cost.mode == CostMode::cost_and_gamma && affine.theta.has_value())
      CHECK(*affine.theta >= *ver.worst_cost - 1e-6);

    PolicyVerification ver_open =
        verify_policy(open.policy, open.gamma_star, inst.dyn, inst.cons, inst.part);
    CHECK(ver_open.ok());
  }
}
