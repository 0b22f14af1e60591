#pragma once

#include <cstdint>
#include <string>

#include "flexroc/bounds.hpp"
#include "flexroc/parallel.hpp"

namespace flexroc {

struct McOptions {
  double tol = 1e-6;  // violation margin threshold, matching check_constraints
  ParallelMode parallel = default_parallel_mode();
};

struct McReport {
  unsigned long long samples = 0;
  std::uint64_t seed = 0;
  std::string rng_algorithm;  // recorded for reproducibility
  Vec per_row_freq;           // |I| empirical violation frequencies
  Vec per_row_stderr;
  double any_row_freq = 0.0;
  double any_row_stderr = 0.0;
  double budget_exceed_freq = 0.0;  // Pr(sum of flips >= gamma)
  double budget_exceed_stderr = 0.0;
};

/// Draws independent flips per the flip model (counter-based streams: sample
/// k is generated from stream k of the seed, so results are bit-identical in
/// serial and OpenMP mode), applies the policy through the folded row
/// coefficients, and tallies violations per compact row.
McReport monte_carlo_violation(const AffinePolicy& policy, const SystemDynamics& dyn,
                               const ConstraintSet& cons, const UncertaintyPartition& part,
                               const FlipModel& fm, int gamma, unsigned long long samples,
                               std::uint64_t seed, const McOptions& opts = {});

/// Same sampler evaluated against precomputed row coefficients; the CLI and
/// tests use this when the compact program is already built.
McReport monte_carlo_violation_ab(const ConstraintCoefficients& coef,
                                  const UncertaintyPartition& part, const FlipModel& fm,
                                  int gamma, unsigned long long samples, std::uint64_t seed,
                                  const McOptions& opts = {});

/// Exact tail Pr(Binomial(n, p) >= k); the oracle for the budget-overflow
/// frequency under a uniform flip probability.
double binomial_tail_at_least(int n, double p, int k);

}  // namespace flexroc
