#pragma once

#include <vector>

#include "flexroc/reform.hpp"
#include "flexroc/system.hpp"

namespace flexroc {

/// Independent flip probabilities for the flexible reference indices:
/// epsilon[j] = Pr(r_j != rbar_j), ordered like the partition's flexible
/// set. The induced Bernoulli parameter is Pr(r_j = 1) = epsilon[j] when
/// rbar_j = 0 and 1 - epsilon[j] otherwise.
struct FlipModel {
  Vec epsilon;

  void validate(int u_size) const;
  double prob_one(const UncertaintyPartition& part, int j) const;
};

/// Row-wise constants of the violation analysis: the policy is folded into
/// the compact rows, a(i,j) multiplies the random r_j (j flexible) and b(i)
/// absorbs everything deterministic.
struct ConstraintCoefficients {
  Matrix a;  // |I| x |U|
  Vec b;     // |I|
};

ConstraintCoefficients compute_ab(const CompactConstraints& cc, const AffinePolicy& policy,
                                  const UncertaintyPartition& part);

/// A probability bound with its raw (uncapped) value; bounds above 1 are
/// reported as 1 and flagged vacuous.
struct ProbabilityBound {
  double bound = 1.0;
  double raw = 1.0;
  bool vacuous = false;
};

/// Markov/Chernoff-style per-row violation bound:
/// prod_j E[exp(a_ij r_j)] / exp(b_i), evaluated in log space.
ProbabilityBound prop1_bound(const ConstraintCoefficients& coef, const FlipModel& fm,
                             const UncertaintyPartition& part, int row);

/// System-independent budget-overflow bound: sum_j epsilon_j / gamma.
/// gamma must be >= 1; the bound is undefined at zero.
ProbabilityBound prop2_bound(const FlipModel& fm, int gamma);

}  // namespace flexroc
