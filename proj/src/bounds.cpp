#include "flexroc/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace flexroc {

void FlipModel::validate(int u_size) const {
  if (static_cast<int>(epsilon.size()) != u_size)
    throw std::invalid_argument("flip model: expected " + std::to_string(u_size) +
                                " probabilities, got " + std::to_string(epsilon.size()));
  for (std::size_t j = 0; j < epsilon.size(); ++j)
    if (!(epsilon[j] >= 0.0) || !(epsilon[j] <= 1.0))
      throw std::invalid_argument("flip model: epsilon[" + std::to_string(j) +
                                  "] outside [0,1]");
}

double FlipModel::prob_one(const UncertaintyPartition& part, int j) const {
  const int rj = part.flexible[static_cast<std::size_t>(j)];
  return part.r_bar[static_cast<std::size_t>(rj)] ? 1.0 - epsilon[static_cast<std::size_t>(j)]
                                                  : epsilon[static_cast<std::size_t>(j)];
}

ConstraintCoefficients compute_ab(const CompactConstraints& cc, const AffinePolicy& policy,
                                  const UncertaintyPartition& part) {
  const int I = cc.num_rows();
  const int U = part.u_size();
  const int pN = static_cast<int>(cc.P.cols());
  const int qN = static_cast<int>(cc.Q.cols());
  if (static_cast<int>(policy.flexible.size()) != U ||
      static_cast<int>(policy.cont_offset.size()) != pN ||
      static_cast<int>(policy.bin_offset.size()) != qN)
    throw std::invalid_argument("policy dimensions do not match the compact program");

  ConstraintCoefficients out;
  out.a = Matrix(static_cast<std::size_t>(I), static_cast<std::size_t>(U));
  out.b.assign(static_cast<std::size_t>(I), 0.0);
  const std::vector<int> fixed = part.fixed_indices();
  for (int i = 0; i < I; ++i) {
    for (int j = 0; j < U; ++j) {
      double acc = cc.O(i, policy.flexible[static_cast<std::size_t>(j)]);
      for (int k = 0; k < pN; ++k)
        acc += cc.P(i, k) * policy.cont_gain(static_cast<std::size_t>(k), static_cast<std::size_t>(j));
      for (int k = 0; k < qN; ++k)
        acc += cc.Q(i, k) * policy.bin_gain[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      out.a(i, j) = acc;
    }
    double b = cc.h[static_cast<std::size_t>(i)];
    for (int jc : fixed) b -= cc.O(i, jc) * part.r_bar[static_cast<std::size_t>(jc)];
    for (int k = 0; k < pN; ++k) b -= cc.P(i, k) * policy.cont_offset[static_cast<std::size_t>(k)];
    for (int k = 0; k < qN; ++k) b -= cc.Q(i, k) * policy.bin_offset[static_cast<std::size_t>(k)];
    out.b[static_cast<std::size_t>(i)] = b;
  }
  return out;
}

ProbabilityBound prop1_bound(const ConstraintCoefficients& coef, const FlipModel& fm,
                             const UncertaintyPartition& part, int row) {
  const int I = static_cast<int>(coef.b.size());
  const int U = static_cast<int>(coef.a.cols());
  if (row < 0 || row >= I) throw std::invalid_argument("prop1_bound: row out of range");
  fm.validate(U);

  // log prod_j E[exp(a r_j)] with E = (1-p) + p exp(a); stable for large |a|.
  double log_mgf = 0.0;
  for (int j = 0; j < U; ++j) {
    const double a = coef.a(row, j);
    const double pj = fm.prob_one(part, j);
    double term;
    if (pj <= 0.0) term = 0.0;
    else if (pj >= 1.0) term = a;
    else if (a > 0.0) term = a + std::log(pj + (1.0 - pj) * std::exp(-a));
    else term = std::log((1.0 - pj) + pj * std::exp(a));
    log_mgf += term;
  }
  const double log_raw = log_mgf - coef.b[static_cast<std::size_t>(row)];
  ProbabilityBound out;
  out.raw = std::exp(log_raw);
  out.vacuous = log_raw >= 0.0;
  out.bound = out.vacuous ? 1.0 : out.raw;
  return out;
}

ProbabilityBound prop2_bound(const FlipModel& fm, int gamma) {
  if (gamma < 1) throw std::invalid_argument("prop2_bound undefined for gamma < 1");
  double sum = 0.0;
  for (double e : fm.epsilon) {
    if (!(e >= 0.0) || !(e <= 1.0)) throw std::invalid_argument("epsilon outside [0,1]");
    sum += e;
  }
  ProbabilityBound out;
  out.raw = sum / gamma;
  out.vacuous = out.raw >= 1.0;
  out.bound = out.vacuous ? 1.0 : out.raw;
  return out;
}

}  // namespace flexroc
