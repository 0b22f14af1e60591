#include "flexroc/montecarlo.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "flexroc/rng.hpp"

namespace flexroc {

namespace {

struct Tallies {
  std::vector<unsigned long long> per_row;
  unsigned long long any_row = 0;
  unsigned long long budget = 0;

  explicit Tallies(std::size_t rows) : per_row(rows, 0) {}

  void merge(const Tallies& o) {
    for (std::size_t i = 0; i < per_row.size(); ++i) per_row[i] += o.per_row[i];
    any_row += o.any_row;
    budget += o.budget;
  }
};

// One sample: draw flips from the sample's own counter stream, tally row
// violations and budget overflow. Deterministic per (seed, sample index).
void run_sample(const ConstraintCoefficients& coef, const UncertaintyPartition& part,
                const FlipModel& fm, int gamma, std::uint64_t seed, unsigned long long index,
                double tol, std::vector<double>& r_buf, Tallies& t) {
  const int U = static_cast<int>(coef.a.cols());
  std::uint64_t state = stream_state(seed, index);
  int flips = 0;
  for (int j = 0; j < U; ++j) {
    const bool flip = to_unit_double(splitmix64(state)) < fm.epsilon[static_cast<std::size_t>(j)];
    const int rj = part.flexible[static_cast<std::size_t>(j)];
    const double nominal = part.r_bar[static_cast<std::size_t>(rj)];
    r_buf[static_cast<std::size_t>(j)] = flip ? 1.0 - nominal : nominal;
    flips += flip ? 1 : 0;
  }
  if (flips >= gamma) ++t.budget;
  bool any = false;
  const int I = static_cast<int>(coef.b.size());
  for (int i = 0; i < I; ++i) {
    double lhs = 0.0;
    const double* arow = coef.a.row_ptr(static_cast<std::size_t>(i));
    for (int j = 0; j < U; ++j) lhs += arow[j] * r_buf[static_cast<std::size_t>(j)];
    if (lhs > coef.b[static_cast<std::size_t>(i)] + tol) {
      ++t.per_row[static_cast<std::size_t>(i)];
      any = true;
    }
  }
  if (any) ++t.any_row;
}

double stderr_of(double freq, unsigned long long n) {
  return std::sqrt(freq * (1.0 - freq) / static_cast<double>(n));
}

}  // namespace

McReport monte_carlo_violation_ab(const ConstraintCoefficients& coef,
                                  const UncertaintyPartition& part, const FlipModel& fm,
                                  int gamma, unsigned long long samples, std::uint64_t seed,
                                  const McOptions& opts) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const int U = static_cast<int>(coef.a.cols());
  fm.validate(U);
  const std::size_t I = coef.b.size();

  Tallies total(I);
  if (opts.parallel == ParallelMode::openmp) {
#ifdef _OPENMP
#pragma omp parallel
    {
      Tallies local(I);
      std::vector<double> r_buf(static_cast<std::size_t>(U));
#pragma omp for schedule(static)
      for (long long k = 0; k < static_cast<long long>(samples); ++k)
        run_sample(coef, part, fm, gamma, seed, static_cast<unsigned long long>(k), opts.tol,
                   r_buf, local);
#pragma omp critical
      total.merge(local);
    }
#else
    std::vector<double> r_buf(static_cast<std::size_t>(U));
    for (unsigned long long k = 0; k < samples; ++k)
      run_sample(coef, part, fm, gamma, seed, k, opts.tol, r_buf, total);
#endif
  } else {
    std::vector<double> r_buf(static_cast<std::size_t>(U));
    for (unsigned long long k = 0; k < samples; ++k)
      run_sample(coef, part, fm, gamma, seed, k, opts.tol, r_buf, total);
  }

  McReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.rng_algorithm = kRngAlgorithm;
  rep.per_row_freq.resize(I);
  rep.per_row_stderr.resize(I);
  const auto n = static_cast<double>(samples);
  for (std::size_t i = 0; i < I; ++i) {
    rep.per_row_freq[i] = static_cast<double>(total.per_row[i]) / n;
    rep.per_row_stderr[i] = stderr_of(rep.per_row_freq[i], samples);
  }
  rep.any_row_freq = static_cast<double>(total.any_row) / n;
  rep.any_row_stderr = stderr_of(rep.any_row_freq, samples);
  rep.budget_exceed_freq = static_cast<double>(total.budget) / n;
  rep.budget_exceed_stderr = stderr_of(rep.budget_exceed_freq, samples);
  return rep;
}

McReport monte_carlo_violation(const AffinePolicy& policy, const SystemDynamics& dyn,
                               const ConstraintSet& cons, const UncertaintyPartition& part,
                               const FlipModel& fm, int gamma, unsigned long long samples,
                               std::uint64_t seed, const McOptions& opts) {
  StackedSystem st = build_stacked(dyn, cons);
  CostSpec zero;
  zero.c_x.assign(static_cast<std::size_t>(st.n) * st.N, 0.0);
  zero.c_u.assign(static_cast<std::size_t>(st.p) * st.N, 0.0);
  zero.c_v.assign(static_cast<std::size_t>(st.q) * st.N, 0.0);
  zero.c_r.assign(static_cast<std::size_t>(st.m) * st.N, 0.0);
  CompactConstraints cc = build_compact(st, zero, part, dyn.x0);
  ConstraintCoefficients coef = compute_ab(cc, policy, part);
  return monte_carlo_violation_ab(coef, part, fm, gamma, samples, seed, opts);
}

double binomial_tail_at_least(int n, double p, int k) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  double tail = 0.0;
  for (int i = k; i <= n; ++i) {
    double log_term = 0.0;
    for (int t = 0; t < i; ++t)
      log_term += std::log(static_cast<double>(n - t)) - std::log(static_cast<double>(t + 1));
    log_term += i * std::log(p) + (n - i) * std::log1p(-p);
    tail += std::exp(log_term);
  }
  return tail;
}

}  // namespace flexroc
