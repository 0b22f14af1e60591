#include "flexroc/reform.hpp"

#include <cmath>
#include <stdexcept>

namespace flexroc {

void ReformOptions::validate() const {
  if (!(big_m > 0.0)) throw std::invalid_argument("big_m must be > 0");
  if (!(gain_bound > 0.0)) throw std::invalid_argument("gain_bound must be > 0");
  if (bin_gain_lo > bin_gain_hi) throw std::invalid_argument("bin_gain bounds inverted");
  if (bin_offset_lo > bin_offset_hi) throw std::invalid_argument("bin_offset bounds inverted");
}

namespace {

ReformModel build_reform(const CompactConstraints& cc, const UncertaintyPartition& part,
                         const CostSpec& cost, const ReformOptions& opts, bool open_loop) {
  opts.validate();
  const int mN = static_cast<int>(cc.O.cols());
  part.validate(mN);
  const int U = part.u_size();
  const int I = cc.num_rows();
  const int pN = static_cast<int>(cc.P.cols());
  const int qN = static_cast<int>(cc.Q.cols());
  const bool epi = cc.epigraph_row >= 0;
  if (epi != (cost.mode == CostMode::cost_and_gamma))
    throw std::invalid_argument("cost mode does not match the compact program's epigraph row");

  ReformModel model;
  if (opts.big_m < 10.0)
    model.warnings.push_back("big_m below 10 is likely binding; expect conservative budgets");

  MilpProblem& mp = model.milp;
  VariableMap& vm = model.vmap;
  vm.u_size = U;
  vm.n_compact_rows = I;
  vm.pN = pN;
  vm.qN = qN;

  if (epi) vm.theta = mp.add_var("theta", -kInf, kInf, VarType::continuous, 1.0);
  vm.delta.resize(U);
  const double delta_cost = cost.mode == CostMode::cost_and_gamma ? -cost.lambda : -1.0;
  for (int j = 0; j < U; ++j)
    vm.delta[j] = mp.add_var("delta_" + std::to_string(j), 0.0, 1.0, VarType::binary, delta_cost);

  if (!open_loop) {
    vm.cont_gain.resize(static_cast<std::size_t>(pN) * U);
    for (int k = 0; k < pN; ++k)
      for (int j = 0; j < U; ++j)
        vm.cont_gain[static_cast<std::size_t>(k) * U + j] =
            mp.add_var("mg_" + std::to_string(k) + "_" + std::to_string(j), -opts.gain_bound,
                       opts.gain_bound, VarType::continuous);
  }
  vm.cont_offset.resize(pN);
  for (int k = 0; k < pN; ++k)
    vm.cont_offset[k] = mp.add_var("eta_" + std::to_string(k), -kInf, kInf);
  if (!open_loop) {
    vm.bin_gain.resize(static_cast<std::size_t>(qN) * U);
    for (int k = 0; k < qN; ++k)
      for (int j = 0; j < U; ++j)
        vm.bin_gain[static_cast<std::size_t>(k) * U + j] =
            mp.add_var("lg_" + std::to_string(k) + "_" + std::to_string(j),
                       static_cast<double>(opts.bin_gain_lo),
                       static_cast<double>(opts.bin_gain_hi), VarType::integer);
  }
  vm.bin_offset.resize(qN);
  for (int k = 0; k < qN; ++k)
    vm.bin_offset[k] = mp.add_var("eps_" + std::to_string(k),
                                  static_cast<double>(opts.bin_offset_lo),
                                  static_cast<double>(opts.bin_offset_hi), VarType::integer);

  vm.mu.resize(static_cast<std::size_t>(I) * U);
  vm.pi.resize(I);
  vm.phi.resize(I);
  vm.yabs.resize(static_cast<std::size_t>(I) * U);
  vm.beta.resize(static_cast<std::size_t>(I) * U);
  for (int i = 0; i < I; ++i) {
    const std::string si = std::to_string(i);
    for (int j = 0; j < U; ++j)
      vm.mu[static_cast<std::size_t>(i) * U + j] =
          mp.add_var("mu_" + si + "_" + std::to_string(j), 0.0, kInf);
    vm.pi[i] = mp.add_var("pi_" + si, 0.0, kInf);
    vm.phi[i] = mp.add_var("phi_" + si, -kInf, kInf);
    for (int j = 0; j < U; ++j)
      vm.yabs[static_cast<std::size_t>(i) * U + j] =
          mp.add_var("y_" + si + "_" + std::to_string(j), 0.0, kInf);
    for (int j = 0; j < U; ++j)
      vm.beta[static_cast<std::size_t>(i) * U + j] =
          mp.add_var("beta_" + si + "_" + std::to_string(j), 0.0, kInf);
  }

  const std::vector<int> fixed = part.fixed_indices();
  const double M = opts.big_m;

  for (int i = 0; i < I; ++i) {
    const std::string si = std::to_string(i);

    // Master row: sum mu + sum beta + phi + P eta + Q eps (+ nominal fixed
    // part folded into the rhs; - theta on the epigraph row).
    {
      SparseRow row;
      for (int j = 0; j < U; ++j) row.terms.push_back({vm.mu[static_cast<std::size_t>(i) * U + j], 1.0});
      for (int j = 0; j < U; ++j) row.terms.push_back({vm.beta[static_cast<std::size_t>(i) * U + j], 1.0});
      row.terms.push_back({vm.phi[i], 1.0});
      for (int k = 0; k < pN; ++k) {
        const double c = cc.P(i, k);
        if (c != 0.0) row.terms.push_back({vm.cont_offset[k], c});
      }
      for (int k = 0; k < qN; ++k) {
        const double c = cc.Q(i, k);
        if (c != 0.0) row.terms.push_back({vm.bin_offset[k], c});
      }
      if (epi && i == cc.epigraph_row) row.terms.push_back({vm.theta, -1.0});
      double rhs = cc.h[i];
      for (int jc : fixed) rhs -= cc.O(i, jc) * part.r_bar[static_cast<std::size_t>(jc)];
      row.sense = RowSense::le;
      row.rhs = rhs;
      row.name = "master_" + si;
      mp.add_row(std::move(row));
    }

    // Dual rows: mu_ij + pi_i >= (1/2)(A_ij + y_ij) -/+ A_ij rbar_j with
    // A_ij = O_ij + P_i. M_.j + Q_i. L_.j.
    for (int j = 0; j < U; ++j) {
      const int rj = part.flexible[j];
      const double rb = part.r_bar[static_cast<std::size_t>(rj)];
      const double f = opts.dual_sign == DualSign::derivation ? 0.5 - rb : 0.5 + rb;
      SparseRow row;
      row.terms.push_back({vm.mu[static_cast<std::size_t>(i) * U + j], 1.0});
      row.terms.push_back({vm.pi[i], 1.0});
      row.terms.push_back({vm.yabs[static_cast<std::size_t>(i) * U + j], -0.5});
      if (!open_loop) {
        for (int k = 0; k < pN; ++k) {
          const double c = cc.P(i, k);
          if (c != 0.0)
            row.terms.push_back({vm.cont_gain[static_cast<std::size_t>(k) * U + j], -f * c});
        }
        for (int k = 0; k < qN; ++k) {
          const double c = cc.Q(i, k);
          if (c != 0.0)
            row.terms.push_back({vm.bin_gain[static_cast<std::size_t>(k) * U + j], -f * c});
        }
      }
      row.sense = RowSense::ge;
      row.rhs = f * cc.O(i, rj);
      row.name = "dual_" + si + "_" + std::to_string(j);
      mp.add_row(std::move(row));
    }

    // Absolute-value envelope: -y_ij <= A_ij <= y_ij.
    for (int j = 0; j < U; ++j) {
      const int rj = part.flexible[j];
      SparseRow up, lo;
      up.terms.push_back({vm.yabs[static_cast<std::size_t>(i) * U + j], -1.0});
      lo.terms.push_back({vm.yabs[static_cast<std::size_t>(i) * U + j], -1.0});
      if (!open_loop) {
        for (int k = 0; k < pN; ++k) {
          const double c = cc.P(i, k);
          if (c != 0.0) {
            up.terms.push_back({vm.cont_gain[static_cast<std::size_t>(k) * U + j], c});
            lo.terms.push_back({vm.cont_gain[static_cast<std::size_t>(k) * U + j], -c});
          }
        }
        for (int k = 0; k < qN; ++k) {
          const double c = cc.Q(i, k);
          if (c != 0.0) {
            up.terms.push_back({vm.bin_gain[static_cast<std::size_t>(k) * U + j], c});
            lo.terms.push_back({vm.bin_gain[static_cast<std::size_t>(k) * U + j], -c});
          }
        }
      }
      up.sense = lo.sense = RowSense::le;
      up.rhs = -cc.O(i, rj);
      lo.rhs = cc.O(i, rj);
      up.name = "absu_" + si + "_" + std::to_string(j);
      lo.name = "absl_" + si + "_" + std::to_string(j);
      mp.add_row(std::move(up));
      mp.add_row(std::move(lo));
    }

    // Nominal-term row: phi_i >= sum_j A_ij rbar_j over the flexible set.
    {
      SparseRow row;
      double rhs = 0.0;
      for (int j = 0; j < U; ++j) {
        const int rj = part.flexible[j];
        if (!part.r_bar[static_cast<std::size_t>(rj)]) continue;
        rhs -= cc.O(i, rj);
        if (!open_loop) {
          for (int k = 0; k < pN; ++k) {
            const double c = cc.P(i, k);
            if (c != 0.0)
              row.terms.push_back({vm.cont_gain[static_cast<std::size_t>(k) * U + j], c});
          }
          for (int k = 0; k < qN; ++k) {
            const double c = cc.Q(i, k);
            if (c != 0.0)
              row.terms.push_back({vm.bin_gain[static_cast<std::size_t>(k) * U + j], c});
          }
        }
      }
      row.terms.push_back({vm.phi[i], -1.0});
      row.sense = RowSense::le;
      row.rhs = rhs;
      row.name = "nom_" + si;
      mp.add_row(std::move(row));
    }

    // Big-M linearization of the budget product: beta_ij = pi_i delta_j.
    for (int j = 0; j < U; ++j) {
      const int b = vm.beta[static_cast<std::size_t>(i) * U + j];
      const std::string sj = std::to_string(j);
      mp.add_row({{{b, -1.0}}, RowSense::le, 0.0, "bm_lo_" + si + "_" + sj});
      mp.add_row({{{b, 1.0}, {vm.delta[j], -M}}, RowSense::le, 0.0, "bm_cap_" + si + "_" + sj});
      mp.add_row({{{b, 1.0}, {vm.pi[i], -1.0}}, RowSense::le, 0.0, "bm_pi_" + si + "_" + sj});
      mp.add_row({{{vm.pi[i], 1.0}, {b, -1.0}, {vm.delta[j], M}}, RowSense::le, M,
                  "bm_gap_" + si + "_" + sj});
    }
  }

  if (opts.force_gamma_min >= 0) {
    SparseRow row;
    for (int j = 0; j < U; ++j) row.terms.push_back({vm.delta[j], 1.0});
    row.sense = RowSense::ge;
    row.rhs = static_cast<double>(opts.force_gamma_min);
    row.name = "force_gamma";
    mp.add_row(std::move(row));
  }
  return model;
}

int round_exact(double v, double residual_tol, const std::string& what) {
  const double r = std::round(v);
  if (std::abs(v - r) > residual_tol)
    throw std::runtime_error("integrality residual too large for " + what + ": " +
                             std::to_string(v));
  return static_cast<int>(r);
}

}  // namespace

ReformModel build_theorem1_milp(const CompactConstraints& cc, const UncertaintyPartition& part,
                                const CostSpec& cost, const ReformOptions& opts) {
  return build_reform(cc, part, cost, opts, opts.policy_mode == PolicyMode::open_loop);
}

ReformModel build_open_loop_milp(const CompactConstraints& cc, const UncertaintyPartition& part,
                                 const CostSpec& cost, const ReformOptions& opts) {
  return build_reform(cc, part, cost, opts, true);
}

FlexibilityResult extract_solution(const MilpSolution& sol, const ReformModel& model,
                                   const UncertaintyPartition& part, const CostSpec& cost,
                                   const ReformOptions& opts) {
  if (sol.status != SolveStatus::optimal)
    throw std::runtime_error("extract_solution requires an optimal solution, got " +
                             to_string(sol.status));
  const VariableMap& vm = model.vmap;
  const int U = vm.u_size;
  constexpr double kResidual = 1e-6;

  FlexibilityResult out;
  out.warnings = model.warnings;
  out.delta.resize(U);
  int gamma = 0;
  for (int j = 0; j < U; ++j) {
    const int d = round_exact(sol.x[vm.delta[j]], kResidual, "delta[" + std::to_string(j) + "]");
    if (d != 0 && d != 1)
      throw std::runtime_error("delta[" + std::to_string(j) + "] is not binary");
    out.delta[j] = static_cast<std::uint8_t>(d);
    gamma += d;
  }
  out.gamma_star = gamma;

  AffinePolicy& pol = out.policy;
  pol.flexible = part.flexible;
  pol.cont_gain = Matrix(static_cast<std::size_t>(vm.pN), static_cast<std::size_t>(U));
  if (!vm.cont_gain.empty())
    for (int k = 0; k < vm.pN; ++k)
      for (int j = 0; j < U; ++j)
        pol.cont_gain(static_cast<std::size_t>(k), static_cast<std::size_t>(j)) =
            sol.x[vm.cont_gain[static_cast<std::size_t>(k) * U + j]];
  pol.cont_offset.assign(static_cast<std::size_t>(vm.pN), 0.0);
  for (int k = 0; k < vm.pN; ++k) pol.cont_offset[k] = sol.x[vm.cont_offset[k]];
  pol.bin_gain.assign(static_cast<std::size_t>(vm.qN), std::vector<int>(static_cast<std::size_t>(U), 0));
  if (!vm.bin_gain.empty())
    for (int k = 0; k < vm.qN; ++k)
      for (int j = 0; j < U; ++j)
        pol.bin_gain[k][j] = round_exact(sol.x[vm.bin_gain[static_cast<std::size_t>(k) * U + j]],
                                         kResidual, "bin_gain");
  pol.bin_offset.assign(static_cast<std::size_t>(vm.qN), 0);
  for (int k = 0; k < vm.qN; ++k)
    pol.bin_offset[k] = round_exact(sol.x[vm.bin_offset[k]], kResidual, "bin_offset");

  if (vm.theta >= 0) {
    out.theta = sol.x[vm.theta];
    const double expect = *out.theta - cost.lambda * gamma;
    if (std::abs(sol.objective - expect) > 1e-6 * std::max(1.0, std::abs(expect)))
      out.warnings.push_back("objective inconsistent with theta - lambda * gamma");
  }
  out.objective = sol.objective;
  out.stats = {sol.nodes, sol.lp_iterations, sol.wall_seconds};

  // Big-M audit: multipliers crowding the cap mean the relaxation may be
  // binding and gamma under-reported.
  const double near = opts.big_m * (1.0 - 1e-3);
  bool binding = false;
  for (int i = 0; i < vm.n_compact_rows && !binding; ++i) {
    if (sol.x[vm.pi[i]] >= near) binding = true;
    for (int j = 0; j < U && !binding; ++j)
      if (sol.x[vm.beta[static_cast<std::size_t>(i) * U + j]] >= near) binding = true;
  }
  if (binding)
    out.warnings.push_back("pi or beta within 0.1% of big_m; consider a larger big_m");
  return out;
}

std::pair<Vec, Vec> policy_response(const AffinePolicy& policy, const Vec& r_realized,
                                    const UncertaintyPartition& part) {
  const int mN = static_cast<int>(part.r_bar.size());
  if (static_cast<int>(r_realized.size()) != mN)
    throw std::invalid_argument("r_realized: expected length " + std::to_string(mN));
  std::vector<char> flex(static_cast<std::size_t>(mN), 0);
  for (int k : part.flexible) flex[static_cast<std::size_t>(k)] = 1;
  for (int k = 0; k < mN; ++k) {
    const double v = r_realized[static_cast<std::size_t>(k)];
    if (v != 0.0 && v != 1.0)
      throw std::invalid_argument("r_realized[" + std::to_string(k) + "] must be binary");
    if (!flex[static_cast<std::size_t>(k)] &&
        static_cast<int>(v) != static_cast<int>(part.r_bar[static_cast<std::size_t>(k)]))
      throw std::invalid_argument("r_realized[" + std::to_string(k) +
                                  "] differs from the nominal value on a fixed index");
  }

  const int U = static_cast<int>(policy.flexible.size());
  const int pN = static_cast<int>(policy.cont_offset.size());
  const int qN = static_cast<int>(policy.bin_offset.size());
  Vec u(static_cast<std::size_t>(pN), 0.0);
  for (int k = 0; k < pN; ++k) {
    double acc = policy.cont_offset[k];
    for (int j = 0; j < U; ++j)
      acc += policy.cont_gain(static_cast<std::size_t>(k), static_cast<std::size_t>(j)) *
             r_realized[static_cast<std::size_t>(policy.flexible[j])];
    u[k] = acc;
  }
  Vec v(static_cast<std::size_t>(qN), 0.0);
  for (int k = 0; k < qN; ++k) {
    long long acc = policy.bin_offset[k];
    for (int j = 0; j < U; ++j)
      acc += static_cast<long long>(policy.bin_gain[k][j]) *
             static_cast<long long>(r_realized[static_cast<std::size_t>(policy.flexible[j])]);
    v[k] = static_cast<double>(acc);
  }
  return {std::move(u), std::move(v)};
}

unsigned long long scenario_count(int u_size, int gamma) {
  if (gamma < 0 || gamma > u_size) throw std::invalid_argument("gamma out of range");
  unsigned long long total = 0;
  unsigned long long binom = 1;  // C(u_size, 0)
  for (int i = 0; i <= gamma; ++i) {
    total += binom;
    binom = binom * static_cast<unsigned long long>(u_size - i) / (i + 1);
  }
  return total;
}

ConstraintCounts count_constraints(int compact_rows, int u_size, int gamma, CostMode mode) {
  ConstraintCounts out;
  const long long rows = compact_rows + (mode == CostMode::cost_and_gamma ? 1 : 0);
  out.theorem1_rows = rows * (2 + 7ll * u_size);
  out.exhaustive_scenarios = scenario_count(u_size, gamma);
  return out;
}

}  // namespace flexroc
