#include "flexroc/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flexroc {

namespace {

void require_dims(const Matrix& mat, std::size_t rows, std::size_t cols, const std::string& name) {
  if (mat.rows() != rows || mat.cols() != cols) {
    throw std::invalid_argument(name + ": expected " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", got " + std::to_string(mat.rows()) +
                                "x" + std::to_string(mat.cols()));
  }
}

void require_len(const Vec& v, std::size_t len, const std::string& name) {
  if (v.size() != len) {
    throw std::invalid_argument(name + ": expected length " + std::to_string(len) + ", got " +
                                std::to_string(v.size()));
  }
}

}  // namespace

void SystemDynamics::validate() const {
  const std::size_t nn = A.rows();
  require_dims(A, nn, nn, "A");
  require_dims(B, nn, B.cols(), "B");
  require_dims(D, nn, D.cols(), "D");
  require_dims(E, nn, E.cols(), "E");
  require_len(x0, nn, "x0");
  if (horizon < 1) throw std::invalid_argument("horizon: must be >= 1");
}

void ConstraintSet::validate(const SystemDynamics& dyn) const {
  require_dims(Gx, Gx.rows(), static_cast<std::size_t>(dyn.n()), "Gx");
  require_len(gx, Gx.rows(), "gx");
  const std::size_t ru = Gr.rows();
  require_dims(Gr, ru, static_cast<std::size_t>(dyn.m()), "Gr");
  require_dims(Gu, ru, static_cast<std::size_t>(dyn.p()), "Gu");
  require_dims(Gv, ru, static_cast<std::size_t>(dyn.q()), "Gv");
  require_len(gr, ru, "gr");
  const auto N = static_cast<std::size_t>(dyn.horizon);
  if (!gx_steps.empty()) require_dims(gx_steps, N, Gx.rows(), "gx_steps");
  if (!gr_steps.empty()) require_dims(gr_steps, N, ru, "gr_steps");
}

void CostSpec::validate(const StackedSystem& st) const {
  require_len(c_x, static_cast<std::size_t>(st.n) * st.N, "c_x");
  require_len(c_u, static_cast<std::size_t>(st.p) * st.N, "c_u");
  require_len(c_v, static_cast<std::size_t>(st.q) * st.N, "c_v");
  require_len(c_r, static_cast<std::size_t>(st.m) * st.N, "c_r");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda: must be > 0");
  if (mode == CostMode::gamma_only) {
    auto all_zero = [](const Vec& v) {
      return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
    };
    if (!all_zero(c_x) || !all_zero(c_u) || !all_zero(c_v) || !all_zero(c_r))
      throw std::invalid_argument("cost vectors must be zero in gamma_only mode");
  }
}

std::vector<int> UncertaintyPartition::fixed_indices() const {
  std::vector<std::uint8_t> in_u(r_bar.size(), 0);
  for (int k : flexible) in_u[static_cast<std::size_t>(k)] = 1;
  std::vector<int> out;
  for (std::size_t k = 0; k < r_bar.size(); ++k)
    if (!in_u[k]) out.push_back(static_cast<int>(k));
  return out;
}

void UncertaintyPartition::validate(int mN) const {
  if (static_cast<int>(r_bar.size()) != mN)
    throw std::invalid_argument("r_bar: expected length " + std::to_string(mN));
  for (std::size_t k = 0; k < r_bar.size(); ++k)
    if (r_bar[k] > 1)
      throw std::invalid_argument("r_bar[" + std::to_string(k) + "]: must be 0 or 1");
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(mN), 0);
  for (int k : flexible) {
    if (k < 0 || k >= mN)
      throw std::invalid_argument("flexible index " + std::to_string(k) + " out of range");
    if (seen[static_cast<std::size_t>(k)])
      throw std::invalid_argument("flexible index " + std::to_string(k) + " repeated");
    seen[static_cast<std::size_t>(k)] = 1;
  }
}

StackedSystem build_stacked(const SystemDynamics& dyn, const ConstraintSet& cons) {
  dyn.validate();
  cons.validate(dyn);

  const int n = dyn.n(), m = dyn.m(), p = dyn.p(), q = dyn.q(), N = dyn.horizon;
  StackedSystem st;
  st.n = n;
  st.m = m;
  st.p = p;
  st.q = q;
  st.N = N;

  // Powers of A: pw[k] = A^k, k = 0..N.
  std::vector<Matrix> pw(static_cast<std::size_t>(N) + 1);
  pw[0] = Matrix::identity(static_cast<std::size_t>(n));
  for (int k = 1; k <= N; ++k) pw[static_cast<std::size_t>(k)] = dyn.A * pw[static_cast<std::size_t>(k - 1)];

  st.Fx = Matrix(static_cast<std::size_t>(n) * N, static_cast<std::size_t>(n));
  for (int t = 1; t <= N; ++t)
    st.Fx.set_block(static_cast<std::size_t>(n) * (t - 1), 0, pw[static_cast<std::size_t>(t)]);

  auto build_input_map = [&](const Matrix& gain, int width) {
    Matrix F(static_cast<std::size_t>(n) * N, static_cast<std::size_t>(width) * N);
    if (width == 0) return F;
    for (int t = 1; t <= N; ++t)
      for (int j = 0; j < t; ++j) {
        // x(t) picks up A^{t-1-j} * gain applied to the step-j input.
        Matrix blk = pw[static_cast<std::size_t>(t - 1 - j)] * gain;
        F.set_block(static_cast<std::size_t>(n) * (t - 1), static_cast<std::size_t>(width) * j, blk);
      }
    return F;
  };
  st.Fr = build_input_map(dyn.B, m);
  st.Fu = build_input_map(dyn.D, p);
  st.Fv = build_input_map(dyn.E, q);

  const int rx = cons.rows_x(), ru = cons.rows_u();
  st.Gx_s = Matrix(static_cast<std::size_t>(rx) * N, static_cast<std::size_t>(n) * N);
  st.gx_s.assign(static_cast<std::size_t>(rx) * N, 0.0);
  st.Gr_s = Matrix(static_cast<std::size_t>(ru) * N, static_cast<std::size_t>(m) * N);
  st.Gu_s = Matrix(static_cast<std::size_t>(ru) * N, static_cast<std::size_t>(p) * N);
  st.Gv_s = Matrix(static_cast<std::size_t>(ru) * N, static_cast<std::size_t>(q) * N);
  st.gr_s.assign(static_cast<std::size_t>(ru) * N, 0.0);
  for (int t = 0; t < N; ++t) {
    st.Gx_s.set_block(static_cast<std::size_t>(rx) * t, static_cast<std::size_t>(n) * t, cons.Gx);
    st.Gr_s.set_block(static_cast<std::size_t>(ru) * t, static_cast<std::size_t>(m) * t, cons.Gr);
    st.Gu_s.set_block(static_cast<std::size_t>(ru) * t, static_cast<std::size_t>(p) * t, cons.Gu);
    st.Gv_s.set_block(static_cast<std::size_t>(ru) * t, static_cast<std::size_t>(q) * t, cons.Gv);
    for (int i = 0; i < rx; ++i)
      st.gx_s[static_cast<std::size_t>(rx) * t + i] =
          cons.gx_steps.empty() ? cons.gx[static_cast<std::size_t>(i)]
                                : cons.gx_steps(static_cast<std::size_t>(t), static_cast<std::size_t>(i));
    for (int i = 0; i < ru; ++i)
      st.gr_s[static_cast<std::size_t>(ru) * t + i] =
          cons.gr_steps.empty() ? cons.gr[static_cast<std::size_t>(i)]
                                : cons.gr_steps(static_cast<std::size_t>(t), static_cast<std::size_t>(i));
  }
  return st;
}

CompactConstraints build_compact(const StackedSystem& st, const CostSpec& cost,
                                 const UncertaintyPartition& part, const Vec& x0) {
  cost.validate(st);
  part.validate(st.m * st.N);
  if (static_cast<int>(x0.size()) != st.n)
    throw std::invalid_argument("x0: expected length " + std::to_string(st.n));

  const std::size_t mN = static_cast<std::size_t>(st.m) * st.N;
  const std::size_t pN = static_cast<std::size_t>(st.p) * st.N;
  const std::size_t qN = static_cast<std::size_t>(st.q) * st.N;
  const std::size_t n_state = st.Gx_s.rows();
  const std::size_t n_input = st.Gr_s.rows();
  const std::size_t n_box = 2 * qN;
  const bool epi = cost.mode == CostMode::cost_and_gamma;
  const std::size_t total = n_state + n_input + n_box + (epi ? 1 : 0);

  CompactConstraints cc;
  cc.O = Matrix(total, mN);
  cc.P = Matrix(total, pN);
  cc.Q = Matrix(total, qN);
  cc.h.assign(total, 0.0);
  cc.kind.assign(total, RowKind::state);

  // State rows: Gx_s (Fx x0 + Fr r + Fu u + Fv v) <= gx_s.
  Matrix GFr = st.Gx_s * st.Fr;
  Matrix GFu = st.Gx_s * st.Fu;
  Matrix GFv = st.Gx_s * st.Fv;
  Vec GFx0 = st.Gx_s * (st.Fx * x0);
  cc.O.set_block(0, 0, GFr);
  cc.P.set_block(0, 0, GFu);
  cc.Q.set_block(0, 0, GFv);
  for (std::size_t i = 0; i < n_state; ++i) cc.h[i] = st.gx_s[i] - GFx0[i];

  // Input rows straight from the stacked input constraints.
  cc.O.set_block(n_state, 0, st.Gr_s);
  cc.P.set_block(n_state, 0, st.Gu_s);
  cc.Q.set_block(n_state, 0, st.Gv_s);
  for (std::size_t i = 0; i < n_input; ++i) {
    cc.h[n_state + i] = st.gr_s[i];
    cc.kind[n_state + i] = RowKind::input;
  }

  // Binary box rows: v_k <= 1 and -v_k <= 0 for every binary channel.
  for (std::size_t k = 0; k < qN; ++k) {
    const std::size_t r_up = n_state + n_input + 2 * k;
    cc.Q(r_up, k) = 1.0;
    cc.h[r_up] = 1.0;
    cc.kind[r_up] = RowKind::binary_box;
    cc.Q(r_up + 1, k) = -1.0;
    cc.h[r_up + 1] = 0.0;
    cc.kind[r_up + 1] = RowKind::binary_box;
  }

  if (epi) {
    // c_r' r + c_x' (Fx x0 + Fr r + Fu u + Fv v) + c_u' u + c_v' v - theta <= 0.
    const std::size_t row = total - 1;
    for (std::size_t j = 0; j < mN; ++j) {
      double acc = cost.c_r[j];
      for (std::size_t i = 0; i < static_cast<std::size_t>(st.n) * st.N; ++i)
        acc += cost.c_x[i] * st.Fr(i, j);
      cc.O(row, j) = acc;
    }
    for (std::size_t j = 0; j < pN; ++j) {
      double acc = cost.c_u[j];
      for (std::size_t i = 0; i < static_cast<std::size_t>(st.n) * st.N; ++i)
        acc += cost.c_x[i] * st.Fu(i, j);
      cc.P(row, j) = acc;
    }
    for (std::size_t j = 0; j < qN; ++j) {
      double acc = cost.c_v[j];
      for (std::size_t i = 0; i < static_cast<std::size_t>(st.n) * st.N; ++i)
        acc += cost.c_x[i] * st.Fv(i, j);
      cc.Q(row, j) = acc;
    }
    cc.h[row] = -dot(cost.c_x, st.Fx * x0);
    cc.kind[row] = RowKind::epigraph;
    cc.epigraph_row = static_cast<int>(row);
  }

  if (total == 0) cc.warnings.push_back("compact program has no constraint rows");
  return cc;
}

Vec simulate(const SystemDynamics& dyn, const Vec& x0, const Vec& r, const Vec& u, const Vec& v) {
  dyn.validate();
  const int n = dyn.n(), m = dyn.m(), p = dyn.p(), q = dyn.q(), N = dyn.horizon;
  require_len(x0, static_cast<std::size_t>(n), "x0");
  require_len(r, static_cast<std::size_t>(m) * N, "r");
  require_len(u, static_cast<std::size_t>(p) * N, "u");
  require_len(v, static_cast<std::size_t>(q) * N, "v");

  Vec traj(static_cast<std::size_t>(n) * N, 0.0);
  Vec x = x0;
  for (int t = 0; t < N; ++t) {
    Vec next(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += dyn.A(i, j) * x[static_cast<std::size_t>(j)];
      for (int j = 0; j < m; ++j) acc += dyn.B(i, j) * r[static_cast<std::size_t>(m) * t + j];
      for (int j = 0; j < p; ++j) acc += dyn.D(i, j) * u[static_cast<std::size_t>(p) * t + j];
      for (int j = 0; j < q; ++j) acc += dyn.E(i, j) * v[static_cast<std::size_t>(q) * t + j];
      next[static_cast<std::size_t>(i)] = acc;
    }
    for (int i = 0; i < n; ++i) traj[static_cast<std::size_t>(n) * t + i] = next[static_cast<std::size_t>(i)];
    x = next;
  }
  return traj;
}

ViolationReport check_constraints(const Vec& traj, const Vec& r, const Vec& u, const Vec& v,
                                  const SystemDynamics& dyn, const ConstraintSet& cons,
                                  double tol) {
  if (tol < 0.0) throw std::invalid_argument("tol: must be >= 0");
  const int n = dyn.n(), m = dyn.m(), p = dyn.p(), q = dyn.q(), N = dyn.horizon;
  require_len(traj, static_cast<std::size_t>(n) * N, "traj");
  require_len(r, static_cast<std::size_t>(m) * N, "r");
  require_len(u, static_cast<std::size_t>(p) * N, "u");
  require_len(v, static_cast<std::size_t>(q) * N, "v");

  const int rx = cons.rows_x(), ru = cons.rows_u();
  ViolationReport rep;
  rep.max_margin = -std::numeric_limits<double>::infinity();
  auto note = [&](int row, RowKind kind, double lhs, double rhs) {
    const double margin = lhs - rhs;
    if (margin > rep.max_margin) rep.max_margin = margin;
    if (margin > tol) rep.violations.push_back({row, kind, margin});
  };

  for (int t = 0; t < N; ++t)
    for (int i = 0; i < rx; ++i) {
      double lhs = 0.0;
      for (int j = 0; j < n; ++j) lhs += cons.Gx(i, j) * traj[static_cast<std::size_t>(n) * t + j];
      const double rhs = cons.gx_steps.empty()
                             ? cons.gx[static_cast<std::size_t>(i)]
                             : cons.gx_steps(static_cast<std::size_t>(t), static_cast<std::size_t>(i));
      note(rx * t + i, RowKind::state, lhs, rhs);
    }
  const int base = rx * N;
  for (int t = 0; t < N; ++t)
    for (int i = 0; i < ru; ++i) {
      double lhs = 0.0;
      for (int j = 0; j < m; ++j) lhs += cons.Gr(i, j) * r[static_cast<std::size_t>(m) * t + j];
      for (int j = 0; j < p; ++j) lhs += cons.Gu(i, j) * u[static_cast<std::size_t>(p) * t + j];
      for (int j = 0; j < q; ++j) lhs += cons.Gv(i, j) * v[static_cast<std::size_t>(q) * t + j];
      const double rhs = cons.gr_steps.empty()
                             ? cons.gr[static_cast<std::size_t>(i)]
                             : cons.gr_steps(static_cast<std::size_t>(t), static_cast<std::size_t>(i));
      note(base + ru * t + i, RowKind::input, lhs, rhs);
    }
  return rep;
}

Vec compact_lhs(const CompactConstraints& cc, const Vec& r, const Vec& u, const Vec& v) {
  Vec lhs = cc.O * r;
  const Vec pu = cc.P * u;
  const Vec qv = cc.Q * v;
  for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] += pu[i] + qv[i];
  return lhs;
}

}  // namespace flexroc
