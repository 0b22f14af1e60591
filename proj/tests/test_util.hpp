#pragma once

#include <cmath>
#include <random>

#include "flexroc/system.hpp"

namespace flexroc::testutil {

/// The worked two-step instance used across the suite:
/// x(t+1) = x(t) + r(t) - u(t), x0 = 0, state box [0,1], input box [0,1],
/// N = 2, nominal r = (0,0), both reference indices flexible.
inline SystemDynamics worked_dynamics() {
  SystemDynamics dyn;
  dyn.A = Matrix(1, 1);
  dyn.A(0, 0) = 1.0;
  dyn.B = Matrix(1, 1);
  dyn.B(0, 0) = 1.0;
  dyn.D = Matrix(1, 1);
  dyn.D(0, 0) = -1.0;
  dyn.E = Matrix(1, 0);
  dyn.x0 = {0.0};
  dyn.horizon = 2;
  return dyn;
}

inline ConstraintSet worked_constraints() {
  ConstraintSet cons;
  cons.Gx = Matrix(2, 1);
  cons.Gx(0, 0) = 1.0;
  cons.Gx(1, 0) = -1.0;
  cons.gx = {1.0, 0.0};
  cons.Gr = Matrix(2, 1);  // zero: no reference terms in the input rows
  cons.Gu = Matrix(2, 1);
  cons.Gu(0, 0) = 1.0;
  cons.Gu(1, 0) = -1.0;
  cons.Gv = Matrix(2, 0);
  cons.gr = {1.0, 0.0};
  return cons;
}

inline UncertaintyPartition worked_partition() {
  UncertaintyPartition part;
  part.flexible = {0, 1};
  part.r_bar = {0, 0};
  return part;
}

inline CostSpec zero_cost(const StackedSystem& st) {
  CostSpec c;
  c.c_x.assign(static_cast<std::size_t>(st.n) * st.N, 0.0);
  c.c_u.assign(static_cast<std::size_t>(st.p) * st.N, 0.0);
  c.c_v.assign(static_cast<std::size_t>(st.q) * st.N, 0.0);
  c.c_r.assign(static_cast<std::size_t>(st.m) * st.N, 0.0);
  c.lambda = 1.0;
  c.mode = CostMode::gamma_only;
  return c;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                            double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

inline Vec random_vec(std::mt19937_64& rng, std::size_t len, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Vec v(len);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace flexroc::testutil
