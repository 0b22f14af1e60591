#pragma once

#include <cstddef>
#include <vector>

#include "flexroc/parallel.hpp"

namespace flexroc::detail {

/// Rank-1 elimination step of the tableau pivot: for every row i != pivot_row
/// with a nonzero multiplier in pivot_col, subtract multiplier * (scaled
/// pivot row), touching only the pivot row's nonzero columns. This is the
/// hot inner kernel of the solver; the serial and OpenMP variants produce
/// bit-identical tableaus because each row is updated independently.
void eliminate_rows_serial(double* tableau, std::size_t n_rows, std::size_t n_cols,
                           std::size_t pivot_row, std::size_t pivot_col,
                           const int* nz_cols, int nnz);

void eliminate_rows_openmp(double* tableau, std::size_t n_rows, std::size_t n_cols,
                           std::size_t pivot_row, std::size_t pivot_col,
                           const int* nz_cols, int nnz);

inline void eliminate_rows(double* tableau, std::size_t n_rows, std::size_t n_cols,
                           std::size_t pivot_row, std::size_t pivot_col, const int* nz_cols,
                           int nnz, ParallelMode mode) {
  if (mode == ParallelMode::openmp)
    eliminate_rows_openmp(tableau, n_rows, n_cols, pivot_row, pivot_col, nz_cols, nnz);
  else
    eliminate_rows_serial(tableau, n_rows, n_cols, pivot_row, pivot_col, nz_cols, nnz);
}

}  // namespace flexroc::detail
