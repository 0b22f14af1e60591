#include "flexroc/simplex.hpp"

namespace flexroc::detail {

namespace {

inline void eliminate_one_row(double* row, double mult, const double* pivot,
                              const int* nz_cols, int nnz) {
  for (int t = 0; t < nnz; ++t) {
    const int j = nz_cols[t];
    row[j] -= mult * pivot[j];
  }
}

}  // namespace

void eliminate_rows_serial(double* tableau, std::size_t n_rows, std::size_t n_cols,
                           std::size_t pivot_row, std::size_t pivot_col, const int* nz_cols,
                           int nnz) {
  const double* pivot = tableau + pivot_row * n_cols;
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (i == pivot_row) continue;
    double* row = tableau + i * n_cols;
    const double mult = row[pivot_col];
    if (mult == 0.0) continue;
    eliminate_one_row(row, mult, pivot, nz_cols, nnz);
  }
}

void eliminate_rows_openmp(double* tableau, std::size_t n_rows, std::size_t n_cols,
                           std::size_t pivot_row, std::size_t pivot_col, const int* nz_cols,
                           int nnz) {
  const double* pivot = tableau + pivot_row * n_cols;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long ii = 0; ii < static_cast<long long>(n_rows); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    if (i == pivot_row) continue;
    double* row = tableau + i * n_cols;
    const double mult = row[pivot_col];
    if (mult == 0.0) continue;
    eliminate_one_row(row, mult, pivot, nz_cols, nnz);
  }
}

}  // namespace flexroc::detail
