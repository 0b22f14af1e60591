#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace flexroc {

using Vec = std::vector<double>;

/// Dense row-major matrix. Sized for desk-scale problems; no sparsity.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

  bool operator==(const Matrix& o) const = default;

  /// Writes `src` into this matrix with its (0,0) entry at (r0, c0).
  void set_block(std::size_t r0, std::size_t c0, const Matrix& src) {
    for (std::size_t i = 0; i < src.rows_; ++i)
      for (std::size_t j = 0; j < src.cols_; ++j) (*this)(r0 + i, c0 + j) = src(i, j);
  }

  Matrix operator*(const Matrix& b) const {
    if (cols_ != b.rows_) throw std::invalid_argument("matrix product: inner dimensions differ");
    Matrix out(rows_, b.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const double aik = (*this)(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  Vec operator*(const Vec& v) const {
    if (cols_ != v.size()) throw std::invalid_argument("matrix-vector product: dimension mismatch");
    Vec out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      double acc = 0.0;
      const double* r = row_ptr(i);
      for (std::size_t j = 0; j < cols_; ++j) acc += r[j] * v[j];
      out[i] = acc;
    }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double inf_norm_diff(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("inf_norm_diff: length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
    if (d > worst) worst = d;
  }
  return worst;
}

}  // namespace flexroc
