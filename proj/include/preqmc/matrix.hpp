#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace preqmc {

// Minimal dense row-major matrix. Enough linear algebra for path
// factorizations and test oracles; not a general BLAS replacement.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return a_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  double* row(std::size_t r) { return a_.data() + r * cols_; }
  const double* row(std::size_t r) const { return a_.data() + r * cols_; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

inline Matrix matmul_abt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matmul_abt: shape mismatch");
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      const double *pa = a.row(i), *pb = b.row(j);
      for (std::size_t k = 0; k < a.cols(); ++k) s += pa[k] * pb[k];
      out(i, j) = s;
    }
  return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      double d = a(i, j) - b(i, j);
      if (d < 0) d = -d;
      if (d > m) m = d;
    }
  return m;
}

}  // namespace preqmc
