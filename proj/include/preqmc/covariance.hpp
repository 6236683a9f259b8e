#pragma once

#include <cstddef>
#include <vector>

#include "preqmc/matrix.hpp"

namespace preqmc {

// Equally spaced monitoring grid t_l = l * T / d, l = 1..d.
struct TimeGrid {
  double horizon = 1.0;
  std::size_t steps = 1;

  double dt() const { return horizon / static_cast<double>(steps); }
  double time(std::size_t l) const { return dt() * static_cast<double>(l + 1); }
};

void validate(const TimeGrid& grid);  // horizon > 0, steps >= 1

// Brownian covariance C_{lk} = min(t_l, t_k).
Matrix build_covariance(const TimeGrid& grid);

// Lower-triangular Cholesky factor; throws std::domain_error if the matrix
// is not positive definite.
Matrix cholesky_lower(const Matrix& c);

struct SymEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // columns, first component nonnegative
};

// Cyclic Jacobi eigen decomposition for symmetric matrices. Dense fallback
// for covariances without closed-form spectra, and the test oracle for the
// closed-form path.
SymEigen jacobi_eigen(Matrix c, int max_sweeps = 64);

}  // namespace preqmc
