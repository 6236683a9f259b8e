#include "preqmc/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace preqmc {

void validate(const TimeGrid& grid) {
  if (!(grid.horizon > 0.0))
    throw std::invalid_argument("TimeGrid: horizon must be positive");
  if (grid.steps == 0)
    throw std::invalid_argument("TimeGrid: needs at least one step");
}

Matrix build_covariance(const TimeGrid& grid) {
  validate(grid);
  std::size_t d = grid.steps;
  Matrix c(d, d);
  for (std::size_t l = 0; l < d; ++l)
    for (std::size_t k = 0; k < d; ++k)
      c(l, k) = grid.time(std::min(l, k));
  return c;
}

Matrix cholesky_lower(const Matrix& c) {
  if (c.rows() != c.cols()) throw std::invalid_argument("cholesky: not square");
  std::size_t n = c.rows();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = c(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      if (i == j) {
        if (s <= 0.0) throw std::domain_error("cholesky: matrix not positive definite");
        a(i, i) = std::sqrt(s);
      } else {
        a(i, j) = s / a(j, j);
      }
    }
  }
  return a;
}

SymEigen jacobi_eigen(Matrix a, int max_sweeps) {
  if (a.rows() != a.cols()) throw std::invalid_argument("jacobi: not square");
  std::size_t n = a.rows();
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
    return s;
  };
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a(i, i)));
  const double tol = 1e-14 * std::max(scale, 1.0);

  for (int sweep = 0; sweep < max_sweeps && off_norm() > tol * tol * n * n; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double cs = 1.0 / std::sqrt(t * t + 1.0), sn = t * cs;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = cs * akp - sn * akq;
          a(k, q) = sn * akp + cs * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = cs * apk - sn * aqk;
          a(q, k) = sn * apk + cs * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = cs * vkp - sn * vkq;
          v(k, q) = sn * vkp + cs * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return diag[x] > diag[y]; });

  SymEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t src = order[j];
    out.values[j] = diag[src];
    double sign = v(0, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = sign * v(i, src);
  }
  return out;
}

}  // namespace preqmc
