#pragma once

#include <memory>
#include <mutex>
#include <string_view>

#include "preqmc/covariance.hpp"
#include "preqmc/fft.hpp"
#include "preqmc/matrix.hpp"

namespace preqmc {

// How the Brownian path is synthesized from iid normals: C = A A^T with
//   standard - Cholesky factor (sequential increments)
//   bridge   - Brownian bridge ordering (terminal point first, midpoints)
//   pca      - principal components, columns ordered by eigenvalue
enum class FactorMethod { standard, bridge, pca };

FactorMethod parse_factor_method(std::string_view name);
const char* to_string(FactorMethod m);

// Per-caller workspace so a shared factorization can serve many threads.
struct MatvecScratch {
  std::vector<double> tmp;
  FstScratch fst;
};

class PathFactorization {
 public:
  PathFactorization(const TimeGrid& grid, FactorMethod method);

  const TimeGrid& grid() const { return grid_; }
  FactorMethod method() const { return method_; }
  std::size_t dim() const { return grid_.steps; }
  bool uses_fast_transform() const { return method_ == FactorMethod::pca; }

  // w = A x. O(d) for standard/bridge, O(d log d) for pca.
  void matvec(const double* x, double* w, MatvecScratch& scratch) const;
  void matvec(const double* x, double* w) const;  // allocates its own scratch
  std::vector<double> matvec(const std::vector<double>& x) const;

  // First column of A; strictly positive for every method (this is what
  // makes x_1 a valid preintegration direction for the digital payoff).
  const std::vector<double>& column_one() const { return col1_; }

  // Eigenvalues (pca only, descending).
  const std::vector<double>& eigenvalues() const;

  // Dense factor, materialized on first use.
  const Matrix& dense_factor() const;

 private:
  void build_standard();
  void build_bridge();
  void build_pca();

  TimeGrid grid_;
  FactorMethod method_;
  std::vector<double> col1_;
  mutable Matrix dense_;
  mutable std::once_flag dense_once_;

  // pca
  std::vector<double> eig_;
  std::vector<double> pca_scale_;  // sqrt(lambda_k) * 2 / sqrt(2d+1)
  std::shared_ptr<OddSineTransform> fst_;

  // bridge plan (QuantLib-style midpoint refinement, path values)
  std::vector<std::size_t> bridge_index_, left_index_, right_index_;
  std::vector<double> left_weight_, right_weight_, std_dev_;
};

// max_{l,k} |(A A^T - C)_{lk}|
double max_factorization_residual(const PathFactorization& f);

}  // namespace preqmc
