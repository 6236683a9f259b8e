#include "preqmc/factorization.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace preqmc {

namespace {
constexpr double kPi = std::numbers::pi;
}

FactorMethod parse_factor_method(std::string_view name) {
  if (name == "standard") return FactorMethod::standard;
  if (name == "bridge") return FactorMethod::bridge;
  if (name == "pca") return FactorMethod::pca;
  throw std::invalid_argument("unknown factorization '" + std::string(name) +
                              "' (expected standard|bridge|pca)");
}

const char* to_string(FactorMethod m) {
  switch (m) {
    case FactorMethod::standard: return "standard";
    case FactorMethod::bridge: return "bridge";
    case FactorMethod::pca: return "pca";
  }
  return "?";
}

PathFactorization::PathFactorization(const TimeGrid& grid, FactorMethod method)
    : grid_(grid), method_(method) {
  validate(grid);
  switch (method_) {
    case FactorMethod::standard: build_standard(); break;
    case FactorMethod::bridge: build_bridge(); break;
    case FactorMethod::pca: build_pca(); break;
  }
  for (double a : col1_)
    if (!(a > 0.0))
      throw std::logic_error("factorization: first column not positive");
}

void PathFactorization::build_standard() {
  // Cholesky of the min kernel in closed form: A = sqrt(dt) * lower ones.
  double s = std::sqrt(grid_.dt());
  col1_.assign(dim(), s);
}

void PathFactorization::build_bridge() {
  std::size_t d = dim();
  bridge_index_.resize(d);
  left_index_.resize(d);
  right_index_.resize(d);
  left_weight_.resize(d);
  right_weight_.resize(d);
  std_dev_.resize(d);

  auto t = [&](std::size_t i) { return grid_.time(i); };
  std::vector<std::size_t> map(d, 0);
  map[d - 1] = 1;
  bridge_index_[0] = d - 1;
  std_dev_[0] = std::sqrt(t(d - 1));
  left_weight_[0] = right_weight_[0] = 0.0;
  for (std::size_t j = 0, i = 1; i < d; ++i) {
    while (map[j]) ++j;
    std::size_t k = j;
    while (!map[k]) ++k;
    std::size_t l = j + ((k - 1 - j) >> 1);
    map[l] = i;
    bridge_index_[i] = l;
    left_index_[i] = j;
    right_index_[i] = k;
    if (j != 0) {
      left_weight_[i] = (t(k) - t(l)) / (t(k) - t(j - 1));
      right_weight_[i] = (t(l) - t(j - 1)) / (t(k) - t(j - 1));
      std_dev_[i] =
          std::sqrt((t(l) - t(j - 1)) * (t(k) - t(l)) / (t(k) - t(j - 1)));
    } else {
      left_weight_[i] = (t(k) - t(l)) / t(k);
      right_weight_[i] = t(l) / t(k);
      std_dev_[i] = std::sqrt(t(l) * (t(k) - t(l)) / t(k));
    }
    j = k + 1;
    if (j >= d) j = 0;
  }

  col1_.resize(d);
  std::vector<double> e1(d, 0.0), w(d);
  e1[0] = 1.0;
  matvec(e1.data(), w.data());
  col1_ = w;
}

void PathFactorization::build_pca() {
  // Closed-form eigensystem of the min kernel on a uniform grid:
  //   lambda_k = dt / (4 sin^2((2k-1) pi / (2(2d+1))))
  //   u_k(l)   = 2/sqrt(2d+1) sin((2k-1) l pi / (2d+1))
  std::size_t d = dim();
  double dt = grid_.dt();
  double n = static_cast<double>(2 * d + 1);
  eig_.resize(d);
  pca_scale_.resize(d);
  double unorm = 2.0 / std::sqrt(n);
  for (std::size_t k = 1; k <= d; ++k) {
    double s = std::sin((2.0 * k - 1.0) * kPi / (2.0 * n));
    eig_[k - 1] = dt / (4.0 * s * s);
    pca_scale_[k - 1] = std::sqrt(eig_[k - 1]) * unorm;
  }
  fst_ = std::make_shared<OddSineTransform>(d);
  col1_.resize(d);
  for (std::size_t l = 1; l <= d; ++l)
    col1_[l - 1] = pca_scale_[0] * std::sin(static_cast<double>(l) * kPi / n);
}

void PathFactorization::matvec(const double* x, double* w,
                               MatvecScratch& scratch) const {
  std::size_t d = dim();
  switch (method_) {
    case FactorMethod::standard: {
      double s = std::sqrt(grid_.dt()), acc = 0.0;
      for (std::size_t l = 0; l < d; ++l) {
        acc += x[l];
        w[l] = s * acc;
      }
      return;
    }
    case FactorMethod::bridge: {
      w[d - 1] = std_dev_[0] * x[0];
      for (std::size_t i = 1; i < d; ++i) {
        std::size_t j = left_index_[i], k = right_index_[i], l = bridge_index_[i];
        if (j != 0)
          w[l] = left_weight_[i] * w[j - 1] + right_weight_[i] * w[k] +
                 std_dev_[i] * x[i];
        else
          w[l] = right_weight_[i] * w[k] + std_dev_[i] * x[i];
      }
      return;
    }
    case FactorMethod::pca: {
      scratch.tmp.resize(d);
      for (std::size_t k = 0; k < d; ++k) scratch.tmp[k] = pca_scale_[k] * x[k];
      fst_->apply(scratch.tmp.data(), w, scratch.fst);
      return;
    }
  }
}

void PathFactorization::matvec(const double* x, double* w) const {
  MatvecScratch scratch;
  matvec(x, w, scratch);
}

std::vector<double> PathFactorization::matvec(const std::vector<double>& x) const {
  if (x.size() != dim())
    throw std::invalid_argument("matvec: dimension mismatch");
  std::vector<double> w(dim());
  matvec(x.data(), w.data());
  return w;
}

const std::vector<double>& PathFactorization::eigenvalues() const {
  if (method_ != FactorMethod::pca)
    throw std::logic_error("eigenvalues: only available for pca");
  return eig_;
}

const Matrix& PathFactorization::dense_factor() const {
  std::call_once(dense_once_, [this] {
    std::size_t d = dim();
    dense_ = Matrix(d, d);
    if (method_ == FactorMethod::pca) {
      double n = static_cast<double>(2 * d + 1);
      for (std::size_t l = 1; l <= d; ++l)
        for (std::size_t k = 1; k <= d; ++k)
          dense_(l - 1, k - 1) =
              pca_scale_[k - 1] *
              std::sin((2.0 * k - 1.0) * static_cast<double>(l) * kPi / n);
    } else {
      std::vector<double> e(d, 0.0), w(d);
      for (std::size_t k = 0; k < d; ++k) {
        e[k] = 1.0;
        matvec(e.data(), w.data());
        e[k] = 0.0;
        for (std::size_t l = 0; l < d; ++l) dense_(l, k) = w[l];
      }
    }
  });
  return dense_;
}

double max_factorization_residual(const PathFactorization& f) {
  const Matrix& a = f.dense_factor();
  Matrix prod = matmul_abt(a, a);
  Matrix c = build_covariance(f.grid());
  return max_abs_diff(prod, c);
}

}  // namespace preqmc
