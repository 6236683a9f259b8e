#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace preqmc {

struct GaussRule {
  std::vector<double> x, w;
  std::size_t size() const { return x.size(); }
};

// Gauss-Legendre on [-1, 1].
const GaussRule& gauss_legendre(std::size_t n);

// Gauss-Hermite for the standard normal weight exp(-x^2/2)/sqrt(2 pi);
// weights sum to 1, nodes ascending.
const GaussRule& gauss_hermite(std::size_t n);

// integral of f over [a, b] with a fixed Gauss-Legendre rule
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    std::size_t n = 64);

// Adaptive bisection built on embedded Gauss-Legendre estimates; handles
// integrands with isolated kinks. Absolute tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-10, int max_depth = 28);

// Compensated (Neumaier) accumulator for long reductions.
struct KahanSum {
  double sum = 0.0, c = 0.0;
  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

}  // namespace preqmc
