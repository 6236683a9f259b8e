#include "preqmc/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace preqmc {

namespace {

GaussRule make_legendre(std::size_t n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  std::size_t m = (n + 1) / 2;
  for (std::size_t i = 1; i <= m; ++i) {
    double z = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) < 1e-15) break;
    }
    r.x[i - 1] = -z;
    r.x[n - i] = z;
    r.w[i - 1] = 2.0 / ((1.0 - z * z) * pp * pp);
    r.w[n - i] = r.w[i - 1];
  }
  return r;
}

GaussRule make_hermite(std::size_t n) {
  // Physicists' nodes (weight exp(-x^2)) by Newton on the recurrence, then
  // rescaled to the probabilists' normal weight.
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  std::size_t m = (n + 1) / 2;
  double z = 0.0, pp = 0.0;
  std::vector<double> zs(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * zs[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * zs[1];
    else
      z = 2.0 * z - zs[i - 2];
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) < 1e-15) break;
    }
    zs[i] = z;
    r.x[i] = -z * std::numbers::sqrt2;
    r.x[n - 1 - i] = z * std::numbers::sqrt2;
    double w = 2.0 / (pp * pp) / std::sqrt(std::numbers::pi);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return r;
}

const GaussRule& cached(std::map<std::size_t, GaussRule>& cache, std::mutex& mu,
                        std::size_t n, GaussRule (*make)(std::size_t)) {
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make(n)).first;
  return it->second;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  static std::map<std::size_t, GaussRule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, make_legendre);
}

const GaussRule& gauss_hermite(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  static std::map<std::size_t, GaussRule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, make_hermite);
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    std::size_t n) {
  const GaussRule& r = gauss_legendre(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    s += r.w[i] * f(mid + half * r.x[i]);
  return s * half;
}

namespace {

double adapt(const std::function<double(double)>& f, double a, double b,
             double whole, double tol, int depth) {
  double mid = 0.5 * (a + b);
  double left = integrate_gl(f, a, mid, 16);
  double right = integrate_gl(f, mid, b, 16);
  if (depth <= 0) return left + right;
  if (std::fabs(left + right - whole) <= tol) return left + right;
  return adapt(f, a, mid, left, 0.5 * tol, depth - 1) +
         adapt(f, mid, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol, int max_depth) {
  if (!(b > a)) return 0.0;
  return adapt(f, a, b, integrate_gl(f, a, b, 16), tol, max_depth);
}

}  // namespace preqmc
