#include "preqmc/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "preqmc/normal.hpp"
#include "preqmc/quadrature.hpp"
#include "preqmc/rng.hpp"

namespace preqmc {

namespace {

constexpr double kCap = 40.0;

// Safeguarded Newton on [lo, hi] where f(lo) and f(hi) have opposite signs:
// steps leaving the bracket fall back to bisection.
template <class F, class DF>
double refine_root(F f, DF df, double lo, double hi, double flo, double x0,
                   double tol, int* iterations = nullptr,
                   double* residual = nullptr) {
  double x = x0, fx = f(x0);
  int it = 0;
  for (; it < 60; ++it) {
    if (std::fabs(fx) <= tol) break;
    if ((fx > 0.0) == (flo > 0.0))
      lo = x;
    else
      hi = x;
    double dfx = df(x);
    double next = (dfx != 0.0) ? x - fx / dfx : lo;
    if (!(next > std::min(lo, hi)) || !(next < std::max(lo, hi)))
      next = 0.5 * (lo + hi);
    x = next;
    fx = f(x);
  }
  if (std::fabs(fx) > tol)
    throw std::runtime_error("digital asian root refinement stalled (residual " +
                             std::to_string(fx) + ")");
  if (iterations) *iterations = it;
  if (residual) *residual = std::fabs(fx);
  return x;
}

double exp_sum_value(const std::vector<double>& e, const std::vector<double>& b,
                     double strike, double t) {
  KahanSum s;
  for (std::size_t l = 0; l < e.size(); ++l) s.add(e[l] * std::exp(b[l] * t));
  return s.value() - strike;
}

double exp_sum_derivative(const std::vector<double>& e,
                          const std::vector<double>& b, double t) {
  KahanSum s;
  for (std::size_t l = 0; l < e.size(); ++l)
    s.add(e[l] * b[l] * std::exp(b[l] * t));
  return s.value();
}

double exp_sum_second(const std::vector<double>& e, const std::vector<double>& b,
                      double t) {
  KahanSum s;
  for (std::size_t l = 0; l < e.size(); ++l)
    s.add(e[l] * b[l] * b[l] * std::exp(b[l] * t));
  return s.value();
}

}  // namespace

void MarketParams::validate() const {
  if (!(spot > 0.0) || !(strike > 0.0) || !(sigma > 0.0) || !(maturity > 0.0))
    throw std::invalid_argument(
        "market parameters: spot, strike, sigma, maturity must be positive");
}

std::vector<double> asset_path(const MarketParams& p, const TimeGrid& grid,
                               const std::vector<double>& w) {
  p.validate();
  if (w.size() != grid.steps)
    throw std::invalid_argument("asset_path: w must have one value per step");
  std::vector<double> s(grid.steps);
  double mu = p.rate - 0.5 * p.sigma * p.sigma;
  for (std::size_t l = 0; l < grid.steps; ++l)
    s[l] = p.spot * std::exp(mu * grid.time(l) + p.sigma * w[l]);
  return s;
}

double digital_asian_phi(const MarketParams& p, const PathFactorization& a,
                         const double* x) {
  std::size_t d = a.dim();
  std::vector<double> w(d);
  a.matvec(x, w.data());
  double mu = p.rate - 0.5 * p.sigma * p.sigma;
  KahanSum s;
  for (std::size_t l = 0; l < d; ++l)
    s.add(std::exp(mu * a.grid().time(l) + p.sigma * w[l]));
  return p.spot / static_cast<double>(d) * s.value() - p.strike;
}

double digital_asian_dphi(const MarketParams& p, const PathFactorization& a,
                          const double* x, std::size_t k) {
  std::size_t d = a.dim();
  if (k >= d) throw std::invalid_argument("digital_asian_dphi: bad coordinate");
  std::vector<double> w(d);
  a.matvec(x, w.data());
  const Matrix& dense = a.dense_factor();
  double mu = p.rate - 0.5 * p.sigma * p.sigma;
  KahanSum s;
  for (std::size_t l = 0; l < d; ++l)
    s.add(std::exp(mu * a.grid().time(l) + p.sigma * w[l]) * dense(l, k));
  return p.sigma * p.spot / static_cast<double>(d) * s.value();
}

double digital_asian_dphi1(const MarketParams& p, const PathFactorization& a,
                           const double* x) {
  std::size_t d = a.dim();
  std::vector<double> w(d);
  a.matvec(x, w.data());
  const std::vector<double>& col1 = a.column_one();
  double mu = p.rate - 0.5 * p.sigma * p.sigma;
  KahanSum s;
  for (std::size_t l = 0; l < d; ++l)
    s.add(std::exp(mu * a.grid().time(l) + p.sigma * w[l]) * col1[l]);
  return p.sigma * p.spot / static_cast<double>(d) * s.value();
}

void probe_monotonicity(const JumpIntegrand& g, int points, double halfwidth,
                        std::uint64_t seed) {
  CounterRng rng(seed, 0);
  std::vector<double> x(g.dim);
  for (int i = 0; i < points; ++i) {
    for (std::size_t j = 0; j < g.dim; ++j)
      x[j] = (2.0 * rng.next_u01() - 1.0) * halfwidth;
    double slope = g.dphi_axis(x.data());
    if (!(slope > 0.0)) {
      std::ostringstream msg;
      msg << "monotonicity probe failed at sample " << i << ": dphi_axis = "
          << slope << " at x = (";
      for (std::size_t j = 0; j < std::min<std::size_t>(g.dim, 4); ++j)
        msg << (j ? ", " : "") << x[j];
      if (g.dim > 4) msg << ", ...";
      msg << ")";
      throw std::runtime_error(msg.str());
    }
    if (i < 16) {
      double at0 = 0.0, athigh = 0.0;
      double save = x[g.axis];
      x[g.axis] = 0.0;
      at0 = g.phi(x.data());
      x[g.axis] = 12.0;
      athigh = g.phi(x.data());
      x[g.axis] = save;
      if (!(athigh > at0))
        throw std::runtime_error(
            "monotonicity probe: phi fails to grow along the axis");
    }
  }
}

JumpIntegrand make_digital_asian(const MarketParams& p,
                                 std::shared_ptr<const PathFactorization> fact) {
  p.validate();
  if (!fact) throw std::invalid_argument("make_digital_asian: null factorization");
  JumpIntegrand g;
  g.dim = fact->dim();
  g.axis = 0;
  g.scale = p.strike;
  double disc = p.discount();
  g.theta_value = disc;
  g.phi = [p, fact](const double* x) { return digital_asian_phi(p, *fact, x); };
  g.dphi_axis = [p, fact](const double* x) {
    return digital_asian_dphi1(p, *fact, x);
  };
  g.dphi = [p, fact](const double* x, std::size_t k) {
    return digital_asian_dphi(p, *fact, x, k);
  };
  g.closed_form_tail = [disc](double xi, const double*) {
    return disc * (std::isinf(xi) ? 1.0 : 1.0 - normal_cdf(xi));
  };
  probe_monotonicity(g);
  return g;
}

double AxisSection::value(double t) const {
  return exp_sum_value(e, b, strike, t);
}

double AxisSection::derivative(double t) const {
  return exp_sum_derivative(e, b, t);
}

double AxisSection::second_derivative(double t) const {
  return exp_sum_second(e, b, t);
}

double AxisSection::indicator_mass() const {
  double tol = 1e-13 * (1.0 + strike);
  auto f = [this](double t) { return value(t); };
  auto df = [this](double t) { return derivative(t); };

  double dlo = derivative(-kCap), dhi = derivative(kCap);
  if (dlo >= 0.0) {  // nondecreasing over the whole window
    double flo = f(-kCap);
    if (flo >= 0.0) return 1.0;
    double fhi = f(kCap);
    if (fhi <= 0.0) return 0.0;
    double r = refine_root(f, df, -kCap, kCap, flo, 0.0, tol);
    return 1.0 - normal_cdf(r);
  }
  if (dhi <= 0.0) {  // nonincreasing
    double fhi = f(kCap);
    if (fhi >= 0.0) return 1.0;
    double flo = f(-kCap);
    if (flo <= 0.0) return 0.0;
    double r = refine_root(f, df, -kCap, kCap, flo, 0.0, tol);
    return normal_cdf(r);
  }
  // interior minimum: derivative is increasing and changes sign
  auto d2 = [this](double t) { return second_derivative(t); };
  double tmin = refine_root(df, d2, -kCap, kCap, dlo, 0.0,
                            1e-13 * (1.0 + std::fabs(dlo) + std::fabs(dhi)));
  double fmin = f(tmin);
  if (fmin >= 0.0) return 1.0;
  double left, right;
  double flo = f(-kCap), fhi = f(kCap);
  if (flo <= 0.0)
    left = -std::numeric_limits<double>::infinity();
  else
    left = refine_root(f, df, -kCap, tmin, flo, 0.5 * (-kCap + tmin), tol);
  if (fhi <= 0.0)
    right = std::numeric_limits<double>::infinity();
  else
    right = refine_root(f, df, tmin, kCap, fmin, 0.5 * (tmin + kCap), tol);
  double lower = std::isinf(left) ? 0.0 : normal_cdf(left);
  double upper = std::isinf(right) ? 1.0 : normal_cdf(right);
  return 1.0 - (upper - lower);
}

AxisSection make_axis_section(const MarketParams& p, const PathFactorization& a,
                              const double* base, std::size_t axis) {
  p.validate();
  std::size_t d = a.dim();
  if (axis >= d) throw std::invalid_argument("make_axis_section: bad axis");
  std::vector<double> x(base, base + d), w(d);
  x[axis] = 0.0;
  a.matvec(x.data(), w.data());
  const Matrix& dense = a.dense_factor();
  AxisSection s;
  s.strike = p.strike;
  s.e.resize(d);
  s.b.resize(d);
  double mu = p.rate - 0.5 * p.sigma * p.sigma;
  double scale = p.spot / static_cast<double>(d);
  for (std::size_t l = 0; l < d; ++l) {
    s.e[l] = scale * std::exp(mu * a.grid().time(l) + p.sigma * w[l]);
    s.b[l] = p.sigma * dense(l, axis);
  }
  return s;
}

DigitalAsianEvaluator::DigitalAsianEvaluator(
    const MarketParams& p, std::shared_ptr<const PathFactorization> fact)
    : params_(p), fact_(std::move(fact)) {
  params_.validate();
  if (!fact_)
    throw std::invalid_argument("DigitalAsianEvaluator: null factorization");
  disc_ = params_.discount();
  std::size_t d = fact_->dim();
  drift_.resize(d);
  double mu = params_.rate - 0.5 * params_.sigma * params_.sigma;
  for (std::size_t l = 0; l < d; ++l) drift_[l] = mu * fact_->grid().time(l);
  b_.resize(d);
  const std::vector<double>& col1 = fact_->column_one();
  for (std::size_t l = 0; l < d; ++l) b_[l] = params_.sigma * col1[l];
  x_.resize(d);
  w_.resize(d);
  e_.resize(d);
}

double DigitalAsianEvaluator::payoff(const double* x) {
  std::size_t d = fact_->dim();
  fact_->matvec(x, w_.data(), scratch_);
  KahanSum s;
  for (std::size_t l = 0; l < d; ++l)
    s.add(std::exp(drift_[l] + params_.sigma * w_[l]));
  double phi = params_.spot / static_cast<double>(d) * s.value() - params_.strike;
  return phi > 0.0 ? disc_ : 0.0;
}

void DigitalAsianEvaluator::section_at(const double* y) {
  std::size_t d = fact_->dim();
  x_[0] = 0.0;
  for (std::size_t i = 1; i < d; ++i) x_[i] = y[i - 1];
  fact_->matvec(x_.data(), w_.data(), scratch_);
  double scale = params_.spot / static_cast<double>(d);
  for (std::size_t l = 0; l < d; ++l)
    e_[l] = scale * std::exp(drift_[l] + params_.sigma * w_[l]);
}

double DigitalAsianEvaluator::conditional_price(const double* y) {
  RootResult root;
  return conditional_price(y, root);
}

double DigitalAsianEvaluator::conditional_price(const double* y,
                                                RootResult& root) {
  section_at(y);
  double tol = 1e-13 * (1.0 + params_.strike);
  auto f = [this](double t) { return exp_sum_value(e_, b_, params_.strike, t); };
  auto df = [this](double t) { return exp_sum_derivative(e_, b_, t); };

  double f0 = f(0.0);
  double lo, hi, flo;
  if (f0 > 0.0) {
    hi = 0.0;
    lo = -1.0;
    while (true) {
      flo = f(lo);
      if (flo <= 0.0) break;
      if (lo <= -kCap) {
        root = {RootStatus::all_positive, 0.0, flo, 0};
        return disc_;
      }
      lo = std::max(2.0 * lo, -kCap);
    }
  } else if (f0 < 0.0) {
    lo = 0.0;
    flo = f0;
    hi = 1.0;
    while (true) {
      double fhi = f(hi);
      if (fhi >= 0.0) break;
      if (hi >= kCap)
        throw std::runtime_error(
            "conditional price: phi never becomes positive along the axis");
      hi = std::min(2.0 * hi, kCap);
    }
  } else {
    root = {RootStatus::interior, 0.0, 0.0, 0};
    return disc_ * (1.0 - normal_cdf(0.0));
  }

  int iters = 0;
  double resid = 0.0;
  double start = (lo <= 0.0 && 0.0 <= hi) ? 0.0 : 0.5 * (lo + hi);
  double xi = refine_root(f, df, lo, hi, f0 > 0.0 ? flo : f0, start, tol,
                          &iters, &resid);
  root = {RootStatus::interior, xi, resid, iters};
  return disc_ * (1.0 - normal_cdf(xi));
}

}  // namespace preqmc
