#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "preqmc/covariance.hpp"
#include "preqmc/factorization.hpp"
#include "preqmc/preintegrate.hpp"

namespace preqmc {

struct MarketParams {
  double spot = 100.0;
  double strike = 100.0;
  double rate = 0.1;
  double sigma = 0.1;
  double maturity = 1.0;

  void validate() const;
  double discount() const { return std::exp(-rate * maturity); }
};

// S_{t_l} = S0 exp((r - sigma^2/2) t_l + sigma w_l); w holds the Brownian
// path values W(t_l), not increments.
std::vector<double> asset_path(const MarketParams& p, const TimeGrid& grid,
                               const std::vector<double>& w);

// phi(x) = (S0/d) sum_l exp((r - sigma^2/2) t_l + sigma (Ax)_l) - K
double digital_asian_phi(const MarketParams& p, const PathFactorization& a,
                         const double* x);
// d phi / d x_k = (sigma S0/d) sum_l exp(...) A_{lk}
double digital_asian_dphi(const MarketParams& p, const PathFactorization& a,
                          const double* x, std::size_t k);
// k = 1 specialization through the first column (no dense factor needed)
double digital_asian_dphi1(const MarketParams& p, const PathFactorization& a,
                           const double* x);

// Randomized monotonicity guard: samples `points` uniform draws from
// [-halfwidth, halfwidth]^d and requires dphi_axis > 0 at each; throws a
// construction error naming the violating sample.
void probe_monotonicity(const JumpIntegrand& g, int points = 1000,
                        double halfwidth = 6.0,
                        std::uint64_t seed = 0x70726f6265);

// The digital Asian option as a jump integrand over the Gaussian input
// space: theta = e^{-rT} constant, preintegration along coordinate 1,
// closed-form conditional tail e^{-rT} (1 - Phi(root)). Monotonicity is
// probed at construction.
JumpIntegrand make_digital_asian(const MarketParams& p,
                                 std::shared_ptr<const PathFactorization> fact);

// phi restricted to the line x = base + t e_axis:
//   phi(t) = sum_l e_l exp(b_l t) - K
// with e_l > 0, so phi is convex in t; {phi > 0} is the complement of an
// interval and its Gaussian mass has a closed form in the (at most two)
// roots.
struct AxisSection {
  std::vector<double> e, b;
  double strike = 0.0;

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;
  // N(0,1) mass of {t : phi(t) > 0}
  double indicator_mass() const;
};

AxisSection make_axis_section(const MarketParams& p, const PathFactorization& a,
                              const double* base, std::size_t axis);

// Per-worker evaluation kernel for the option: owns all scratch, so one
// instance must not be shared across threads (the factorization behind it
// may be).
class DigitalAsianEvaluator {
 public:
  DigitalAsianEvaluator(const MarketParams& p,
                        std::shared_ptr<const PathFactorization> fact);

  std::size_t dim() const { return fact_->dim(); }
  double discount() const { return disc_; }
  const PathFactorization& factorization() const { return *fact_; }

  // e^{-rT} ind(phi(x) > 0), x in R^d
  double payoff(const double* x);

  // Conditional (preintegrated) price given the non-axis coordinates
  // y in R^{d-1}: e^{-rT} (1 - Phi(root)).
  double conditional_price(const double* y);
  double conditional_price(const double* y, RootResult& root);

 private:
  void section_at(const double* y);

  MarketParams params_;
  std::shared_ptr<const PathFactorization> fact_;
  double disc_ = 0.0;
  std::vector<double> drift_;  // (r - sigma^2/2) t_l
  std::vector<double> b_;      // sigma * A_{l1}
  std::vector<double> x_, w_, e_;
  MatvecScratch scratch_;
};

}  // namespace preqmc
