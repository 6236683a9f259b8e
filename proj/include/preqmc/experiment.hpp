#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "preqmc/direction_numbers.hpp"
#include "preqmc/factorization.hpp"
#include "preqmc/payoff.hpp"

namespace preqmc {

enum class Method { mc, qmc, pre_mc, pre_qmc };

const char* method_name(Method m);          // "mc", "qmc", "pre-mc", "pre-qmc"
Method parse_method(const std::string& s);  // inverse; throws on unknown names

struct ExperimentConfig {
  MarketParams market;
  std::size_t d = 256;
  FactorMethod factorization = FactorMethod::pca;
  std::vector<std::size_t> sizes = {std::size_t{1} << 12, std::size_t{1} << 14,
                                    std::size_t{1} << 16};
  std::size_t replications = 10;
  std::uint64_t seed = 5;
  std::vector<Method> methods = {Method::mc, Method::qmc, Method::pre_mc,
                                 Method::pre_qmc};
  // Oracle run for the reference value (ignored at d = 1, where the price
  // is analytic). reference_n doubles until the oracle half-width is small
  // against the errors being measured.
  std::size_t reference_n = std::size_t{1} << 20;
  std::size_t reference_replications = 16;
  // Direction numbers for the Sobol' streams; null means the built-in table.
  // Not owned: the caller keeps it alive.
  const DirectionTable* directions = nullptr;

  void validate() const;
};

struct ReferenceValue {
  double value = 0.0;
  double half_width = 0.0;  // 3x standard error across scrambles (0 if analytic)
  bool analytic = false;
  std::size_t n_used = 0;
  std::size_t replications = 0;
};

// d = 1 digital price in closed form; valid for any market parameters.
double analytic_digital_price(const MarketParams& p);

struct RateFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  bool valid = false;
};

// Ordinary least squares of log2(RMSE) on log2(N). Throws unless there are
// at least two points with distinct N and positive value.
RateFit fit_rate(const std::vector<std::pair<std::size_t, double>>& rmse);

struct MethodResult {
  Method method = Method::mc;
  std::vector<std::vector<double>> estimates;  // [size index][replication]
  std::vector<double> rmse_rel;                // per size index
  RateFit rate;  // invalid when the method is exact (zero RMSE)
};

struct ConvergenceReport {
  ExperimentConfig config;
  ReferenceValue reference;
  std::vector<MethodResult> methods;  // same order as config.methods
  double wall_seconds = 0.0;
  std::size_t workers = 1;
  bool fast_transform = false;
};

// Single estimate: mean of the payoff over n sampler points (plain methods,
// points in R^d) or of the conditional price (preintegrated methods, points
// in R^{d-1}). `seed` picks the pseudo-random stream or the Sobol' scramble.
double estimate(Method method, const ExperimentConfig& cfg, std::size_t n,
                std::uint64_t seed);

// Reference value alone (analytic at d = 1, oracle run otherwise, without
// the error-driven doubling rule, which needs the measured RMSEs).
ReferenceValue reference_value(const ExperimentConfig& cfg);

// Full experiment: all (method, size, replication) cells, reference value
// with the doubling rule, relative RMSEs, and rate fits. Deterministic for
// a fixed config, independent of the worker count.
ConvergenceReport run_experiment(const ExperimentConfig& cfg);

// Worker cap: PREINT_THREADS when set and positive, else the hardware
// concurrency (at least 1).
std::size_t worker_count();

void write_estimates_csv(std::ostream& os, const ConvergenceReport& rep);
void write_rmse_csv(std::ostream& os, const ConvergenceReport& rep);
void write_rates_csv(std::ostream& os, const ConvergenceReport& rep);

}  // namespace preqmc
