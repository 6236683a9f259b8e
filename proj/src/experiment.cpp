#include "preqmc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "preqmc/covariance.hpp"
#include "preqmc/normal.hpp"
#include "preqmc/quadrature.hpp"
#include "preqmc/rng.hpp"
#include "preqmc/sobol.hpp"

namespace preqmc {
namespace {

// Work is split into fixed-size chunks of consecutive point indices; chunk
// partial sums are combined in index order, so the result is bit-identical
// for any worker count.
constexpr std::size_t kChunk = 4096;
constexpr std::uint64_t kCellTag = 0x43454c4c;  // per-(method,N,rep) seeds
constexpr std::uint64_t kRefTag = 0x524546;     // reference-oracle seeds
constexpr double kDegenerateRmse = 1e-12;
constexpr std::size_t kMaxReferenceN = std::size_t{1} << 26;

void run_workers(const std::function<void()>& work, std::size_t workers) {
  if (workers <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  std::mutex mu;
  std::exception_ptr err;
  auto guarded = [&]() {
    try {
      work();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!err) err = std::current_exception();
    }
  };
  pool.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(guarded);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

// Mean of the (possibly preintegrated) payoff over points [0, n) of the
// method's sampler.
double cell_mean(const ExperimentConfig& cfg,
                 std::shared_ptr<const PathFactorization> fact, Method method,
                 std::size_t n, std::uint64_t seed) {
  const bool pre = method == Method::pre_mc || method == Method::pre_qmc;
  const bool qmc = method == Method::qmc || method == Method::pre_qmc;
  if (pre && cfg.d == 1) {
    // nothing left to sample: the conditional price is the exact answer
    DigitalAsianEvaluator ev(cfg.market, fact);
    return ev.conditional_price(nullptr);
  }
  const std::size_t s = pre ? cfg.d - 1 : cfg.d;
  const DirectionTable& table =
      cfg.directions ? *cfg.directions : default_direction_table();
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(n_chunks, 0.0);
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    DigitalAsianEvaluator ev(cfg.market, fact);
    UniformStream stream = qmc
                               ? UniformStream::sobol(SobolSampler(table, s, seed))
                               : UniformStream::pseudo_random(seed);
    std::vector<double> g(s);
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) break;
      const std::size_t begin = c * kChunk;
      const std::size_t end = std::min(n, begin + kChunk);
      stream.skip_to(begin);
      Matrix pts = stream.next_points(end - begin, s);
      KahanSum acc;
      for (std::size_t i = 0; i < end - begin; ++i) {
        const double* row = pts.row(i);
        for (std::size_t j = 0; j < s; ++j) g[j] = inv_normal_cdf(row[j]);
        acc.add(pre ? ev.conditional_price(g.data()) : ev.payoff(g.data()));
      }
      partial[c] = acc.value();
    }
  };
  run_workers(work, std::min(worker_count(), n_chunks));

  KahanSum total;
  for (double p : partial) total.add(p);
  return total.value() / static_cast<double>(n);
}

// One reference scramble with an extendable, order-stable accumulator, so
// doubling the oracle size only costs the new points.
struct OracleRep {
  KahanSum acc;
  std::size_t chunks_done = 0;
};

void extend_oracle(const ExperimentConfig& cfg,
                   std::shared_ptr<const PathFactorization> fact,
                   std::vector<OracleRep>& reps, std::size_t target_n) {
  const DirectionTable& table =
      cfg.directions ? *cfg.directions : default_direction_table();
  const std::size_t target_chunks = target_n / kChunk;
  const std::size_t s = cfg.d - 1;
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    DigitalAsianEvaluator ev(cfg.market, fact);
    std::vector<double> u(s), g(s);
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= reps.size()) break;
      OracleRep& rep = reps[r];
      if (rep.chunks_done >= target_chunks) continue;
      SobolSampler sampler(table, s, split_seed(cfg.seed, kRefTag, r));
      sampler.skip_to(rep.chunks_done * kChunk);
      for (std::size_t c = rep.chunks_done; c < target_chunks; ++c) {
        KahanSum acc;
        for (std::size_t i = 0; i < kChunk; ++i) {
          sampler.generate(u.data());
          for (std::size_t j = 0; j < s; ++j) g[j] = inv_normal_cdf(u[j]);
          acc.add(ev.conditional_price(g.data()));
        }
        rep.acc.add(acc.value());
      }
      rep.chunks_done = target_chunks;
    }
  };
  run_workers(work, std::min(worker_count(), reps.size()));
}

ReferenceValue summarize_oracle(const std::vector<OracleRep>& reps,
                                std::size_t n_used) {
  std::vector<double> means;
  means.reserve(reps.size());
  for (const auto& r : reps)
    means.push_back(r.acc.value() / static_cast<double>(n_used));
  double m = 0.0;
  for (double v : means) m += v;
  m /= static_cast<double>(means.size());
  double ss = 0.0;
  for (double v : means) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(means.size() - 1));
  ReferenceValue ref;
  ref.value = m;
  ref.half_width = 3.0 * sd / std::sqrt(static_cast<double>(means.size()));
  ref.analytic = false;
  ref.n_used = n_used;
  ref.replications = reps.size();
  return ref;
}

double rel_rmse(const std::vector<double>& estimates, double reference) {
  KahanSum ss;
  for (double e : estimates) ss.add((e - reference) * (e - reference));
  return std::sqrt(ss.value() / static_cast<double>(estimates.size())) /
         std::abs(reference);
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::mc: return "mc";
    case Method::qmc: return "qmc";
    case Method::pre_mc: return "pre-mc";
    case Method::pre_qmc: return "pre-qmc";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "mc") return Method::mc;
  if (s == "qmc") return Method::qmc;
  if (s == "pre-mc") return Method::pre_mc;
  if (s == "pre-qmc") return Method::pre_qmc;
  throw std::invalid_argument("unknown method '" + s +
                              "' (expected mc, qmc, pre-mc or pre-qmc)");
}

void ExperimentConfig::validate() const {
  market.validate();
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  if (sizes.empty()) throw std::invalid_argument("no sample sizes given");
  for (std::size_t n : sizes)
    if (n == 0 || (n & (n - 1)) != 0)
      throw std::invalid_argument("sample sizes must be powers of two");
  if (replications < 2)
    throw std::invalid_argument("need at least two replications");
  if (methods.empty()) throw std::invalid_argument("no methods selected");
  if (reference_n < kChunk || (reference_n & (reference_n - 1)) != 0)
    throw std::invalid_argument(
        "reference_n must be a power of two and at least 4096");
  if (reference_replications < 2)
    throw std::invalid_argument("need at least two reference replications");
}

double analytic_digital_price(const MarketParams& p) {
  p.validate();
  const double d2 =
      (std::log(p.spot / p.strike) +
       (p.rate - 0.5 * p.sigma * p.sigma) * p.maturity) /
      (p.sigma * std::sqrt(p.maturity));
  return p.discount() * normal_cdf(d2);
}

RateFit fit_rate(const std::vector<std::pair<std::size_t, double>>& rmse) {
  std::vector<double> xs, ys;
  for (const auto& [n, v] : rmse) {
    if (!(v > 0.0)) continue;
    xs.push_back(std::log2(static_cast<double>(n)));
    ys.push_back(std::log2(v));
  }
  if (xs.size() < 2)
    throw std::invalid_argument("fit_rate: need at least two positive points");
  const std::size_t m = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("fit_rate: need at least two distinct sizes");
  RateFit fit;
  fit.slope = sxy / sxx;
  const double intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ys[i] - (intercept + fit.slope * xs[i]);
    sse += r * r;
  }
  fit.stderr_slope =
      m > 2 ? std::sqrt(sse / static_cast<double>(m - 2) / sxx) : 0.0;
  fit.valid = true;
  return fit;
}

double estimate(Method method, const ExperimentConfig& cfg, std::size_t n,
                std::uint64_t seed) {
  cfg.validate();
  if (n == 0) throw std::invalid_argument("estimate: n must be positive");
  auto fact = std::make_shared<const PathFactorization>(
      TimeGrid{cfg.market.maturity, cfg.d}, cfg.factorization);
  return cell_mean(cfg, fact, method, n, seed);
}

ReferenceValue reference_value(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.d == 1) {
    ReferenceValue ref;
    ref.value = analytic_digital_price(cfg.market);
    ref.analytic = true;
    return ref;
  }
  auto fact = std::make_shared<const PathFactorization>(
      TimeGrid{cfg.market.maturity, cfg.d}, cfg.factorization);
  std::vector<OracleRep> reps(cfg.reference_replications);
  extend_oracle(cfg, fact, reps, cfg.reference_n);
  return summarize_oracle(reps, cfg.reference_n);
}

ConvergenceReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto fact = std::make_shared<const PathFactorization>(
      TimeGrid{cfg.market.maturity, cfg.d}, cfg.factorization);

  ConvergenceReport report;
  report.config = cfg;
  report.workers = worker_count();
  report.fast_transform = fact->uses_fast_transform();

  // every (method, size, replication) cell
  std::vector<MethodResult> results(cfg.methods.size());
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    const Method method = cfg.methods[mi];
    results[mi].method = method;
    results[mi].estimates.resize(cfg.sizes.size());
    for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
      auto& cell = results[mi].estimates[si];
      cell.resize(cfg.replications);
      for (std::size_t r = 0; r < cfg.replications; ++r) {
        const std::uint64_t seed =
            split_seed(cfg.seed, kCellTag + static_cast<std::uint64_t>(method),
                       (static_cast<std::uint64_t>(si) << 32) | r);
        cell[r] = cell_mean(cfg, fact, method, cfg.sizes[si], seed);
      }
    }
  }

  // reference value; the oracle keeps doubling until its half-width is
  // negligible against the smallest error it is used to measure
  if (cfg.d == 1) {
    report.reference.value = analytic_digital_price(cfg.market);
    report.reference.analytic = true;
  } else {
    std::vector<OracleRep> oracle(cfg.reference_replications);
    std::size_t n_ref = cfg.reference_n;
    for (;;) {
      extend_oracle(cfg, fact, oracle, n_ref);
      report.reference = summarize_oracle(oracle, n_ref);
      const double v = report.reference.value;
      if (std::abs(v) < 1e-12)
        throw std::runtime_error(
            "reference value is numerically zero; relative error undefined");
      double min_rmse = std::numeric_limits<double>::infinity();
      for (const auto& mr : results)
        for (const auto& cell : mr.estimates) {
          const double rr = rel_rmse(cell, v);
          if (rr > kDegenerateRmse) min_rmse = std::min(min_rmse, rr);
        }
      if (!std::isfinite(min_rmse)) break;  // every method is exact here
      if (report.reference.half_width / std::abs(v) < min_rmse / 20.0) break;
      n_ref *= 2;
      if (n_ref > kMaxReferenceN)
        throw std::runtime_error("reference oracle failed to stabilize");
    }
  }

  const double vref = report.reference.value;
  if (std::abs(vref) < 1e-12)
    throw std::runtime_error(
        "reference value is numerically zero; relative error undefined");

  for (auto& mr : results) {
    mr.rmse_rel.resize(cfg.sizes.size());
    std::vector<std::pair<std::size_t, double>> points;
    for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
      mr.rmse_rel[si] = rel_rmse(mr.estimates[si], vref);
      if (mr.rmse_rel[si] > kDegenerateRmse)
        points.emplace_back(cfg.sizes[si], mr.rmse_rel[si]);
    }
    bool distinct = false;
    for (std::size_t i = 1; i < points.size(); ++i)
      if (points[i].first != points[0].first) distinct = true;
    if (points.size() >= 2 && distinct) mr.rate = fit_rate(points);
  }
  report.methods = std::move(results);

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("PREINT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 1;
}

void write_estimates_csv(std::ostream& os, const ConvergenceReport& rep) {
  const double vref = rep.reference.value;
  os << "method,N,replication,estimate,abs_err,rel_err\n";
  os << std::setprecision(17);
  for (const auto& mr : rep.methods)
    for (std::size_t si = 0; si < rep.config.sizes.size(); ++si)
      for (std::size_t r = 0; r < mr.estimates[si].size(); ++r) {
        const double e = mr.estimates[si][r];
        const double abs_err = std::abs(e - vref);
        os << method_name(mr.method) << ',' << rep.config.sizes[si] << ',' << r
           << ',' << e << ',' << abs_err << ',' << abs_err / std::abs(vref)
           << '\n';
      }
}

void write_rmse_csv(std::ostream& os, const ConvergenceReport& rep) {
  os << "method,N,rmse_rel\n";
  os << std::setprecision(17);
  for (const auto& mr : rep.methods)
    for (std::size_t si = 0; si < rep.config.sizes.size(); ++si)
      os << method_name(mr.method) << ',' << rep.config.sizes[si] << ','
         << mr.rmse_rel[si] << '\n';
}

void write_rates_csv(std::ostream& os, const ConvergenceReport& rep) {
  os << "method,slope,stderr\n";
  os << std::setprecision(17);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& mr : rep.methods)
    os << method_name(mr.method) << ','
       << (mr.rate.valid ? mr.rate.slope : nan) << ','
       << (mr.rate.valid ? mr.rate.stderr_slope : nan) << '\n';
}

}  // namespace preqmc
