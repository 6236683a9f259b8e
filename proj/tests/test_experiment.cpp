#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "preqmc/experiment.hpp"

using namespace preqmc;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.d = 4;
  cfg.sizes = {256, 1024};
  cfg.replications = 3;
  cfg.reference_n = 4096;
  cfg.reference_replications = 4;
  cfg.seed = 99;
  return cfg;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("method names round trip") {
  for (Method m : {Method::mc, Method::qmc, Method::pre_mc, Method::pre_qmc})
    CHECK(parse_method(method_name(m)) == m);
  CHECK(std::string(method_name(Method::pre_qmc)) == "pre-qmc");
  CHECK_THROWS_AS((void)parse_method("smc"), std::invalid_argument);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.sizes = {100};  // not a power of two
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.replications = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.reference_n = 2048;  // below the chunk size
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = small_config();
  cfg.d = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("analytic one-dimensional price") {
  MarketParams p;
  CHECK(analytic_digital_price(p) ==
        doctest::Approx(0.7500594343677599).epsilon(1e-14));
  MarketParams deep = p;
  deep.strike = 50.0;  // far in the money
  CHECK(analytic_digital_price(deep) > 0.9 * p.discount());
  MarketParams out = p;
  out.strike = 200.0;
  CHECK(analytic_digital_price(out) < 0.01);
  CHECK(analytic_digital_price(out) >= 0.0);
}

TEST_CASE("rate fits recover exact power laws") {
  // rmse = c * N^{-1}: slope -1
  RateFit r = fit_rate({{1024, 1e-3}, {4096, 2.5e-4}, {16384, 6.25e-5}});
  CHECK(r.valid);
  CHECK(r.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r.stderr_slope <= 1e-12);

  r = fit_rate({{1024, 2e-2}, {16384, 5e-3}});  // exact -1/2 from two points
  CHECK(r.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(r.stderr_slope == 0.0);  // saturated fit

  // flat data
  r = fit_rate({{1024, 1e-3}, {4096, 1e-3}, {16384, 1e-3}});
  CHECK(r.slope == doctest::Approx(0.0).epsilon(1e-12));

  // hand-computed least squares for a non-collinear triple:
  // points (10, -10), (12, -11), (14, -13) in log2 space -> slope -3/4
  r = fit_rate({{1024, std::exp2(-10.0)},
                {4096, std::exp2(-11.0)},
                {16384, std::exp2(-13.0)}});
  CHECK(r.slope == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(r.stderr_slope > 0.0);
}

TEST_CASE("rate fit rejects degenerate inputs") {
  CHECK_THROWS_AS((void)fit_rate({{1024, 1e-3}}), std::invalid_argument);
  CHECK_THROWS_AS((void)fit_rate({{1024, 1e-3}, {1024, 2e-3}}),
                  std::invalid_argument);
  // zero values are filtered out before fitting
  CHECK_THROWS_AS((void)fit_rate({{1024, 0.0}, {4096, 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)fit_rate({{1024, 1e-3}, {4096, 0.0}}),
                  std::invalid_argument);
}

TEST_CASE("single estimates are discounted probabilities") {
  ExperimentConfig cfg = small_config();
  for (Method m : cfg.methods) {
    double v = estimate(m, cfg, 512, 7);
    INFO(method_name(m));
    CHECK(v >= 0.0);
    CHECK(v <= cfg.market.discount());
  }
}

TEST_CASE("preintegrated estimates at one dimension are exact") {
  ExperimentConfig cfg = small_config();
  cfg.d = 1;
  double want = analytic_digital_price(cfg.market);
  for (Method m : {Method::pre_mc, Method::pre_qmc})
    for (std::size_t n : {64, 256})
      for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        INFO(method_name(m), " n=", n, " seed=", seed);
        CHECK(estimate(m, cfg, n, seed) ==
              doctest::Approx(want).epsilon(1e-9));
      }
}

TEST_CASE("reference value switches between analytic and oracle") {
  ExperimentConfig cfg = small_config();
  cfg.d = 1;
  ReferenceValue rv = reference_value(cfg);
  CHECK(rv.analytic);
  CHECK(rv.half_width == 0.0);
  CHECK(rv.value == doctest::Approx(analytic_digital_price(cfg.market)));

  cfg = small_config();
  rv = reference_value(cfg);
  CHECK(!rv.analytic);
  CHECK(rv.half_width > 0.0);
  CHECK(rv.n_used == cfg.reference_n);
  CHECK(rv.replications == cfg.reference_replications);
  // oracle should sit near a long preintegrated qmc run
  double probe = estimate(Method::pre_qmc, cfg, 1 << 14, 4242);
  CHECK(rv.value == doctest::Approx(probe).epsilon(5e-3));
}

TEST_CASE("experiment runs are deterministic and worker-independent") {
  ExperimentConfig cfg = small_config();
  ConvergenceReport a = run_experiment(cfg);
  ConvergenceReport b = run_experiment(cfg);

  const char* saved = std::getenv("PREINT_THREADS");
  std::string saved_copy = saved ? saved : "";
  setenv("PREINT_THREADS", "3", 1);
  ConvergenceReport c = run_experiment(cfg);
  if (saved)
    setenv("PREINT_THREADS", saved_copy.c_str(), 1);
  else
    unsetenv("PREINT_THREADS");
  CHECK(c.workers == 3);

  REQUIRE(a.methods.size() == b.methods.size());
  REQUIRE(a.methods.size() == c.methods.size());
  CHECK(a.reference.value == b.reference.value);
  CHECK(a.reference.value == c.reference.value);
  for (std::size_t mi = 0; mi < a.methods.size(); ++mi)
    for (std::size_t si = 0; si < cfg.sizes.size(); ++si)
      for (std::size_t r = 0; r < cfg.replications; ++r) {
        INFO("method ", mi, " size ", si, " rep ", r);
        // bitwise equality, not approximate
        REQUIRE(a.methods[mi].estimates[si][r] == b.methods[mi].estimates[si][r]);
        REQUIRE(a.methods[mi].estimates[si][r] == c.methods[mi].estimates[si][r]);
      }
}

TEST_CASE("small experiment already shows the variance ordering") {
  ExperimentConfig cfg = small_config();
  ConvergenceReport rep = run_experiment(cfg);
  REQUIRE(rep.methods.size() == 4);
  CHECK(rep.fast_transform);  // pca factorization
  CHECK(rep.wall_seconds > 0.0);

  auto rmse_of = [&](Method m, std::size_t si) {
    for (const auto& mr : rep.methods)
      if (mr.method == m) return mr.rmse_rel[si];
    FAIL("method missing");
    return 0.0;
  };
  // at the largest size the preintegrated streams beat the plain ones
  std::size_t last = cfg.sizes.size() - 1;
  CHECK(rmse_of(Method::pre_qmc, last) < rmse_of(Method::qmc, last));
  CHECK(rmse_of(Method::pre_mc, last) < rmse_of(Method::mc, last));
  for (const auto& mr : rep.methods) {
    INFO(method_name(mr.method));
    CHECK(mr.rate.valid);
    CHECK(mr.rate.slope < 0.0);
  }
}

TEST_CASE("csv writers follow the documented schemas") {
  ExperimentConfig cfg = small_config();
  ConvergenceReport rep = run_experiment(cfg);

  std::ostringstream est;
  write_estimates_csv(est, rep);
  std::string text = est.str();
  CHECK(text.rfind("method,N,replication,estimate,abs_err,rel_err\n", 0) == 0);
  CHECK(count_lines(text) ==
        1 + cfg.methods.size() * cfg.sizes.size() * cfg.replications);
  CHECK(text.find("pre-qmc,1024,") != std::string::npos);

  std::ostringstream rmse;
  write_rmse_csv(rmse, rep);
  CHECK(rmse.str().rfind("method,N,rmse_rel\n", 0) == 0);
  CHECK(count_lines(rmse.str()) == 1 + cfg.methods.size() * cfg.sizes.size());

  std::ostringstream rates;
  write_rates_csv(rates, rep);
  CHECK(rates.str().rfind("method,slope,stderr\n", 0) == 0);
  CHECK(count_lines(rates.str()) == 1 + cfg.methods.size());
}

TEST_CASE("worker count honors the environment override") {
  const char* saved = std::getenv("PREINT_THREADS");
  std::string saved_copy = saved ? saved : "";

  setenv("PREINT_THREADS", "5", 1);
  CHECK(worker_count() == 5);
  setenv("PREINT_THREADS", "0", 1);  // invalid -> hardware fallback
  CHECK(worker_count() >= 1);
  setenv("PREINT_THREADS", "junk", 1);
  CHECK(worker_count() >= 1);

  if (saved)
    setenv("PREINT_THREADS", saved_copy.c_str(), 1);
  else
    unsetenv("PREINT_THREADS");
}
