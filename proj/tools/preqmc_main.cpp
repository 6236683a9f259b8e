#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "preqmc/anova.hpp"
#include "preqmc/checks.hpp"
#include "preqmc/covariance.hpp"
#include "preqmc/experiment.hpp"

namespace {

struct CommonOpts {
  std::size_t d = 256;
  std::vector<std::size_t> sizes;
  std::size_t reps = 10;
  std::uint64_t seed = preqmc::ExperimentConfig{}.seed;
  std::string method = "pre-qmc";
  std::string factorization = "pca";
  double strike = 100.0, spot = 100.0, rate = 0.1, sigma = 0.1, maturity = 1.0;
  std::string dirnums;
  std::string out;
};

void add_market_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--K", o.strike, "strike");
  cmd->add_option("--S0", o.spot, "initial asset price");
  cmd->add_option("--r", o.rate, "risk-free rate");
  cmd->add_option("--sigma", o.sigma, "volatility");
  cmd->add_option("--T", o.maturity, "maturity");
}

void add_sampling_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--N", o.sizes, "sample size, repeatable (default 2^12, 2^14, 2^16)");
  cmd->add_option("--reps", o.reps, "replications per (method, N)");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--factorization", o.factorization, "path factorization")
      ->check(CLI::IsMember({"standard", "bridge", "pca"}));
  cmd->add_option("--dirnums", o.dirnums, "direction-numbers file (Joe-Kuo format)");
}

preqmc::FactorMethod parse_factorization(const std::string& s) {
  if (s == "standard") return preqmc::FactorMethod::standard;
  if (s == "bridge") return preqmc::FactorMethod::bridge;
  return preqmc::FactorMethod::pca;
}

preqmc::ExperimentConfig make_config(const CommonOpts& o,
                                     const preqmc::DirectionTable* table) {
  preqmc::ExperimentConfig cfg;
  cfg.market.strike = o.strike;
  cfg.market.spot = o.spot;
  cfg.market.rate = o.rate;
  cfg.market.sigma = o.sigma;
  cfg.market.maturity = o.maturity;
  cfg.d = o.d;
  cfg.factorization = parse_factorization(o.factorization);
  if (!o.sizes.empty()) cfg.sizes = o.sizes;
  cfg.replications = o.reps;
  cfg.seed = o.seed;
  cfg.directions = table;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital Asian option pricing by preintegrated (quasi-)Monte Carlo"};
  app.require_subcommand(1);
  CommonOpts o;

  auto* price = app.add_subcommand("price", "single estimate of the option value");
  price->add_option("--d", o.d, "number of monitoring dates");
  add_sampling_options(price, o);
  add_market_options(price, o);
  price->add_option("--method", o.method, "estimator")
      ->check(CLI::IsMember({"mc", "qmc", "pre-mc", "pre-qmc"}));

  std::size_t ref_n = 0, ref_reps = 0;
  auto* converge = app.add_subcommand(
      "converge", "four-method convergence experiment, written as CSV");
  converge->add_option("--d", o.d, "number of monitoring dates");
  add_sampling_options(converge, o);
  add_market_options(converge, o);
  converge->add_option("--ref-n", ref_n,
                       "starting oracle sample size (default 2^20)");
  converge->add_option("--ref-reps", ref_reps,
                       "oracle scrambles (default 16)");
  converge->add_option("--out", o.out, "output directory for the CSV files");

  std::size_t anova_d = 3;
  std::size_t anova_nodes = 64;
  auto* anova = app.add_subcommand(
      "anova", "variance decomposition of the digital payoff");
  anova->add_option("--d", anova_d, "dimension (closed-route limit is 3)");
  anova->add_option("--nodes", anova_nodes, "quadrature nodes per coordinate");
  anova->add_option("--seed", o.seed, "unused; accepted for symmetry");
  anova->add_option("--factorization", o.factorization, "path factorization")
      ->check(CLI::IsMember({"standard", "bridge", "pca"}));
  add_market_options(anova, o);
  anova->add_option("--out", o.out, "output directory for anova.csv");

  auto* check = app.add_subcommand("check", "invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    preqmc::DirectionTable loaded;
    const preqmc::DirectionTable* table = nullptr;
    if (!o.dirnums.empty()) {
      loaded = preqmc::load_direction_numbers(o.dirnums);
      table = &loaded;
    }

    if (price->parsed()) {
      preqmc::ExperimentConfig cfg = make_config(o, table);
      const std::size_t n = cfg.sizes.back();
      const preqmc::Method m = preqmc::parse_method(o.method);
      const double v = preqmc::estimate(m, cfg, n, cfg.seed);
      std::cout << "method " << preqmc::method_name(m) << ", d " << cfg.d
                << ", N " << n << "\nestimate " << std::setprecision(12) << v
                << '\n';
      return 0;
    }

    if (converge->parsed()) {
      preqmc::ExperimentConfig cfg = make_config(o, table);
      if (ref_n) cfg.reference_n = ref_n;
      if (ref_reps) cfg.reference_replications = ref_reps;
      const preqmc::ConvergenceReport rep = preqmc::run_experiment(cfg);
      const std::filesystem::path dir = o.out.empty() ? "." : o.out;
      std::filesystem::create_directories(dir);
      {
        std::ofstream f(dir / "estimates.csv");
        preqmc::write_estimates_csv(f, rep);
      }
      {
        std::ofstream f(dir / "rmse.csv");
        preqmc::write_rmse_csv(f, rep);
      }
      {
        std::ofstream f(dir / "rates.csv");
        preqmc::write_rates_csv(f, rep);
      }
      std::cout << std::setprecision(10) << "reference "
                << rep.reference.value;
      if (rep.reference.analytic)
        std::cout << " (analytic)";
      else
        std::cout << " +- " << rep.reference.half_width << " (N="
                  << rep.reference.n_used << ", "
                  << rep.reference.replications << " scrambles)";
      std::cout << "\n";
      for (const auto& mr : rep.methods) {
        std::cout << preqmc::method_name(mr.method) << ": rmse";
        for (double r : mr.rmse_rel) std::cout << ' ' << std::setprecision(4) << r;
        if (mr.rate.valid)
          std::cout << ", slope " << mr.rate.slope << " +- "
                    << mr.rate.stderr_slope;
        std::cout << '\n';
      }
      std::cout << "wall " << std::setprecision(4) << rep.wall_seconds
                << "s, workers " << rep.workers << ", csv in " << dir.string()
                << '\n';
      return 0;
    }

    if (anova->parsed()) {
      preqmc::MarketParams mp;
      mp.strike = o.strike;
      mp.spot = o.spot;
      mp.rate = o.rate;
      mp.sigma = o.sigma;
      mp.maturity = o.maturity;
      auto fact = std::make_shared<const preqmc::PathFactorization>(
          preqmc::TimeGrid{mp.maturity, anova_d},
          parse_factorization(o.factorization));
      const preqmc::AnovaDecomposition dec =
          preqmc::decompose_digital(mp, fact, anova_nodes);
      const preqmc::VarianceReport vr = preqmc::variance_report(dec);
      std::cout << std::setprecision(10) << "mean " << dec.mean
                << "\ntotal variance " << dec.total_variance
                << "\nindependent-route total " << vr.independent_total
                << "\nsum of term variances " << vr.variance_sum << '\n';
      for (std::size_t a = 0; a < dec.dimension; ++a)
        std::cout << "sigma^2 after integrating coordinate " << a + 1 << ": "
                  << vr.projected[a] << " (identity rhs "
                  << vr.projected_identity[a] << ")\n";
      std::cout << '\n';
      preqmc::write_variance_csv(std::cout, dec);
      if (!o.out.empty()) {
        std::filesystem::create_directories(o.out);
        std::ofstream f(std::filesystem::path(o.out) / "anova.csv");
        preqmc::write_variance_csv(f, dec);
      }
      return 0;
    }

    if (check->parsed()) {
      const int failures =
          preqmc::print_check_lines(std::cout, preqmc::run_invariant_checks());
      return failures == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
