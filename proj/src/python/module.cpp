#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "preqmc/anova.hpp"
#include "preqmc/covariance.hpp"
#include "preqmc/experiment.hpp"
#include "preqmc/normal.hpp"
#include "preqmc/sobol.hpp"

namespace py = pybind11;

namespace {

preqmc::FactorMethod factor_from(const std::string& s) {
  if (s == "standard") return preqmc::FactorMethod::standard;
  if (s == "bridge") return preqmc::FactorMethod::bridge;
  if (s == "pca") return preqmc::FactorMethod::pca;
  throw std::invalid_argument("unknown factorization '" + s + "'");
}

preqmc::MarketParams market_from(double K, double S0, double r, double sigma,
                                 double T) {
  preqmc::MarketParams p;
  p.strike = K;
  p.spot = S0;
  p.rate = r;
  p.sigma = sigma;
  p.maturity = T;
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(preqmc, m) {
  m.doc() = "Preintegrated (quasi-)Monte Carlo pricing of digital Asian options";

  m.def(
      "sobol_points",
      [](std::size_t n, std::size_t dim,
         std::optional<std::uint64_t> scramble_seed) {
        preqmc::SobolSampler s(preqmc::default_direction_table(), dim,
                               scramble_seed);
        py::array_t<double> out({static_cast<py::ssize_t>(n),
                                 static_cast<py::ssize_t>(dim)});
        auto buf = out.mutable_unchecked<2>();
        std::vector<double> row(dim);
        for (std::size_t i = 0; i < n; ++i) {
          s.generate(row.data());
          for (std::size_t j = 0; j < dim; ++j)
            buf(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) =
                row[j];
        }
        return out;
      },
      py::arg("n"), py::arg("dim"), py::arg("scramble_seed") = std::nullopt,
      "Sobol' points in natural order; scramble_seed switches on the "
      "linear-affine scrambling");

  m.def("inv_normal_cdf", &preqmc::inv_normal_cdf, py::arg("u"));
  m.def("normal_cdf", &preqmc::normal_cdf, py::arg("x"));

  m.def(
      "factorization_residual",
      [](const std::string& method, std::size_t d, double maturity) {
        preqmc::PathFactorization f(preqmc::TimeGrid{maturity, d},
                                    factor_from(method));
        return preqmc::max_factorization_residual(f);
      },
      py::arg("method"), py::arg("d"), py::arg("maturity") = 1.0,
      "max |A A^T - C| entry for the chosen path factorization");

  m.def(
      "price",
      [](const std::string& method, std::size_t d, std::size_t n,
         std::uint64_t seed, double K, double S0, double r, double sigma,
         double T, const std::string& factorization) {
        preqmc::ExperimentConfig cfg;
        cfg.market = market_from(K, S0, r, sigma, T);
        cfg.d = d;
        cfg.factorization = factor_from(factorization);
        return preqmc::estimate(preqmc::parse_method(method), cfg, n, seed);
      },
      py::arg("method") = "pre-qmc", py::arg("d") = 256,
      py::arg("n") = std::size_t{1} << 16,
      py::arg("seed") = preqmc::ExperimentConfig{}.seed,
      py::arg("K") = 100.0, py::arg("S0") = 100.0, py::arg("r") = 0.1,
      py::arg("sigma") = 0.1, py::arg("T") = 1.0,
      py::arg("factorization") = "pca",
      "single estimate of the discounted digital Asian value");

  m.def(
      "analytic_digital_price",
      [](double K, double S0, double r, double sigma, double T) {
        return preqmc::analytic_digital_price(market_from(K, S0, r, sigma, T));
      },
      py::arg("K") = 100.0, py::arg("S0") = 100.0, py::arg("r") = 0.1,
      py::arg("sigma") = 0.1, py::arg("T") = 1.0,
      "closed-form d = 1 digital price");

  m.def(
      "anova_shares",
      [](std::size_t d, std::size_t nodes, double K, double S0, double r,
         double sigma, double T, const std::string& factorization) {
        const preqmc::MarketParams mp = market_from(K, S0, r, sigma, T);
        auto fact = std::make_shared<const preqmc::PathFactorization>(
            preqmc::TimeGrid{mp.maturity, d}, factor_from(factorization));
        const preqmc::AnovaDecomposition dec =
            preqmc::decompose_digital(mp, fact, nodes);
        py::dict out;
        for (std::uint32_t u = 1; u <= dec.full_mask(); ++u)
          out[py::str(preqmc::subset_name(u))] = dec.terms[u];
        out["mean"] = dec.mean;
        out["total"] = dec.total_variance;
        return out;
      },
      py::arg("d") = 2, py::arg("nodes") = 32, py::arg("K") = 100.0,
      py::arg("S0") = 100.0, py::arg("r") = 0.1, py::arg("sigma") = 0.1,
      py::arg("T") = 1.0, py::arg("factorization") = "pca",
      "per-subset variances of the digital payoff (closed routes, d <= 3)");
}
