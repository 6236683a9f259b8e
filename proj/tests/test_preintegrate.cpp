#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "preqmc/normal.hpp"
#include "preqmc/payoff.hpp"
#include "preqmc/preintegrate.hpp"
#include "preqmc/rng.hpp"

using namespace preqmc;

namespace {

JumpIntegrand linear_integrand(std::vector<double> coef, double shift) {
  // phi(x) = sum coef_k x_k + shift, axis 0 (coef[0] > 0)
  JumpIntegrand g;
  g.dim = coef.size();
  g.axis = 0;
  auto c = std::make_shared<std::vector<double>>(std::move(coef));
  g.phi = [c, shift](const double* x) {
    double s = shift;
    for (std::size_t k = 0; k < c->size(); ++k) s += (*c)[k] * x[k];
    return s;
  };
  g.dphi_axis = [c](const double*) { return (*c)[0]; };
  g.dphi = [c](const double*, std::size_t k) { return (*c)[k]; };
  return g;
}

std::shared_ptr<const PathFactorization> make_fact(std::size_t d) {
  return std::make_shared<const PathFactorization>(TimeGrid{1.0, d},
                                                   FactorMethod::pca);
}

}  // namespace

TEST_CASE("root finder on linear and stiff monotone sections") {
  JumpIntegrand lin = linear_integrand({1.0}, -0.3);
  RootResult r = find_root(lin, {});
  CHECK(r.status == RootStatus::interior);
  CHECK(r.root == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(r.iterations <= 20);

  JumpIntegrand cubic;
  cubic.dim = 1;
  cubic.axis = 0;
  cubic.phi = [](const double* x) { return x[0] * x[0] * x[0] + x[0] - 2.0; };
  cubic.dphi_axis = [](const double* x) { return 3.0 * x[0] * x[0] + 1.0; };
  r = find_root(cubic, {});
  CHECK(r.root == doctest::Approx(1.0).epsilon(1e-12));

  // positive everywhere inside the search box
  JumpIntegrand pos;
  pos.dim = 1;
  pos.axis = 0;
  pos.phi = [](const double* x) { return std::exp(x[0]) + 1.0; };
  pos.dphi_axis = [](const double* x) { return std::exp(x[0]); };
  CHECK(find_root(pos, {}).status == RootStatus::all_positive);
  JumpIntegrand far = linear_integrand({1.0}, 100.0);  // root at -100
  CHECK(find_root(far, {}).status == RootStatus::all_positive);
}

TEST_CASE("preintegration of indicator tails") {
  JumpIntegrand g = linear_integrand({1.0}, 0.0);
  CHECK(preintegrate(g, {}).value == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(preintegrate(g, {}, PreintMode::quadrature).value ==
        doctest::Approx(0.5).epsilon(1e-11));

  JumpIntegrand s = linear_integrand({1.0}, -1.234);
  CHECK(preintegrate(s, {}).value ==
        doctest::Approx(0.10860145212152439).epsilon(1e-12));
  CHECK(preintegrate(s, {}, PreintMode::quadrature).value ==
        doctest::Approx(0.10860145212152439).epsilon(1e-10));

  // two free coordinates: P(y) = Phi(y2)
  JumpIntegrand two = linear_integrand({1.0, 1.0}, 0.0);
  for (double y : {-1.5, 0.0, 0.8})
    CHECK(preintegrate(two, {y}).value ==
          doctest::Approx(normal_cdf(y)).epsilon(1e-12));
}

TEST_CASE("quadrature mode integrates a varying payoff factor") {
  // theta = x_axis^2 over {x > 0.7}: tail integral 1 - Phi(r) + r rho(r)
  JumpIntegrand g = linear_integrand({1.0}, -0.7);
  g.theta = [](const double* x) { return x[0] * x[0]; };
  PreintResult r = preintegrate(g, {}, PreintMode::quadrature);
  CHECK(r.value == doctest::Approx(0.46054140557980594).epsilon(1e-10));
  CHECK(r.root.root == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("digital payoff at one dimension hits the analytic values") {
  MarketParams p;
  JumpIntegrand g = make_digital_asian(p, make_fact(1));
  PreintResult r = preintegrate(g, {});
  CHECK(r.root.status == RootStatus::interior);
  CHECK(r.root.root == doctest::Approx(-0.95).epsilon(1e-11));
  CHECK(r.value == doctest::Approx(0.7500594343677599).epsilon(1e-12));
  CHECK(preintegrate(g, {}, PreintMode::quadrature).value ==
        doctest::Approx(0.7500594343677599).epsilon(1e-10));
}

TEST_CASE("closed form and quadrature agree across a gaussian cloud") {
  MarketParams p;
  JumpIntegrand g = make_digital_asian(p, make_fact(8));
  CounterRng rng(17);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> y(7);
    for (auto& v : y) v = inv_normal_cdf(rng.next_u01());
    double a = preintegrate(g, y, PreintMode::closed_form).value;
    double b = preintegrate(g, y, PreintMode::quadrature).value;
    worst = std::max(worst, std::abs(a - b));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("root gradient on linear integrands and against differences") {
  // phi = x1 + 2 x2 - 1: psi(y) = 1 - 2 y, d psi / d x2 = -2
  JumpIntegrand lin = linear_integrand({1.0, 2.0}, -1.0);
  CHECK(psi_gradient(lin, {0.25}, 1) == doctest::Approx(-2.0).epsilon(1e-12));
  std::vector<double> grad = psi_gradient(lin, {0.25});
  REQUIRE(grad.size() == 1);  // axis component omitted
  CHECK(grad[0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)psi_gradient(lin, {0.25}, 0), std::invalid_argument);

  MarketParams p;
  JumpIntegrand g = make_digital_asian(p, make_fact(4));
  CounterRng rng(23);
  for (int rep = 0; rep < 25; ++rep) {
    std::vector<double> y(3);
    for (auto& v : y) v = inv_normal_cdf(rng.next_u01());
    for (std::size_t k = 1; k < 4; ++k) {
      const double h = 1e-5;
      std::vector<double> up = y, dn = y;
      up[k - 1] += h; dn[k - 1] -= h;
      double fd =
          (find_root(g, up).root - find_root(g, dn).root) / (2.0 * h);
      INFO("rep ", rep, " k ", k);
      CHECK(psi_gradient(g, y, k) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("derivative of the preintegrated function") {
  // P(y2) = Phi(y2), so D2 P = rho(y2)
  JumpIntegrand two = linear_integrand({1.0, 1.0}, 0.0);
  CHECK(dk_preintegrated(two, {0.0}, 1) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-12));
  CHECK(dk_preintegrated(two, {0.7}, 1) ==
        doctest::Approx(0.31225393336676127).epsilon(1e-12));

  // varying theta: finite differences of the quadrature value as oracle
  JumpIntegrand vt = linear_integrand({1.0, 0.5}, -0.2);
  vt.theta = [](const double* x) { return 1.0 + x[1] * x[1]; };
  for (double y : {-0.4, 0.1, 1.2}) {
    const double h = 1e-5;
    double up = preintegrate(vt, {y + h}, PreintMode::quadrature).value;
    double dn = preintegrate(vt, {y - h}, PreintMode::quadrature).value;
    INFO("y = ", y);
    CHECK(dk_preintegrated(vt, {y}, 1) ==
          doctest::Approx((up - dn) / (2.0 * h)).epsilon(1e-5));
  }

  CHECK_THROWS_AS((void)dk_preintegrated(two, {0.0}, 0), std::invalid_argument);
}

TEST_CASE("oscillating fixture exposes the vanishing-derivative boundary") {
  CHECK(oscillating_has_root(2.0 / std::numbers::pi));
  CHECK(!oscillating_has_root(0.1));             // sin(10) < 0
  CHECK(!oscillating_has_root(-1.0));            // phi = e^{x1} > 0
  CHECK(oscillating_psi(2, 2.0 / std::numbers::pi) ==
        doctest::Approx(-0.9031654105789096).epsilon(1e-13));

  auto probes = boundary_decay_probe(
      2, {2.0 / std::numbers::pi, 1.0 / std::numbers::pi + 1e-4, 0.1});
  REQUIRE(probes.size() == 3);

  CHECK(probes[0].has_root);
  CHECK(probes[0].psi_numeric ==
        doctest::Approx(probes[0].psi_closed).epsilon(1e-10));
  CHECK(probes[0].psi_closed ==
        doctest::Approx(-0.9031654105789096).epsilon(1e-12));

  // close to the boundary the root dives and the derivative collapses
  CHECK(probes[1].has_root);
  // the axis derivative e^psi is ~1e-4 here, so the residual-based stop
  // bounds the root error near 1e-8 rather than machine level
  CHECK(probes[1].psi_numeric ==
        doctest::Approx(probes[1].psi_closed).epsilon(1e-6));
  CHECK(probes[1].psi_closed < -9.0);
  CHECK(std::abs(probes[1].d2_preintegrated) < 1e-6);
  CHECK(probes[1].iterations <= 50);

  CHECK(!probes[2].has_root);
}
