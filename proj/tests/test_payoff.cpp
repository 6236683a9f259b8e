#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "preqmc/normal.hpp"
#include "preqmc/payoff.hpp"
#include "preqmc/rng.hpp"

using namespace preqmc;

namespace {

std::shared_ptr<const PathFactorization> make_fact(std::size_t d,
                                                   FactorMethod m) {
  return std::make_shared<const PathFactorization>(TimeGrid{1.0, d}, m);
}

std::vector<double> gaussian(CounterRng& rng, std::size_t n) {
  std::vector<double> z(n);
  for (auto& v : z) v = inv_normal_cdf(rng.next_u01());
  return z;
}

}  // namespace

TEST_CASE("market parameter validation and discount factor") {
  MarketParams p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.discount() == doctest::Approx(0.9048374180359595).epsilon(1e-15));
  MarketParams bad = p;
  bad.sigma = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p; bad.spot = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p; bad.strike = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p; bad.maturity = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("asset path from a brownian path") {
  MarketParams p;
  CHECK(asset_path(p, TimeGrid{1.0, 1}, {0.0})[0] ==
        doctest::Approx(109.96588551261028).epsilon(1e-13));
  std::vector<double> s = asset_path(p, TimeGrid{1.0, 2}, {0.3, -0.2});
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(108.05822324585598).epsilon(1e-13));
  CHECK(s[1] == doctest::Approx(107.78841508846315).epsilon(1e-13));
  // zero volatility limit is the deterministic forward
  MarketParams det = p;
  det.sigma = 1e-12;
  std::vector<double> f = asset_path(det, TimeGrid{1.0, 2}, {5.0, -5.0});
  CHECK(f[0] == doctest::Approx(100.0 * std::exp(0.1 * 0.5)).epsilon(1e-9));
  CHECK(f[1] == doctest::Approx(100.0 * std::exp(0.1)).epsilon(1e-9));
}

TEST_CASE("phi at the known one-dimensional root") {
  MarketParams p;
  auto f = make_fact(1, FactorMethod::standard);
  double x0 = 0.0;
  CHECK(digital_asian_phi(p, *f, &x0) ==
        doctest::Approx(9.965885512610285).epsilon(1e-13));
  double root = -0.95;  // (r - sigma^2/2) T / (sigma sqrt(T)) with these params
  CHECK(std::abs(digital_asian_phi(p, *f, &root)) <= 1e-10);
}

TEST_CASE("phi derivatives match finite differences") {
  MarketParams p;
  CounterRng rng(99);
  for (auto method : {FactorMethod::standard, FactorMethod::bridge,
                      FactorMethod::pca}) {
    auto f = make_fact(3, method);
    std::vector<double> x = gaussian(rng, 3);
    double d1 = digital_asian_dphi1(p, *f, x.data());
    CHECK(d1 > 0.0);  // increasing along the first coordinate
    CHECK(digital_asian_dphi(p, *f, x.data(), 0) ==
          doctest::Approx(d1).epsilon(1e-12));
    for (std::size_t k = 0; k < 3; ++k) {
      const double h = 1e-6;
      std::vector<double> up = x, dn = x;
      up[k] += h; dn[k] -= h;
      double fd = (digital_asian_phi(p, *f, up.data()) -
                   digital_asian_phi(p, *f, dn.data())) / (2.0 * h);
      INFO(to_string(method), " k=", k);
      CHECK(digital_asian_dphi(p, *f, x.data(), k) ==
            doctest::Approx(fd).epsilon(1e-7));
    }
  }
  // d=1 value: sigma * S(t_1) * A_11
  auto f1 = make_fact(1, FactorMethod::standard);
  double x0 = 0.0;
  CHECK(digital_asian_dphi1(p, *f1, &x0) ==
        doctest::Approx(10.996588551261028).epsilon(1e-12));
}

TEST_CASE("jump integrand wiring for the digital payoff") {
  MarketParams p;
  auto f = make_fact(4, FactorMethod::pca);
  JumpIntegrand g = make_digital_asian(p, f);
  CHECK(g.dim == 4);
  CHECK(g.axis == 0);
  CHECK(g.constant_theta());
  CHECK(g.theta_value == doctest::Approx(p.discount()).epsilon(1e-15));
  CHECK(bool(g.closed_form_tail));
  CHECK(g.scale == doctest::Approx(p.strike));
  CounterRng rng(7);
  std::vector<double> x = gaussian(rng, 4);
  CHECK(g.phi(x.data()) ==
        doctest::Approx(digital_asian_phi(p, *f, x.data())).epsilon(1e-14));
  CHECK(g.dphi_axis(x.data()) ==
        doctest::Approx(digital_asian_dphi1(p, *f, x.data())).epsilon(1e-14));
  // closed-form tail: constant theta times the upper normal mass
  CHECK(g.closed_form_tail(0.3, nullptr) ==
        doctest::Approx(p.discount() * (1.0 - normal_cdf(0.3))).epsilon(1e-14));
}

TEST_CASE("monotonicity probe rejects a decreasing integrand") {
  JumpIntegrand g;
  g.dim = 2;
  g.axis = 0;
  g.phi = [](const double* x) { return -x[0] + x[1]; };
  g.dphi_axis = [](const double*) { return -1.0; };
  CHECK_THROWS_AS(probe_monotonicity(g, 64), std::runtime_error);
  JumpIntegrand ok = g;
  ok.phi = [](const double* x) { return x[0] + x[1]; };
  ok.dphi_axis = [](const double*) { return 1.0; };
  CHECK_NOTHROW(probe_monotonicity(ok, 64));
}

TEST_CASE("axis sections: value, derivatives, and gaussian indicator mass") {
  SUBCASE("single root of a one-term section") {
    AxisSection s{{1.0}, {1.0}, 1.0};  // e^t - 1 > 0 iff t > 0
    CHECK(s.value(0.0) == doctest::Approx(0.0));
    CHECK(s.indicator_mass() == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("no root means full mass") {
    AxisSection s{{1.0, 1.0}, {1.0, -1.0}, 1.5};  // 2 cosh t - 1.5 > 0 always
    CHECK(s.indicator_mass() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("two roots leave the complement of an interval") {
    // 2 cosh t - 2.5 < 0 exactly on |t| < log 2
    AxisSection s{{1.0, 1.0}, {1.0, -1.0}, 2.5};
    CHECK(s.value(std::log(2.0)) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s.indicator_mass() ==
          doctest::Approx(0.4882171915711655).epsilon(1e-12));
  }
  SUBCASE("derivatives are consistent") {
    AxisSection s{{0.7, 1.3}, {0.9, -0.4}, 2.0};
    for (double t : {-1.0, 0.0, 0.5, 2.0}) {
      const double h = 1e-6;
      CHECK(s.derivative(t) ==
            doctest::Approx((s.value(t + h) - s.value(t - h)) / (2 * h))
                .epsilon(1e-8));
      CHECK(s.second_derivative(t) ==
            doctest::Approx((s.derivative(t + h) - s.derivative(t - h)) / (2 * h))
                .epsilon(1e-8));
    }
  }
}

TEST_CASE("axis sections built from the payoff match a scan-based mass") {
  MarketParams p;
  auto f = make_fact(3, FactorMethod::pca);
  CounterRng rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> base = gaussian(rng, 3);
    for (std::size_t axis = 0; axis < 3; ++axis) {
      AxisSection s = make_axis_section(p, *f, base.data(), axis);
      // brute bracketing scan plus bisection, independent of the section's
      // own root handling
      std::vector<double> roots;
      double prev_t = -40.0, prev_v = s.value(prev_t);
      for (double t = -40.0 + 0.01; t <= 40.0; t += 0.01) {
        double v = s.value(t);
        if ((prev_v < 0.0) != (v < 0.0)) {
          double lo = prev_t, hi = t;
          for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            ((s.value(mid) < 0.0) == (prev_v < 0.0) ? lo : hi) = mid;
          }
          roots.push_back(0.5 * (lo + hi));
        }
        prev_t = t; prev_v = v;
      }
      double mass = 1.0;
      if (roots.size() == 1) mass = 1.0 - normal_cdf(roots[0]);
      if (roots.size() == 2)
        mass = normal_cdf(roots[0]) + 1.0 - normal_cdf(roots[1]);
      INFO("rep ", rep, " axis ", axis, " roots ", roots.size());
      CHECK(s.indicator_mass() == doctest::Approx(mass).epsilon(1e-9));
      // cross-check the section against the payoff along that axis
      std::vector<double> x = base;
      x[axis] = 0.37;
      CHECK(s.value(0.37) ==
            doctest::Approx(digital_asian_phi(p, *f, x.data())).epsilon(1e-11));
    }
  }
}

TEST_CASE("evaluator payoff and conditional price agree with the primitives") {
  MarketParams p;
  auto f = make_fact(4, FactorMethod::pca);
  DigitalAsianEvaluator ev(p, f);
  JumpIntegrand g = make_digital_asian(p, f);
  CHECK(ev.dim() == 4);
  CHECK(ev.discount() == doctest::Approx(p.discount()));
  CounterRng rng(31);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> x = gaussian(rng, 4);
    double want = digital_asian_phi(p, *f, x.data()) > 0.0 ? p.discount() : 0.0;
    CHECK(ev.payoff(x.data()) == want);

    std::vector<double> y(x.begin() + 1, x.end());
    RootResult root;
    double cp = ev.conditional_price(y.data(), root);
    PreintResult ref = preintegrate(g, y);
    CHECK(cp == doctest::Approx(ref.value).epsilon(1e-10));
    CHECK(root.iterations <= 20);
    if (root.status == RootStatus::interior)
      CHECK(std::abs(root.residual) <= 1e-10 * (1.0 + p.strike));
  }
}
