#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "preqmc/normal.hpp"

using namespace preqmc;

TEST_CASE("pdf and cdf reference values") {
  CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(normal_pdf(0.7) == doctest::Approx(0.31225393336676127).epsilon(1e-14));
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(0.95) == doctest::Approx(0.8289438736915182).epsilon(1e-14));
  CHECK(normal_cdf(1.234) == doctest::Approx(1.0 - 0.10860145212152439).epsilon(1e-13));
  // far tail stays accurate in relative terms
  CHECK(normal_cdf(-6.361340902404056) == doctest::Approx(1e-10).epsilon(1e-9));
}

TEST_CASE("cdf symmetry") {
  for (double x = -8.0; x <= 8.0; x += 0.37)
    CHECK(normal_cdf(-x) + normal_cdf(x) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("inverse cdf reference values") {
  CHECK(std::abs(inv_normal_cdf(0.5)) < 1e-15);
  CHECK(inv_normal_cdf(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(inv_normal_cdf(1e-10) ==
        doctest::Approx(-6.361340902404056).epsilon(1e-12));
}

TEST_CASE("inverse cdf antisymmetry") {
  for (double u : {0.01, 0.2, 0.4999, 0.5})
    CHECK(inv_normal_cdf(u) ==
          doctest::Approx(-inv_normal_cdf(1.0 - u)).epsilon(1e-12));
  // near 1 the argument itself is quantized at 2^-53, which the flat upper
  // tail stretches to ~eps/rho(x); allow exactly that much
  for (double u : {1e-12, 1e-6}) {
    double x = inv_normal_cdf(u);
    double slack = 4.0 * 0x1p-53 / normal_pdf(x);
    CHECK(std::abs(x + inv_normal_cdf(1.0 - u)) <= slack);
  }
}

TEST_CASE("inverse cdf round trip across the unit interval") {
  // |Phi(Phi^{-1}(u)) - u| at machine level, including deep tails
  for (double u = 1e-15; u < 0.5; u *= 3.7) {
    CHECK(std::abs(normal_cdf(inv_normal_cdf(u)) - u) <= 1e-15 + 1e-12 * u);
    double v = 1.0 - u;
    CHECK(std::abs(normal_cdf(inv_normal_cdf(v)) - v) <= 1e-14);
  }
  for (double u = 0.05; u < 1.0; u += 0.05)
    CHECK(normal_cdf(inv_normal_cdf(u)) == doctest::Approx(u).epsilon(1e-14));
}

TEST_CASE("inverse cdf rejects the closed endpoints") {
  CHECK_THROWS_AS((void)inv_normal_cdf(0.0), std::domain_error);
  CHECK_THROWS_AS((void)inv_normal_cdf(1.0), std::domain_error);
  CHECK_THROWS_AS((void)inv_normal_cdf(-0.25), std::domain_error);
  CHECK_THROWS_AS((void)inv_normal_cdf(1.25), std::domain_error);
}

TEST_CASE("to_gaussian maps elementwise and keeps shape") {
  Matrix u(2, 3);
  u(0, 0) = 0.5; u(0, 1) = 0.975; u(0, 2) = 0.025;
  u(1, 0) = 0.1; u(1, 1) = 0.9; u(1, 2) = 0.6;
  Matrix z = to_gaussian(u);
  REQUIRE(z.rows() == 2);
  REQUIRE(z.cols() == 3);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(z(i, j) == doctest::Approx(inv_normal_cdf(u(i, j))).epsilon(1e-15));
  CHECK(to_gaussian(Matrix{}).empty());
}
