#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "preqmc/covariance.hpp"
#include "preqmc/factorization.hpp"
#include "preqmc/fft.hpp"
#include "preqmc/rng.hpp"

using namespace preqmc;

namespace {

std::vector<double> gaussian_box_muller(CounterRng& rng, std::size_t n) {
  // independent of the library inverse-CDF path
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; i += 2) {
    double u1 = rng.next_u01(), u2 = rng.next_u01();
    double r = std::sqrt(-2.0 * std::log(u1));
    z[i] = r * std::cos(2.0 * std::numbers::pi * u2);
    if (i + 1 < n) z[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
  }
  return z;
}

}  // namespace

TEST_CASE("covariance grid and matrix") {
  TimeGrid g{2.0, 4};
  CHECK(g.dt() == doctest::Approx(0.5));
  CHECK(g.time(0) == doctest::Approx(0.5));
  CHECK(g.time(3) == doctest::Approx(2.0));
  Matrix c = build_covariance(g);
  for (std::size_t l = 0; l < 4; ++l)
    for (std::size_t k = 0; k < 4; ++k)
      CHECK(c(l, k) == doctest::Approx(std::min(g.time(l), g.time(k))));
}

TEST_CASE("cholesky of the brownian covariance is constant below the diagonal") {
  TimeGrid g{1.0, 6};
  Matrix l = cholesky_lower(build_covariance(g));
  double rt = std::sqrt(g.dt());
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 6; ++c)
      CHECK(l(r, c) == doctest::Approx(c <= r ? rt : 0.0).epsilon(1e-12));

  Matrix bad(2, 2);
  bad(0, 0) = 1.0; bad(0, 1) = 2.0; bad(1, 0) = 2.0; bad(1, 1) = 1.0;
  CHECK_THROWS_AS((void)cholesky_lower(bad), std::domain_error);
}

TEST_CASE("every method factors the covariance at several dimensions") {
  for (auto method : {FactorMethod::standard, FactorMethod::bridge,
                      FactorMethod::pca}) {
    for (std::size_t d : {1, 2, 3, 8, 64}) {
      PathFactorization f(TimeGrid{1.0, d}, method);
      INFO(to_string(method), " d=", d);
      CHECK(max_factorization_residual(f) <= 1e-10);
    }
  }
  PathFactorization big(TimeGrid{1.0, 256}, FactorMethod::pca);
  CHECK(max_factorization_residual(big) <= 1e-9);
}

TEST_CASE("pca eigenvalues match the jacobi oracle and the trace") {
  TimeGrid g{1.0, 16};
  PathFactorization f(g, FactorMethod::pca);
  SymEigen e = jacobi_eigen(build_covariance(g));
  REQUIRE(f.eigenvalues().size() == 16);
  double sum = 0.0;
  for (std::size_t k = 0; k < 16; ++k) {
    CHECK(f.eigenvalues()[k] ==
          doctest::Approx(e.values[k]).epsilon(1e-11));
    sum += f.eigenvalues()[k];
    if (k) CHECK(f.eigenvalues()[k] <= f.eigenvalues()[k - 1]);
  }
  double trace = 0.0;
  for (std::size_t l = 0; l < 16; ++l) trace += g.time(l);
  CHECK(sum == doctest::Approx(trace).epsilon(1e-12));
  CHECK_THROWS_AS((void)PathFactorization(g, FactorMethod::standard).eigenvalues(),
                  std::logic_error);
}

TEST_CASE("bridge differs from standard but factors the same covariance") {
  TimeGrid g{1.0, 8};
  PathFactorization st(g, FactorMethod::standard);
  PathFactorization br(g, FactorMethod::bridge);
  CHECK(max_abs_diff(matmul_abt(st.dense_factor(), st.dense_factor()),
                     matmul_abt(br.dense_factor(), br.dense_factor())) <= 1e-12);
  CHECK(max_abs_diff(st.dense_factor(), br.dense_factor()) > 0.1);
}

TEST_CASE("first column is positive and consistent with the dense factor") {
  for (auto method : {FactorMethod::standard, FactorMethod::bridge,
                      FactorMethod::pca}) {
    PathFactorization f(TimeGrid{1.0, 8}, method);
    const Matrix& a = f.dense_factor();
    for (std::size_t l = 0; l < 8; ++l) {
      INFO(to_string(method), " row ", l);
      CHECK(f.column_one()[l] == doctest::Approx(a(l, 0)).epsilon(1e-13));
      CHECK(f.column_one()[l] > 0.0);
    }
  }
}

TEST_CASE("matvec agrees with the dense factor for every method") {
  CounterRng rng(314);
  for (auto method : {FactorMethod::standard, FactorMethod::bridge,
                      FactorMethod::pca}) {
    PathFactorization f(TimeGrid{1.0, 33}, method);  // odd size on purpose
    const Matrix& a = f.dense_factor();
    std::vector<double> x = gaussian_box_muller(rng, 33), w(33);
    f.matvec(x.data(), w.data());
    for (std::size_t l = 0; l < 33; ++l) {
      double ref = 0.0;
      for (std::size_t k = 0; k < 33; ++k) ref += a(l, k) * x[k];
      INFO(to_string(method), " row ", l);
      CHECK(w[l] == doctest::Approx(ref).epsilon(1e-11));
    }
  }
}

TEST_CASE("only pca reports the fast transform") {
  CHECK(PathFactorization(TimeGrid{1.0, 4}, FactorMethod::pca).uses_fast_transform());
  CHECK(!PathFactorization(TimeGrid{1.0, 4}, FactorMethod::standard).uses_fast_transform());
  CHECK(!PathFactorization(TimeGrid{1.0, 4}, FactorMethod::bridge).uses_fast_transform());
}

TEST_CASE("empirical path covariance matches the target") {
  TimeGrid g{1.0, 8};
  PathFactorization f(g, FactorMethod::bridge);
  Matrix c = build_covariance(g);
  const std::size_t n = 1 << 14;
  CounterRng rng(2718);
  Matrix acc(8, 8);
  std::vector<double> w(8);
  MatvecScratch scratch;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = gaussian_box_muller(rng, 8);
    f.matvec(x.data(), w.data(), scratch);
    for (std::size_t l = 0; l < 8; ++l)
      for (std::size_t k = 0; k <= l; ++k) acc(l, k) += w[l] * w[k];
  }
  for (std::size_t l = 0; l < 8; ++l)
    for (std::size_t k = 0; k <= l; ++k) {
      double est = acc(l, k) / static_cast<double>(n);
      // Var(w_l w_k) <= E[w_l^2 w_k^2] <= 3 t_l t_k for jointly normal pairs
      double se = std::sqrt(3.0 * g.time(l) * g.time(k) / static_cast<double>(n));
      INFO("entry ", l, ",", k);
      CHECK(std::abs(est - c(l, k)) <= 5.0 * se);
    }
}

TEST_CASE("radix-2 fft matches a naive dft and round-trips") {
  const std::size_t n = 16;
  Radix2FFT fft(n);
  CounterRng rng(55);
  std::vector<std::complex<double>> a(n), ref(n);
  for (auto& v : a) v = {rng.next_u01() - 0.5, rng.next_u01() - 0.5};
  for (std::size_t l = 0; l < n; ++l) {
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double ang = -2.0 * std::numbers::pi * static_cast<double>(l * k) /
                   static_cast<double>(n);
      s += a[k] * std::complex<double>{std::cos(ang), std::sin(ang)};
    }
    ref[l] = s;
  }
  std::vector<std::complex<double>> b = a;
  fft.forward(b.data());
  for (std::size_t l = 0; l < n; ++l)
    CHECK(std::abs(b[l] - ref[l]) <= 1e-12);
  fft.inverse(b.data());
  for (std::size_t l = 0; l < n; ++l)
    CHECK(std::abs(b[l] - a[l]) <= 1e-13);
  CHECK_THROWS_AS(Radix2FFT(12), std::invalid_argument);
}

TEST_CASE("bluestein handles non-power-of-two lengths with short inputs") {
  const std::size_t n = 7, in_len = 5;
  BluesteinDFT dft(n, in_len);
  CounterRng rng(77);
  std::vector<std::complex<double>> a(in_len);
  for (auto& v : a) v = {rng.next_u01() - 0.5, rng.next_u01() - 0.5};
  std::vector<std::complex<double>> out(n), work;
  dft.forward(a.data(), out.data(), work);
  for (std::size_t l = 0; l < n; ++l) {
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < in_len; ++k) {
      double ang = -2.0 * std::numbers::pi * static_cast<double>(l * k) /
                   static_cast<double>(n);
      s += a[k] * std::complex<double>{std::cos(ang), std::sin(ang)};
    }
    CHECK(std::abs(out[l] - s) <= 1e-12);
  }
}

TEST_CASE("odd sine transform equals the direct sum") {
  for (std::size_t d : {1, 4, 64}) {
    OddSineTransform fst(d);
    CounterRng rng(123 + d);
    std::vector<double> b(d), out(d);
    for (auto& v : b) v = rng.next_u01() - 0.5;
    fst.apply(b.data(), out.data());
    for (std::size_t l = 1; l <= d; ++l) {
      double s = 0.0;
      for (std::size_t k = 1; k <= d; ++k)
        s += b[k - 1] * std::sin(std::numbers::pi *
                                 static_cast<double>((2 * k - 1) * l) /
                                 static_cast<double>(2 * d + 1));
      INFO("d=", d, " l=", l);
      CHECK(out[l - 1] == doctest::Approx(s).epsilon(1e-11));
    }
  }
}

TEST_CASE("method names parse both ways") {
  CHECK(parse_factor_method("standard") == FactorMethod::standard);
  CHECK(parse_factor_method("bridge") == FactorMethod::bridge);
  CHECK(parse_factor_method("pca") == FactorMethod::pca);
  for (auto m : {FactorMethod::standard, FactorMethod::bridge, FactorMethod::pca})
    CHECK(parse_factor_method(to_string(m)) == m);
  CHECK_THROWS_AS((void)parse_factor_method("qr"), std::invalid_argument);
}
