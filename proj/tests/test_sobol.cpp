#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "preqmc/sobol.hpp"

using namespace preqmc;

namespace {

// base-2 radical inverse of i, written digit by digit
double radical_inverse(std::uint64_t i) {
  double r = 0.0, base = 0.5;
  while (i) {
    if (i & 1) r += base;
    base *= 0.5;
    i >>= 1;
  }
  return r;
}

// independent rebuild of the direction vectors from a table row
std::vector<std::uint32_t> dirs_from_row(const DirectionRow& row) {
  std::vector<std::uint32_t> v(32);
  for (std::uint32_t i = 1; i <= 32; ++i) {
    if (i <= row.degree) {
      v[i - 1] = row.m[i - 1] << (32 - i);
    } else {
      std::uint32_t s = row.degree;
      std::uint32_t x = v[i - 1 - s] ^ (v[i - 1 - s] >> s);
      for (std::uint32_t k = 1; k < s; ++k)
        if (row.poly & (1u << (s - 1 - k))) x ^= v[i - 1 - k];
      v[i - 1] = x;
    }
  }
  return v;
}

double point_from_dirs(const std::vector<std::uint32_t>& v, std::uint64_t i) {
  std::uint32_t acc = 0;
  for (int b = 0; b < 32; ++b)
    if (i & (1ull << b)) acc ^= v[b];
  return acc * 0x1p-32;
}

std::vector<double> first_points(SobolSampler& s, std::size_t n) {
  std::vector<double> out(n * s.dimension());
  for (std::size_t i = 0; i < n; ++i) s.generate(out.data() + i * s.dimension());
  return out;
}

}  // namespace

TEST_CASE("dimension one is the radical inverse at every index") {
  SobolSampler s(default_direction_table(), 1);
  double x;
  for (std::uint64_t i = 0; i < 4096; ++i) {
    s.generate(&x);
    REQUIRE(x == radical_inverse(i));
  }
}

TEST_CASE("first dimensions match the recurrence rebuilt from the table") {
  const DirectionTable& t = default_direction_table();
  // classic second-dimension start: degree 1, so v_k = 2^{-1} ^ ... pattern
  REQUIRE(t.rows[0].degree == 1);
  auto v2 = dirs_from_row(t.rows[0]);
  CHECK(v2[0] == 0x80000000u);
  CHECK(v2[1] == 0xC0000000u);
  CHECK(v2[2] == 0xA0000000u);
  CHECK(v2[3] == 0xF0000000u);
  CHECK(v2[4] == 0x88000000u);

  SobolSampler s(t, 8);
  std::vector<double> pts = first_points(s, 128);
  for (std::size_t j = 1; j < 8; ++j) {
    auto v = dirs_from_row(t.rows[j - 1]);
    for (std::uint64_t i = 0; i < 128; ++i) {
      INFO("dimension ", j + 1, " index ", i);
      REQUIRE(pts[i * 8 + j] == point_from_dirs(v, i));
    }
  }
  // spot values for dimension 2
  CHECK(pts[1 * 8 + 1] == 0.5);
  CHECK(pts[2 * 8 + 1] == 0.75);
  CHECK(pts[3 * 8 + 1] == 0.25);
}

TEST_CASE("index zero is the origin and skip_to matches sequential order") {
  SobolSampler s(default_direction_table(), 5);
  std::vector<double> pts = first_points(s, 1200);
  for (std::size_t j = 0; j < 5; ++j) CHECK(pts[j] == 0.0);

  for (std::uint64_t k : {0ull, 1ull, 2ull, 1023ull, 1024ull, 1025ull}) {
    SobolSampler r(default_direction_table(), 5);
    r.skip_to(k);
    double x[5];
    r.generate(x);
    for (std::size_t j = 0; j < 5; ++j) {
      INFO("skip ", k, " dim ", j);
      REQUIRE(x[j] == pts[k * 5 + j]);
    }
  }
  // large skip stays consistent with the direction-vector definition
  SobolSampler far(default_direction_table(), 2);
  far.skip_to((1ull << 20) + 7);
  double x[2];
  far.generate(x);
  CHECK(x[0] == radical_inverse((1ull << 20) + 7));
}

TEST_CASE("one-dimensional stratification is exact over dyadic blocks") {
  // 2^10 points -> each of the 1024 cells of width 2^-10 hit exactly once,
  // in each of the first 16 dimensions
  const std::size_t m = 10, n = std::size_t{1} << m;
  SobolSampler s(default_direction_table(), 16);
  std::vector<double> pts = first_points(s, n);
  for (std::size_t j = 0; j < 16; ++j) {
    std::vector<int> hits(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      ++hits[static_cast<std::size_t>(pts[i * 16 + j] * n)];
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
}

TEST_CASE("dimensions one and two stratify two-dimensional boxes") {
  const std::size_t n = 1024;
  SobolSampler s(default_direction_table(), 2);
  std::vector<double> pts = first_points(s, n);
  std::vector<int> hits(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto bx = static_cast<std::size_t>(pts[i * 2] * 32);
    auto by = static_cast<std::size_t>(pts[i * 2 + 1] * 32);
    ++hits[bx * 32 + by];
  }
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

TEST_CASE("scrambling is seeded, stays in range, and keeps stratification") {
  const std::size_t n = 1024;
  SobolSampler a(default_direction_table(), 4, 11u);
  SobolSampler b(default_direction_table(), 4, 11u);
  SobolSampler c(default_direction_table(), 4, 12u);
  auto pa = first_points(a, n), pb = first_points(b, n), pc = first_points(c, n);
  CHECK(pa == pb);
  CHECK(pa != pc);

  bool in_range = true;
  for (double u : pa) in_range = in_range && u > 0.0 && u < 1.0;
  CHECK(in_range);

  // a linear scramble plus digital shift preserves dyadic stratification
  for (std::size_t j = 0; j < 4; ++j) {
    std::vector<int> hits(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      ++hits[static_cast<std::size_t>(pa[i * 4 + j] * n)];
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += pa[i * 4];
  mean /= static_cast<double>(n);
  CHECK(mean == doctest::Approx(0.5).epsilon(2e-3));
}

TEST_CASE("uniform stream wraps both generators with common skip semantics") {
  UniformStream ps = UniformStream::pseudo_random(99);
  Matrix block = ps.next_points(64, 3);
  REQUIRE(block.rows() == 64);
  REQUIRE(block.cols() == 3);
  bool in_range = true;
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      in_range = in_range && block(i, j) > 0.0 && block(i, j) < 1.0;
  CHECK(in_range);

  UniformStream ps2 = UniformStream::pseudo_random(99);
  ps2.skip_to(17);
  Matrix tail = ps2.next_points(5, 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(tail(i, j) == block(17 + i, j));

  UniformStream qs =
      UniformStream::sobol(SobolSampler(default_direction_table(), 3, 5u));
  Matrix qb = qs.next_points(32, 3);
  UniformStream qs2 =
      UniformStream::sobol(SobolSampler(default_direction_table(), 3, 5u));
  qs2.skip_to(20);
  Matrix qt = qs2.next_points(4, 3);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(qt(i, j) == qb(20 + i, j));
  CHECK(qs.is_sobol());
  CHECK(!ps.is_sobol());
}

TEST_CASE("direction table parser accepts the shipped format") {
  std::istringstream good(
      "d s a m_i\n"
      "2 1 0 1\n"
      "3 2 1 1 3\n");
  DirectionTable t = load_direction_numbers(good);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.max_dimension() == 3);
  CHECK(t.rows[1].degree == 2);
  CHECK(t.rows[1].m == std::vector<std::uint32_t>{1, 3});

  // the embedded table parses to the library default
  std::istringstream embedded(embedded_direction_table());
  DirectionTable e = load_direction_numbers(embedded);
  const DirectionTable& d = default_direction_table();
  REQUIRE(e.rows.size() == d.rows.size());
  CHECK(d.max_dimension() >= 1024);
  CHECK(e.rows[100].m == d.rows[100].m);
}

TEST_CASE("direction table parser rejects malformed rows") {
  auto rejects = [](const char* text) {
    std::istringstream in(text);
    CHECK_THROWS_AS((void)load_direction_numbers(in), std::runtime_error);
  };
  rejects("d s a m_i\n");                    // no rows
  rejects("d s a m_i\n3 1 0 1\n");           // dimensions must start at 2
  rejects("d s a m_i\n2 1 0 1\n4 1 0 1\n");  // gap in dimensions
  rejects("d s a m_i\n2 2 1 1\n");           // missing m_2
  rejects("d s a m_i\n2 1 0 2\n");           // even direction number
  rejects("d s a m_i\n2 1 0 1 7\n");         // trailing tokens
  rejects("d s a m_i\n2 0 0 1\n");           // degree zero
  rejects("d s a m_i\n2 2 1 1 8\n");         // m_2 must be below 2^2
}

TEST_CASE("sampler validates the requested dimension") {
  CHECK_THROWS_AS(SobolSampler(default_direction_table(), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(SobolSampler(default_direction_table(),
                               default_direction_table().max_dimension() + 1),
                  std::out_of_range);
}
