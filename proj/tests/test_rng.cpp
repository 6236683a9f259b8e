#include <doctest.h>

#include <set>
#include <vector>

#include "preqmc/rng.hpp"

using namespace preqmc;

// Reference blocks cross-checked against numpy.random.Philox (whose counter
// pre-increments, so numpy's first draw after counter=0 is the block at 1).
TEST_CASE("philox known-answer blocks") {
  auto b0 = Philox4x64::block({0, 0}, {0, 0, 0, 0});
  CHECK(b0[0] == 0x16554d9eca36314cull);
  CHECK(b0[1] == 0xdb20fe9d672d0fdcull);
  CHECK(b0[2] == 0xd7e772cee186176bull);
  CHECK(b0[3] == 0x7e68b68aec7ba23bull);

  auto b1 = Philox4x64::block({0, 0}, {1, 0, 0, 0});
  CHECK(b1[0] == 0x02f4ba6408e4d89bull);
  CHECK(b1[1] == 0x3dd62b0b9ca8c5b2ull);
  CHECK(b1[2] == 0x1c8667a55d902e79ull);
  CHECK(b1[3] == 0x907d7a052fd5b4dcull);

  auto b2 = Philox4x64::block({0xdeadbeef12345678ull, 0xfaceb00ccafe4242ull},
                              {2, 2, 3, 4});
  CHECK(b2[0] == 0x926d1302deb2d6d1ull);
  CHECK(b2[1] == 0xa1ba7f0eada7ecd1ull);
  CHECK(b2[2] == 0x537a9e8e1ec7960eull);
  CHECK(b2[3] == 0xf2a796c5ca355c6dull);
}

TEST_CASE("philox output depends on every input word") {
  auto base = Philox4x64::block({1, 2}, {3, 4, 5, 6});
  CHECK(Philox4x64::block({9, 2}, {3, 4, 5, 6}) != base);
  CHECK(Philox4x64::block({1, 9}, {3, 4, 5, 6}) != base);
  CHECK(Philox4x64::block({1, 2}, {9, 4, 5, 6}) != base);
  CHECK(Philox4x64::block({1, 2}, {3, 9, 5, 6}) != base);
  CHECK(Philox4x64::block({1, 2}, {3, 4, 9, 6}) != base);
  CHECK(Philox4x64::block({1, 2}, {3, 4, 5, 9}) != base);
}

TEST_CASE("u01_from_bits maps to cell centers in (0,1)") {
  CHECK(u01_from_bits(0) == 0x1p-54);
  CHECK(u01_from_bits(~0ull) == 1.0 - 0x1p-54);
  CHECK(u01_from_bits(1ull << 63) == 0.5 + 0x1p-54);
  // low 11 bits are discarded
  CHECK(u01_from_bits(0x7ff) == u01_from_bits(0));
}

TEST_CASE("counter rng streams are reproducible and distinct") {
  CounterRng a(42), b(42), c(43), d(42, 1);
  bool same = true, diff_seed = false, diff_stream = false;
  for (int i = 0; i < 100; ++i) {
    std::uint64_t v = a.next_u64();
    same = same && (v == b.next_u64());
    diff_seed = diff_seed || (v != c.next_u64());
    diff_stream = diff_stream || (v != d.next_u64());
  }
  CHECK(same);
  CHECK(diff_seed);
  CHECK(diff_stream);
}

TEST_CASE("counter rng skip_to agrees with sequential draws") {
  std::vector<std::uint64_t> ref;
  CounterRng seq(7);
  for (int i = 0; i < 40; ++i) ref.push_back(seq.next_u64());

  for (std::uint64_t k : {0ull, 1ull, 2ull, 3ull, 4ull, 5ull, 7ull, 8ull,
                          13ull, 31ull}) {
    CounterRng r(7);
    r.skip_to(k);
    for (std::uint64_t i = k; i < 40; ++i) {
      INFO("skip ", k, " index ", i);
      CHECK(r.next_u64() == ref[i]);
    }
  }

  // rewinding a used generator
  CounterRng r(7);
  for (int i = 0; i < 11; ++i) r.next_u64();
  r.skip_to(2);
  CHECK(r.next_u64() == ref[2]);
}

TEST_CASE("u01 draws stay inside the open interval") {
  CounterRng r(123);
  for (int i = 0; i < 10000; ++i) {
    double u = r.next_u01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("split_seed separates tag combinations") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 4; ++a)
    for (std::uint64_t b = 0; b < 4; ++b)
      for (std::uint64_t c = 0; c < 4; ++c)
        seen.insert(split_seed(2024, a, b, c));
  CHECK(seen.size() == 64);
  CHECK(split_seed(1, 2, 3, 4) == split_seed(1, 2, 3, 4));
  CHECK(split_seed(1, 2, 3, 4) != split_seed(2, 2, 3, 4));
  CHECK(split_seed(1, 2, 3) != split_seed(1, 3, 2));
}
