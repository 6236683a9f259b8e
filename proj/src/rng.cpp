#include "preqmc/rng.hpp"

namespace preqmc {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline Philox4x64::ctr_t round_once(const Philox4x64::ctr_t& x,
                                    const Philox4x64::key_t& k) {
  std::uint64_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, x[0], hi0, lo0);
  mulhilo(kMul1, x[2], hi1, lo1);
  return {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

Philox4x64::ctr_t Philox4x64::block(key_t key, ctr_t ctr) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    ctr = round_once(ctr, key);
  }
  return ctr;
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                         std::uint64_t c) {
  auto out = Philox4x64::block({master, 0x5eed5eed5eed5eedull}, {a, b, c, 0});
  return out[0];
}

}  // namespace preqmc
