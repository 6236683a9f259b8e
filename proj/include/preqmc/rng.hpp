#pragma once

#include <array>
#include <cstdint>

namespace preqmc {

// Philox4x64-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
// Counter-addressed output makes skip-ahead and parallel substreams O(1),
// and replay is exact for a given (key, counter).
struct Philox4x64 {
  using ctr_t = std::array<std::uint64_t, 4>;
  using key_t = std::array<std::uint64_t, 2>;

  static ctr_t block(key_t key, ctr_t ctr);
};

// Map 64 random bits to the open interval (0,1): centers of the 2^53 dyadic
// cells, so 0 and 1 are never produced.
inline double u01_from_bits(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
}

// Derive an independent 64-bit seed from a master seed and up to three
// tags. Used to split replication / method / scramble streams.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t a,
                         std::uint64_t b = 0, std::uint64_t c = 0);

// Sequential convenience wrapper around the counter generator.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{seed, stream} {}

  std::uint64_t next_u64() {
    if (lane_ == 0) {
      buf_ = Philox4x64::block(key_, {block_, 0, 0, 0x243f6a8885a308d3ull});
      ++block_;
    }
    std::uint64_t v = buf_[lane_];
    lane_ = (lane_ + 1) & 3;
    return v;
  }

  double next_u01() { return u01_from_bits(next_u64()); }

  // Position so that the next output is the idx-th of the stream.
  void skip_to(std::uint64_t idx) {
    block_ = idx >> 2;
    lane_ = 0;
    if (idx & 3) {
      buf_ = Philox4x64::block(key_, {block_, 0, 0, 0x243f6a8885a308d3ull});
      ++block_;
      lane_ = idx & 3;
    }
  }

 private:
  Philox4x64::key_t key_;
  std::uint64_t block_ = 0;
  unsigned lane_ = 0;
  Philox4x64::ctr_t buf_{};
};

}  // namespace preqmc
