#pragma once

#include <cstdint>
#include <optional>

#include "preqmc/direction_numbers.hpp"
#include "preqmc/matrix.hpp"

namespace preqmc {

// Sobol' sequence in natural (counting) order: coordinate j of point i is
// the XOR of the direction vectors selected by the set bits of i, so
// dimension 1 reproduces the base-2 radical inverse at every index and
// skip-ahead costs O(log i). Optional Matousek linear-affine scrambling:
// a random nonsingular lower-triangular bit matrix folded into the
// direction vectors plus a digital shift.
class SobolSampler {
 public:
  SobolSampler(const DirectionTable& table, std::size_t dimension,
               std::optional<std::uint64_t> scramble_seed = std::nullopt);

  std::size_t dimension() const { return dim_; }
  bool scrambled() const { return scrambled_; }
  std::uint64_t cursor() const { return cursor_; }

  // Position the cursor so the next generated point has this index.
  void skip_to(std::uint64_t index);

  // Write the next point (dimension() coordinates in [0,1)) and advance.
  void generate(double* out);

 private:
  void emit(double* out) const;

  std::size_t dim_ = 0;
  bool scrambled_ = false;
  std::uint64_t cursor_ = 0;
  std::vector<std::uint32_t> dirs_;   // 32 direction vectors per dimension
  std::vector<std::uint32_t> shift_;  // digital shift per dimension
  std::vector<std::uint32_t> state_;  // XOR accumulator for current index
};

// Uniform point stream: either counter-based pseudo-random numbers or a
// Sobol' sampler behind a common interface.
class UniformStream {
 public:
  static UniformStream pseudo_random(std::uint64_t seed);
  static UniformStream sobol(SobolSampler sampler);

  bool is_sobol() const { return sampler_.has_value(); }
  std::uint64_t cursor() const { return cursor_; }
  void skip_to(std::uint64_t point_index);

  // n points of s coordinates each, row-major. For a Sobol' stream s must
  // match the sampler dimension.
  Matrix next_points(std::size_t n, std::size_t s);

 private:
  UniformStream() = default;
  std::uint64_t seed_ = 0;
  std::uint64_t cursor_ = 0;
  std::optional<SobolSampler> sampler_;
};

}  // namespace preqmc
