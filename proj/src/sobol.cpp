#include "preqmc/sobol.hpp"

#include <bit>
#include <stdexcept>

#include "preqmc/rng.hpp"

namespace preqmc {

namespace {

constexpr std::uint64_t kMaxPoints = 1ull << 32;

// Direction vectors for the first dimension: the plain van der Corput
// radical inverse (all m_i = 1).
void van_der_corput_dirs(std::uint32_t* v) {
  for (int i = 0; i < 32; ++i) v[i] = 1u << (31 - i);
}

// Joe-Kuo recurrence: v_i = m_i << (32-i) for i <= s, then
// v_i = v_{i-s} ^ (v_{i-s} >> s) ^ sum of a-selected earlier vectors.
void recurrence_dirs(const DirectionRow& row, std::uint32_t* v) {
  const std::uint32_t s = row.degree, a = row.poly;
  for (std::uint32_t i = 0; i < s && i < 32; ++i) v[i] = row.m[i] << (31 - i);
  for (std::uint32_t i = s; i < 32; ++i) {
    v[i] = v[i - s] ^ (v[i - s] >> s);
    for (std::uint32_t k = 1; k < s; ++k)
      if ((a >> (s - 1 - k)) & 1) v[i] ^= v[i - k];
  }
}

// Random nonsingular lower-triangular bit matrix (unit diagonal) applied to
// a direction vector; digit r of the output is the parity of row_r & input.
std::uint32_t apply_bit_matrix(const std::uint32_t* rows, std::uint32_t v) {
  std::uint32_t out = 0;
  for (int r = 0; r < 32; ++r)
    out |= static_cast<std::uint32_t>(std::popcount(rows[r] & v) & 1)
           << (31 - r);
  return out;
}

}  // namespace

SobolSampler::SobolSampler(const DirectionTable& table, std::size_t dimension,
                           std::optional<std::uint64_t> scramble_seed)
    : dim_(dimension), scrambled_(scramble_seed.has_value()) {
  if (dimension == 0) throw std::invalid_argument("SobolSampler: dimension 0");
  if (dimension > table.max_dimension())
    throw std::out_of_range("SobolSampler: table supports dimensions up to " +
                            std::to_string(table.max_dimension()));
  dirs_.resize(dim_ * 32);
  shift_.assign(dim_, 0);
  state_.assign(dim_, 0);
  for (std::size_t j = 0; j < dim_; ++j) {
    std::uint32_t* v = dirs_.data() + 32 * j;
    if (j == 0)
      van_der_corput_dirs(v);
    else
      recurrence_dirs(table.rows[j - 1], v);
    if (scrambled_) {
      CounterRng rng(*scramble_seed, j);
      std::uint32_t rows[32];
      for (int r = 0; r < 32; ++r) {
        std::uint32_t below = r == 0 ? 0u : ~0u << (32 - r);
        rows[r] = (static_cast<std::uint32_t>(rng.next_u64()) & below) |
                  (1u << (31 - r));
      }
      for (int i = 0; i < 32; ++i) v[i] = apply_bit_matrix(rows, v[i]);
      shift_[j] = static_cast<std::uint32_t>(rng.next_u64());
    }
  }
}

void SobolSampler::emit(double* out) const {
  for (std::size_t j = 0; j < dim_; ++j) {
    std::uint32_t z = state_[j] ^ shift_[j];
    out[j] = (scrambled_ && z == 0) ? 0x1p-33 : z * 0x1p-32;
  }
}

void SobolSampler::generate(double* out) {
  if (cursor_ >= kMaxPoints)
    throw std::length_error("SobolSampler: 2^32 points exhausted");
  emit(out);
  // Advance index: bits 0..t of the cursor flip, t = trailing ones.
  std::uint64_t flip = cursor_ ^ (cursor_ + 1);
  ++cursor_;
  if (cursor_ == kMaxPoints) return;  // next generate() reports exhaustion
  for (int b = 0; flip; ++b, flip >>= 1)
    for (std::size_t j = 0; j < dim_; ++j) state_[j] ^= dirs_[32 * j + b];
}

void SobolSampler::skip_to(std::uint64_t index) {
  if (index >= kMaxPoints)
    throw std::length_error("SobolSampler: index beyond 2^32");
  cursor_ = index;
  std::fill(state_.begin(), state_.end(), 0u);
  for (int b = 0; b < 32; ++b)
    if ((index >> b) & 1)
      for (std::size_t j = 0; j < dim_; ++j) state_[j] ^= dirs_[32 * j + b];
}

UniformStream UniformStream::pseudo_random(std::uint64_t seed) {
  UniformStream s;
  s.seed_ = seed;
  return s;
}

UniformStream UniformStream::sobol(SobolSampler sampler) {
  UniformStream s;
  s.cursor_ = sampler.cursor();
  s.sampler_ = std::move(sampler);
  return s;
}

void UniformStream::skip_to(std::uint64_t point_index) {
  if (sampler_) sampler_->skip_to(point_index);
  cursor_ = point_index;
}

Matrix UniformStream::next_points(std::size_t n, std::size_t s) {
  if (s == 0) throw std::invalid_argument("next_points: zero dimension");
  Matrix out(n, s);
  if (sampler_) {
    if (s != sampler_->dimension())
      throw std::invalid_argument("next_points: dimension mismatch with sampler");
    for (std::size_t i = 0; i < n; ++i) sampler_->generate(out.row(i));
    cursor_ = sampler_->cursor();
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.row(i);
    for (std::size_t j = 0; j < s; j += 4) {
      auto block = Philox4x64::block({seed_, 0x706f696e74737472ull},
                                     {cursor_ + i, j >> 2, 0, 0});
      for (std::size_t l = 0; l < 4 && j + l < s; ++l)
        row[j + l] = u01_from_bits(block[l]);
    }
  }
  cursor_ += n;
  return out;
}

}  // namespace preqmc
