#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace preqmc {

// Iterative radix-2 complex FFT with precomputed twiddles and bit-reversal.
class Radix2FFT {
 public:
  explicit Radix2FFT(std::size_t n);  // n must be a power of two
  std::size_t size() const { return n_; }
  void forward(std::complex<double>* a) const;  // unscaled
  void inverse(std::complex<double>* a) const;  // scaled by 1/n

 private:
  template <bool Inv>
  void run(std::complex<double>* a) const;
  std::size_t n_ = 0;
  std::vector<std::complex<double>> tw_;   // e^{-2 pi i k / n}, k < n/2
  std::vector<std::uint32_t> rev_;
};

// Arbitrary-length DFT via Bluestein's chirp-z reduction to a power-of-two
// convolution. Supports inputs shorter than the transform length (zero
// padding), which keeps the convolution size down. Instances hold only
// read-only tables; callers pass scratch so one instance can serve many
// threads.
class BluesteinDFT {
 public:
  BluesteinDFT(std::size_t n, std::size_t in_len);
  std::size_t length() const { return n_; }
  // out[l] = sum_{k < in_len} a[k] e^{-2 pi i k l / n}, l = 0..n-1
  void forward(const std::complex<double>* a, std::complex<double>* out,
               std::vector<std::complex<double>>& work) const;

 private:
  std::size_t n_ = 0, in_len_ = 0;
  Radix2FFT fft_;
  std::vector<std::complex<double>> chirp_;      // e^{-i pi k^2 / n}
  std::vector<std::complex<double>> kernel_fft_; // FFT of the chirp kernel
};

// Per-caller workspace for OddSineTransform::apply.
struct FstScratch {
  std::vector<std::complex<double>> in, out, conv;
};

// S(l) = sum_{k=1}^{d} b_k sin((2k-1) l pi / (2d+1)), l = 1..d.
// This is the frequency pattern of the Brownian covariance eigenvectors;
// evaluated in O(d log d) through a length-(2d+1) DFT. Immutable after
// construction; safe to share across threads with per-thread scratch.
class OddSineTransform {
 public:
  explicit OddSineTransform(std::size_t d);
  std::size_t dim() const { return d_; }
  void apply(const double* b, double* out, FstScratch& scratch) const;
  void apply(const double* b, double* out) const;  // allocates its own scratch

 private:
  std::size_t d_ = 0;
  BluesteinDFT dft_;
  std::vector<std::complex<double>> phase_;  // e^{-i pi l / (2d+1)}
};

}  // namespace preqmc
