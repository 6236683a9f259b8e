#include "preqmc/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace preqmc {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

Radix2FFT::Radix2FFT(std::size_t n) : n_(n) {
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("Radix2FFT: size must be a power of two");
  tw_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    double ang = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    tw_[k] = {std::cos(ang), std::sin(ang)};
  }
  rev_.resize(n);
  std::uint32_t bits = 0;
  while ((1u << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t r = 0;
    for (std::uint32_t b = 0; b < bits; ++b)
      r |= ((i >> b) & 1u) << (bits - 1 - b);
    rev_[i] = r;
  }
}

// The butterflies work on raw real/imag pairs ([complex.numbers.general]
// guarantees the layout) so the compiler emits plain mul/add instead of the
// NaN-propagating __muldc3 runtime call.
template <bool Inv>
void Radix2FFT::run(std::complex<double>* ac) const {
  double* a = reinterpret_cast<double*>(ac);
  for (std::size_t i = 0; i < n_; ++i) {
    std::size_t r = rev_[i];
    if (i < r) {
      std::swap(a[2 * i], a[2 * r]);
      std::swap(a[2 * i + 1], a[2 * r + 1]);
    }
  }
  if (n_ >= 2) {
    for (std::size_t i = 0; i < 2 * n_; i += 4) {  // len == 2, twiddle is 1
      double ur = a[i], ui = a[i + 1], vr = a[i + 2], vi = a[i + 3];
      a[i] = ur + vr;
      a[i + 1] = ui + vi;
      a[i + 2] = ur - vr;
      a[i + 3] = ui - vi;
    }
  }
  const double* tw = reinterpret_cast<const double*>(tw_.data());
  for (std::size_t len = 4; len <= n_; len <<= 1) {
    const std::size_t half = len >> 1, step = n_ / len;
    for (std::size_t base = 0; base < n_; base += len) {
      double* u = a + 2 * base;
      double* v = u + len;  // == 2 * half doubles further on
      for (std::size_t k = 0; k < half; ++k) {
        const double wr = tw[2 * k * step];
        const double wi = Inv ? -tw[2 * k * step + 1] : tw[2 * k * step + 1];
        const double xr = v[2 * k], xi = v[2 * k + 1];
        const double tr = xr * wr - xi * wi;
        const double ti = xr * wi + xi * wr;
        const double ur = u[2 * k], ui = u[2 * k + 1];
        u[2 * k] = ur + tr;
        u[2 * k + 1] = ui + ti;
        v[2 * k] = ur - tr;
        v[2 * k + 1] = ui - ti;
      }
    }
  }
  if (Inv) {
    const double s = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < 2 * n_; ++i) a[i] *= s;
  }
}

void Radix2FFT::forward(std::complex<double>* a) const { run<false>(a); }
void Radix2FFT::inverse(std::complex<double>* a) const { run<true>(a); }

BluesteinDFT::BluesteinDFT(std::size_t n, std::size_t in_len)
    : n_(n), in_len_(in_len), fft_(next_pow2(n + in_len - 1)) {
  if (n == 0 || in_len == 0 || in_len > n)
    throw std::invalid_argument("BluesteinDFT: bad lengths");
  chirp_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // pi k^2 / n reduced mod 2 pi exactly in integers
    std::uint64_t m = (static_cast<std::uint64_t>(k) * k) % (2 * n);
    double ang = -kPi * static_cast<double>(m) / static_cast<double>(n);
    chirp_[k] = {std::cos(ang), std::sin(ang)};
  }
  std::size_t p = fft_.size();
  kernel_fft_.assign(p, {0.0, 0.0});
  // kernel b_j = conj(chirp_|j|): indices -(in_len-1)..(n-1) wrapped mod p
  for (std::size_t j = 0; j < n; ++j) kernel_fft_[j] = std::conj(chirp_[j]);
  for (std::size_t j = 1; j < in_len; ++j) kernel_fft_[p - j] = std::conj(chirp_[j]);
  fft_.forward(kernel_fft_.data());
}

void BluesteinDFT::forward(const std::complex<double>* a,
                           std::complex<double>* out,
                           std::vector<std::complex<double>>& work) const {
  std::size_t p = fft_.size();
  work.resize(p);
  double* w = reinterpret_cast<double*>(work.data());
  const double* av = reinterpret_cast<const double*>(a);
  const double* ch = reinterpret_cast<const double*>(chirp_.data());
  for (std::size_t k = 0; k < 2 * in_len_; k += 2) {
    w[k] = av[k] * ch[k] - av[k + 1] * ch[k + 1];
    w[k + 1] = av[k] * ch[k + 1] + av[k + 1] * ch[k];
  }
  for (std::size_t k = 2 * in_len_; k < 2 * p; ++k) w[k] = 0.0;
  fft_.forward(work.data());
  const double* kf = reinterpret_cast<const double*>(kernel_fft_.data());
  for (std::size_t k = 0; k < 2 * p; k += 2) {
    const double wr = w[k], wi = w[k + 1];
    w[k] = wr * kf[k] - wi * kf[k + 1];
    w[k + 1] = wr * kf[k + 1] + wi * kf[k];
  }
  fft_.inverse(work.data());
  double* ov = reinterpret_cast<double*>(out);
  for (std::size_t l = 0; l < 2 * n_; l += 2) {
    ov[l] = w[l] * ch[l] - w[l + 1] * ch[l + 1];
    ov[l + 1] = w[l] * ch[l + 1] + w[l + 1] * ch[l];
  }
}

OddSineTransform::OddSineTransform(std::size_t d)
    : d_(d), dft_(2 * d + 1, d) {
  if (d == 0) throw std::invalid_argument("OddSineTransform: d must be >= 1");
  std::size_t n = 2 * d + 1;
  phase_.resize(d + 1);
  for (std::size_t l = 1; l <= d; ++l) {
    double ang = -kPi * static_cast<double>(l) / static_cast<double>(n);
    phase_[l] = {std::cos(ang), std::sin(ang)};
  }
}

void OddSineTransform::apply(const double* b, double* out,
                             FstScratch& scratch) const {
  // sum_k b_k sin((2k-1) l pi / n) = -Im(e^{-i pi l / n} X(l)) with
  // X(l) = sum_{k=0}^{d-1} b_{k+1} e^{-2 pi i k l / n}, n = 2d+1.
  scratch.in.resize(d_);
  scratch.out.resize(2 * d_ + 1);
  for (std::size_t k = 0; k < d_; ++k) scratch.in[k] = {b[k], 0.0};
  dft_.forward(scratch.in.data(), scratch.out.data(), scratch.conv);
  const double* ph = reinterpret_cast<const double*>(phase_.data());
  const double* xv = reinterpret_cast<const double*>(scratch.out.data());
  for (std::size_t l = 1; l <= d_; ++l)
    out[l - 1] = -(ph[2 * l] * xv[2 * l + 1] + ph[2 * l + 1] * xv[2 * l]);
}

void OddSineTransform::apply(const double* b, double* out) const {
  FstScratch scratch;
  apply(b, out, scratch);
}

}  // namespace preqmc
