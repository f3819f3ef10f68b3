#pragma once

#include <complex>
#include <span>
#include <vector>

namespace bsq {

using Complex = std::complex<double>;

/// Unnormalized 2D complex transform pair on an nx-by-ny row-major array.
/// forward: F[k] = sum_x f[x] e^{-i k x}; inverse: f[x] = sum_k F[k] e^{+i k x}.
/// Plans are created once; execution is reentrant.
class Fft2D {
 public:
  Fft2D(int nx, int ny);
  ~Fft2D();
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  int nx() const { return nx_; }
  int ny() const { return ny_; }

  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;

  std::vector<Complex> forward_real(std::span<const double> in) const;
  /// Real part of the inverse transform.
  std::vector<double> inverse_real(std::span<const Complex> in) const;

 private:
  int nx_;
  int ny_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

/// Signed integer wavenumber index for FFT bin i of an n-point transform.
/// The Nyquist bin (n even) maps to -n/2.
inline int wave_index(int i, int n) { return i <= (n - 1) / 2 ? i : i - n; }

}  // namespace bsq
