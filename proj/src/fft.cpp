#include "bsq/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace bsq {
namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(const Complex* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<Complex*>(p));
}
}  // namespace

Fft2D::Fft2D(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx <= 0 || ny <= 0) throw std::invalid_argument("Fft2D: sizes must be positive");
  std::vector<Complex> a(static_cast<std::size_t>(nx) * ny), b(a.size());
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_2d(nx, ny, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_dft_2d(nx, ny, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
  if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("Fft2D: FFTW planning failed");
}

Fft2D::~Fft2D() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void Fft2D::forward(std::span<const Complex> in, std::span<Complex> out) const {
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(in.data()), as_fftw(out.data()));
}

void Fft2D::inverse(std::span<const Complex> in, std::span<Complex> out) const {
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(in.data()), as_fftw(out.data()));
}

std::vector<Complex> Fft2D::forward_real(std::span<const double> in) const {
  std::vector<Complex> a(in.begin(), in.end()), b(a.size());
  forward(a, b);
  return b;
}

std::vector<double> Fft2D::inverse_real(std::span<const Complex> in) const {
  std::vector<Complex> b(in.size());
  inverse(in, b);
  std::vector<double> r(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) r[k] = b[k].real();
  return r;
}

}  // namespace bsq
