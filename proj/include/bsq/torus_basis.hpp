#pragma once

#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "bsq/basis.hpp"
#include "bsq/fft.hpp"

namespace bsq {

struct TorusMode {
  int kx = 0;  // integer lattice indices, canonical half plane
  int ky = 0;
  bool sine = false;
  double wx = 0.0;  // physical wavenumbers 2 pi k / L
  double wy = 0.0;
  double ex = 0.0;  // polarization k-perp / |k|
  double ey = 0.0;
};

class TorusBasis final : public StokesBasis {
 public:
  TorusBasis(const Geometry& geometry, int max_wavenumber, int nx, int ny);

  std::string descriptor(std::size_t j) const override;
  VectorField synthesize(const VelocityCoeffs& xi) const override;
  GradientField synthesize_gradient(const VelocityCoeffs& xi) const override;
  HessianField synthesize_hessian(const VelocityCoeffs& xi) const override;
  ScalarField synthesize_vertical(const VelocityCoeffs& xi) const override;
  VelocityCoeffs project(const VectorField& f) const override;
  VelocityCoeffs project_vertical(const ScalarField& f) const override;
  VectorField scalar_gradient(const ScalarField& f) const override;
  ScalarField divergence(const VectorField& f) const override;
  std::unique_ptr<ScalarInterpolant> interpolant(const ScalarField& f,
                                                 const InterpolationSpec& spec) const override;

  int max_wavenumber() const { return max_wavenumber_; }
  const TorusMode& mode_info(std::size_t j) const { return modes_[j]; }
  /// Closed-form value of w_j at (x, y).
  std::array<double, 2> mode_value(std::size_t j, double x, double y) const;
  const Fft2D& fft() const { return *fft_; }

  /// Spectral derivative d^a/dx^a d^b/dy^b of a grid scalar (Nyquist bins dropped).
  ScalarField derivative(const ScalarField& f, int a, int b) const;

 private:
  std::vector<Complex> spectrum(const VelocityCoeffs& xi, int component, int dx, int dy) const;
  ScalarField to_field(std::span<const Complex> spec) const;
  std::pair<ScalarField, ScalarField> to_fields(std::vector<Complex> a, const std::vector<Complex>& b) const;
  std::vector<Complex> derivative_spectrum(const std::vector<Complex>& spec, int a, int b) const;
  std::size_t bin(int kx, int ky) const;

  int max_wavenumber_;
  double norm_;  // sqrt(2 / area)
  std::vector<TorusMode> modes_;
  std::vector<std::pair<std::size_t, std::size_t>> bins_;  // FFT bins of +k and -k per mode
  std::unique_ptr<Fft2D> fft_;
};

}  // namespace bsq
