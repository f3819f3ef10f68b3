#pragma once

#include <array>
#include <memory>
#include <vector>

#include "bsq/basis.hpp"
#include "bsq/fft.hpp"

namespace bsq {

/// One channel mode: streamfunction psi = p(y) T(k x) with T = cos or sin,
/// u = (d psi/dy, -d psi/dx). For k = 0 the mode is the shear flow (U(y), 0)
/// and p' = U.
struct ChannelMode {
  int kx = 0;
  int n = 0;  // index within its wavenumber, starting at 1
  bool sine = false;
  double k = 0.0;
  double lambda = 0.0;
  /// profile[d][j] = d-th y-derivative of p at node j (d = 0..3); profile[0] is unused for k = 0.
  std::array<std::vector<double>, 4> profile;
};

/// Eigenpairs of one 1D Stokes problem at physical wavenumber k on y in [0, 1].
struct ChannelEigenpairs {
  std::vector<double> lambda;
  std::vector<std::array<std::vector<double>, 4>> profiles;
  std::vector<std::string> rejected;
};

/// Solves the per-wavenumber clamped streamfunction problem (k != 0) or the
/// Dirichlet shear problem (k == 0) by Chebyshev collocation on ny + 1 Lobatto
/// nodes, returning the lowest `count` eigenpairs that pass the residual and
/// resolution gates. Profiles are unnormalized.
ChannelEigenpairs solve_channel_eigenproblem(double k, int ny, int count);

class ChannelBasis final : public StokesBasis {
 public:
  ChannelBasis(const Geometry& geometry, int kx_max, int nx, int ny, int modes_per_k);

  std::string descriptor(std::size_t j) const override;
  VectorField synthesize(const VelocityCoeffs& xi) const override;
  GradientField synthesize_gradient(const VelocityCoeffs& xi) const override;
  HessianField synthesize_hessian(const VelocityCoeffs& xi) const override;
  ScalarField synthesize_vertical(const VelocityCoeffs& xi) const override;
  VelocityCoeffs project(const VectorField& f) const override;
  VectorField scalar_gradient(const ScalarField& f) const override;
  ScalarField divergence(const VectorField& f) const override;
  std::unique_ptr<ScalarInterpolant> interpolant(const ScalarField& f,
                                                 const InterpolationSpec& spec) const override;

  const ChannelMode& mode_info(std::size_t j) const { return modes_[j]; }
  int kx_max() const { return kx_max_; }
  int vertical_intervals() const { return grid_.ny - 1; }

  ScalarField derivative_x(const ScalarField& f) const;
  ScalarField derivative_y(const ScalarField& f) const;

 private:
  /// d^a/dx^a d^b/dy^b of velocity component `component` (0 = x, 1 = y).
  ScalarField accumulate(const VelocityCoeffs& xi, int component, int a, int b) const;

  int kx_max_;
  std::vector<ChannelMode> modes_;
  std::vector<std::vector<double>> cos_table_;  // [kx][i]
  std::vector<std::vector<double>> sin_table_;
  Eigen::MatrixXd dy_;  // d/dy on the vertical nodes
  std::unique_ptr<Fft2D> fft_x_;
};

}  // namespace bsq
