#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

#include "bsq/field.hpp"
#include "bsq/geometry.hpp"
#include "bsq/interpolation.hpp"

namespace bsq {

/// Coefficients in the Stokes eigenbasis: u = sum_j xi_j w_j.
using VelocityCoeffs = Eigen::VectorXd;

/// Verification summary produced when a basis is built.
struct BasisReport {
  double orthonormality_error = 0.0;  // max |(w_i, w_j) - delta_ij|
  double eigen_residual = 0.0;        // max_j ||P_m P(-Lap w_j) - lambda_j w_j||
  double divergence_max = 0.0;        // max_j ||div w_j||_L2
  double wall_max = 0.0;              // max |w_j| on wall nodes (channel only)
  std::vector<std::string> rejected;  // modes dropped by the residual gate
};

/// Ordered Stokes eigenpairs for one geometry together with the collocation
/// grid and transforms. Instances are immutable after construction and all
/// member functions are reentrant.
class StokesBasis {
 public:
  virtual ~StokesBasis() = default;

  const Geometry& geometry() const { return geometry_; }
  const Grid& grid() const { return grid_; }
  std::size_t size() const { return static_cast<std::size_t>(eigenvalues_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  virtual std::string descriptor(std::size_t j) const = 0;

  virtual VectorField synthesize(const VelocityCoeffs& xi) const = 0;
  virtual GradientField synthesize_gradient(const VelocityCoeffs& xi) const = 0;
  virtual HessianField synthesize_hessian(const VelocityCoeffs& xi) const = 0;
  /// Vertical component only.
  virtual ScalarField synthesize_vertical(const VelocityCoeffs& xi) const { return synthesize(xi).y; }

  /// P_m P: Leray projection followed by truncation to the retained modes.
  virtual VelocityCoeffs project(const VectorField& f) const = 0;
  /// P_m P(f e_2).
  virtual VelocityCoeffs project_vertical(const ScalarField& f) const;

  virtual VectorField scalar_gradient(const ScalarField& f) const = 0;
  virtual ScalarField divergence(const VectorField& f) const = 0;

  virtual std::unique_ptr<ScalarInterpolant> interpolant(const ScalarField& f,
                                                         const InterpolationSpec& spec) const = 0;

  VectorField mode(std::size_t j) const;

  double integrate(const ScalarField& f) const;
  double inner(const ScalarField& a, const ScalarField& b) const;
  double inner(const VectorField& a, const VectorField& b) const;
  double norm(const ScalarField& f) const { return std::sqrt(inner(f, f)); }
  double norm(const VectorField& f) const { return std::sqrt(inner(f, f)); }
  /// (integral |f|^p)^(1/p); p = infinity gives max |f|.
  double lp_norm(const ScalarField& f, double p) const;

  ScalarField make_scalar(double fill = 0.0) const { return ScalarField(grid_.nx, grid_.ny, fill); }
  VectorField make_vector() const { return VectorField(grid_.nx, grid_.ny); }

  void check_coeffs(const VelocityCoeffs& xi) const;
  void check_field(const ScalarField& f) const;

  /// Recomputes orthonormality, eigen-residual, divergence and wall checks.
  BasisReport verify() const;
  const std::vector<std::string>& rejected_modes() const { return rejected_; }

 protected:
  StokesBasis(Geometry g, Grid grid) : geometry_(g), grid_(std::move(grid)) {}

  Geometry geometry_;
  Grid grid_;
  Eigen::VectorXd eigenvalues_;
  std::vector<std::string> rejected_;
};

using BasisPtr = std::shared_ptr<const StokesBasis>;

/// Periodic basis: every lattice vector k != 0 with |k| <= max_wavenumber
/// (one per +/- pair) contributes a cosine and a sine mode polarized along
/// k-perp. Requires nx, ny > 3 * max_wavenumber so that quadratic products
/// of retained modes project without aliasing.
BasisPtr build_torus_basis(const Geometry& geometry, int max_wavenumber, int nx, int ny);

/// Channel basis: shear modes for k = 0 and the lowest modes_per_k eigenpairs
/// of the clamped fourth-order streamfunction problem for 0 < k <= kx_max.
/// The vertical grid has ny + 1 Chebyshev-Gauss-Lobatto nodes.
BasisPtr build_channel_basis(const Geometry& geometry, int kx_max, int nx, int ny, int modes_per_k);

/// Coefficient-space norms: ||u||, ||grad u||, ||A u||.
double l2_norm(const VelocityCoeffs& xi);
double v_norm(const StokesBasis& basis, const VelocityCoeffs& xi);
double da_norm(const StokesBasis& basis, const VelocityCoeffs& xi);

}  // namespace bsq
