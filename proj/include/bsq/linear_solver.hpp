#pragma once

#include <Eigen/Dense>

#include "bsq/advection.hpp"
#include "bsq/basis.hpp"
#include "bsq/trajectory.hpp"

namespace bsq {

/// Exponential Runge-Kutta stepper (midpoint stage, phi-function weights) for
/// xi' + (Lambda + beta) xi = eta with beta and eta frozen over the step. The
/// Stokes part is integrated exactly, constant forcing is integrated exactly,
/// and beta enters at second order.
class LinearStepper {
 public:
  LinearStepper(const Eigen::VectorXd& eigenvalues, double dt);

  double dt() const { return dt_; }

  /// `beta` is any object with apply(xi) returning beta * xi (AdvectionMatrix
  /// or AdvectionOperator).
  template <class Beta>
  VelocityCoeffs step(const VelocityCoeffs& xi, const Beta& beta, const VelocityCoeffs& eta) const {
    return step_with(xi, beta.apply(xi), beta, eta);
  }

  /// Same as step() when beta_xi == beta.apply(xi); lets callers reuse it.
  template <class Beta>
  VelocityCoeffs step_with(const VelocityCoeffs& xi, const VelocityCoeffs& beta_xi, const Beta& beta,
                           const VelocityCoeffs& eta) const {
    const VelocityCoeffs n0 = eta - beta_xi;
    const VelocityCoeffs half = half_.cwiseProduct(xi) + stage_.cwiseProduct(n0);
    return full_.cwiseProduct(xi) + b1_.cwiseProduct(n0) + b2_.cwiseProduct(eta - beta.apply(half));
  }

 private:
  double dt_;
  Eigen::VectorXd half_;   // exp(-lambda dt / 2)
  Eigen::VectorXd full_;   // exp(-lambda dt)
  Eigen::VectorXd stage_;  // dt/2 phi1(-lambda dt/2)
  Eigen::VectorXd b1_;     // dt (phi1 - 2 phi2)(-lambda dt)
  Eigen::VectorXd b2_;     // 2 dt phi2(-lambda dt)
};

struct ZeroAdvection {
  VelocityCoeffs apply(const VelocityCoeffs& xi) const { return VelocityCoeffs::Zero(xi.size()); }
};

/// One step of xi' + (Lambda + beta) xi = eta with frozen beta_mid, eta_mid.
VelocityCoeffs step_linear(const StokesBasis& basis, const VelocityCoeffs& xi, const AdvectionMatrix& beta_mid,
                           const VelocityCoeffs& eta_mid, double dt);

/// Galerkin solution of the linearized momentum equation with advecting
/// velocity v and buoyancy theta sampled on a common uniform grid. beta and
/// eta are taken at step midpoints by linear interpolation of the samples.
/// Rates xi' = eta - Lambda xi - beta xi are recorded at every sample.
VelocityTrajectory solve_linear_nse(const StokesBasis& basis, const FieldTrajectory& v,
                                    const ScalarTrajectory& theta, const VelocityCoeffs& xi0);

}  // namespace bsq
