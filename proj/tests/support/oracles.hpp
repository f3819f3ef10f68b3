#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "bsq/field.hpp"

namespace oracle {

/// Lowest `count` eigenvalues of (D^2 - k^2)^2 phi = lambda (k^2 - D^2) phi on
/// (0, 1) with phi = phi' = 0 at both ends, by second-order finite differences
/// on n interior nodes.
std::vector<double> channel_eigenvalues_fd(double k, int n, int count);

/// Richardson extrapolation of the finite-difference eigenvalues over n, 2n, 4n.
std::vector<double> channel_eigenvalues_extrapolated(double k, int n, int count);

/// Exact solution of xi' = -M xi + eta (constant M, eta) at time t by a matrix exponential.
Eigen::VectorXd frozen_linear_solution(const Eigen::MatrixXd& m, const Eigen::VectorXd& eta,
                                       const Eigen::VectorXd& xi0, double t);

/// Direct pseudo-spectral solver for the vorticity form of the shifted
/// Boussinesq system on the 2pi torus with IMEX ARS(2,2,2) time stepping.
/// Vorticity is kept on the disk |k| <= max_wavenumber; the density uses the
/// 2/3 rule. Returns the velocity grid fields at every step.
struct ImexResult {
  std::vector<double> times;
  std::vector<bsq::VectorField> velocity;
  std::vector<bsq::ScalarField> theta;
};
ImexResult imex_boussinesq(const bsq::VectorField& u0, const bsq::ScalarField& theta0, int max_wavenumber,
                           double dt, int steps);

/// Integral of |f|^p over [0, lx) x [0, ly) for a smooth periodic f by
/// trapezoid refinement until successive levels agree to rel_tol.
double periodic_lp_integral(const std::function<double(double, double)>& f, double lx, double ly, double p,
                            double rel_tol = 1e-14);

}  // namespace oracle
