#include "bsq/linear_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace bsq {

namespace {

// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2, by series near 0.
double phi1(double z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
  return std::expm1(z) / z;
}

double phi2(double z) {
  if (std::abs(z) < 0.2) {
    double term = 0.5, sum = 0.5;
    for (int k = 3; k < 20; ++k) {
      term *= z / k;
      sum += term;
    }
    return sum;
  }
  return (std::expm1(z) - z) / (z * z);
}

}  // namespace

LinearStepper::LinearStepper(const Eigen::VectorXd& eigenvalues, double dt) : dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const Eigen::Index m = eigenvalues.size();
  half_.resize(m);
  full_.resize(m);
  stage_.resize(m);
  b1_.resize(m);
  b2_.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double z = -dt * eigenvalues[j];
    half_[j] = std::exp(0.5 * z);
    full_[j] = std::exp(z);
    stage_[j] = 0.5 * dt * phi1(0.5 * z);
    b1_[j] = dt * (phi1(z) - 2.0 * phi2(z));
    b2_[j] = 2.0 * dt * phi2(z);
  }
}

VelocityCoeffs step_linear(const StokesBasis& basis, const VelocityCoeffs& xi, const AdvectionMatrix& beta_mid,
                           const VelocityCoeffs& eta_mid, double dt) {
  basis.check_coeffs(xi);
  basis.check_coeffs(eta_mid);
  const auto m = static_cast<Eigen::Index>(basis.size());
  if (beta_mid.beta.rows() != m || beta_mid.beta.cols() != m)
    throw std::invalid_argument("advection matrix does not match basis size");
  return LinearStepper(basis.eigenvalues(), dt).step(xi, beta_mid, eta_mid);
}

VelocityTrajectory solve_linear_nse(const StokesBasis& basis, const FieldTrajectory& v,
                                    const ScalarTrajectory& theta, const VelocityCoeffs& xi0) {
  basis.check_coeffs(xi0);
  check_time_grid(theta.times, theta.states.size(), "density trajectory");
  check_time_grid(v.times, v.fields.size(), "advecting velocity");
  check_same_times(v.times, theta.times, "solve_linear_nse");
  if (!xi0.allFinite()) throw std::invalid_argument("initial coefficients are not finite");

  const std::size_t n = theta.size();
  VelocityTrajectory out;
  out.times = theta.times;
  out.states.reserve(n);
  out.rates.reserve(n);
  out.states.push_back(xi0);

  std::vector<VelocityCoeffs> eta(n);
  for (std::size_t k = 0; k < n; ++k) eta[k] = assemble_buoyancy(basis, theta.states[k]);
  const Eigen::VectorXd& lambda = basis.eigenvalues();

  auto rate = [&](std::size_t k, const VelocityCoeffs& xi, const AdvectionOperator& op) {
    return VelocityCoeffs(eta[k] - lambda.cwiseProduct(xi) - op.apply(xi));
  };

  if (n == 1) {
    out.rates.push_back(rate(0, xi0, AdvectionOperator(basis, v.fields[0])));
    return out;
  }
  const double dt = uniform_step(theta.times, "solve_linear_nse");
  const LinearStepper stepper(lambda, dt);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const AdvectionOperator node(basis, v.fields[k]);
    const VelocityCoeffs& xi = out.states[k];
    const VelocityCoeffs beta_xi = node.apply(xi);
    out.rates.push_back(eta[k] - lambda.cwiseProduct(xi) - beta_xi);

    VectorField vmid = v.fields[k];
    vmid += v.fields[k + 1];
    vmid *= 0.5;
    const AdvectionOperator mid(basis, std::move(vmid));
    const VelocityCoeffs eta_mid = 0.5 * (eta[k] + eta[k + 1]);
    out.states.push_back(stepper.step(xi, mid, eta_mid));
  }
  out.rates.push_back(rate(n - 1, out.states.back(), AdvectionOperator(basis, v.fields.back())));
  return out;
}

}  // namespace bsq
