#pragma once

#include <vector>

#include "bsq/basis.hpp"
#include "bsq/interpolation.hpp"
#include "bsq/trajectory.hpp"

namespace bsq {

struct TransportConfig {
  InterpolationSpec interpolation;
  /// RK2 sub-steps used to trace each characteristic over one time step.
  int substeps = 1;
};

/// Raised when a characteristic foot leaves the channel by more than one cell.
class CharacteristicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Departure points of the grid nodes for one step: X' = v(X, t) traced
/// backwards over dt with RK2 in the linearly time-interpolated field.
class CharacteristicMap {
 public:
  CharacteristicMap(const StokesBasis& basis, const VectorField& v_start, const VectorField& v_end, double dt,
                    const TransportConfig& config);

  /// f evaluated at the feet.
  ScalarField departure(const ScalarField& f) const;

  bool identity() const { return identity_; }
  int clamped() const { return clamped_; }
  double max_offset() const { return max_offset_; }
  const std::vector<double>& foot_x() const { return fx_; }
  const std::vector<double>& foot_y() const { return fy_; }

 private:
  const StokesBasis* basis_;
  TransportConfig config_;
  bool identity_ = false;
  int clamped_ = 0;
  double max_offset_ = 0.0;
  std::vector<double> fx_, fy_;
};

/// theta(t + dt) = theta(foot) - dt/2 (u2_end(x) + u2_start(foot)).
ScalarField advect_step(const StokesBasis& basis, const ScalarField& theta, const VectorField& v_start,
                        const VectorField& v_end, const ScalarField& u2_start, const ScalarField& u2_end, double dt,
                        const TransportConfig& config = {});

/// Same as advect_step with precomputed feet.
ScalarField advect_step(const CharacteristicMap& map, const ScalarField& theta, const ScalarField& u2_start,
                        const ScalarField& u2_end, double dt);

/// theta_t = -v . grad theta - u2 on the grid.
ScalarField transport_rate(const StokesBasis& basis, const ScalarField& theta, const VectorField& v,
                           const ScalarField& u2);

/// Marches advect_step over the common grid of v and u, recording theta_t.
ScalarTrajectory solve_transport(const StokesBasis& basis, const FieldTrajectory& v, const VelocityTrajectory& u,
                                 const ScalarField& theta0, const TransportConfig& config = {});

/// Growth audit of the density gradient and time derivative.
struct GrowthAudit {
  std::vector<double> times;
  std::vector<double> grad_theta;   // ||grad theta(t)||
  std::vector<double> base;         // ||theta0||_H1 + int_0^t ||u||_H1
  std::vector<double> stretch;      // int_0^t ||v||_W1inf
  double fitted_c = 0.0;            // smallest C with grad_theta <= base * exp(C * stretch)
  std::vector<double> theta_t;      // ||theta_t(t)||
  std::vector<double> theta_t_rhs;  // ||u|| + ||v||_inf ||grad theta||
  double theta_t_c = 0.0;           // max theta_t / theta_t_rhs
};

GrowthAudit gradient_growth_audit(const StokesBasis& basis, const ScalarTrajectory& theta,
                                  const VelocityTrajectory& u, const FieldTrajectory& v);

/// max |v| + max |grad v| on the grid.
double w1inf_norm(const StokesBasis& basis, const VectorField& v);

}  // namespace bsq
