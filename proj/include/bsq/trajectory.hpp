#pragma once

#include <stdexcept>
#include <vector>

#include "bsq/basis.hpp"
#include "bsq/field.hpp"

namespace bsq {

/// Galerkin velocity samples; rates[k] holds d(xi)/dt at times[k] when recorded.
struct VelocityTrajectory {
  std::vector<double> times;
  std::vector<VelocityCoeffs> states;
  std::vector<VelocityCoeffs> rates;

  std::size_t size() const { return times.size(); }
};

/// Grid scalar samples; rates[k] holds theta_t at times[k] when recorded.
struct ScalarTrajectory {
  std::vector<double> times;
  std::vector<ScalarField> states;
  std::vector<ScalarField> rates;

  std::size_t size() const { return times.size(); }
};

/// Grid velocity samples used as an advecting field.
struct FieldTrajectory {
  std::vector<double> times;
  std::vector<VectorField> fields;

  std::size_t size() const { return times.size(); }
};

/// times[k] = t0 + k * dt, k = 0..steps.
std::vector<double> uniform_times(double t0, double dt, int steps);

/// Rejects empty, non-increasing, or length-mismatched samples.
void check_time_grid(const std::vector<double>& times, std::size_t samples, const char* what);
/// Rejects two grids that differ by more than roundoff.
void check_same_times(const std::vector<double>& a, const std::vector<double>& b, const char* what);

/// Step of a uniform grid with at least two samples; throws otherwise.
double uniform_step(const std::vector<double>& times, const char* what);

FieldTrajectory synthesize_trajectory(const StokesBasis& basis, const VelocityTrajectory& traj);
/// Zero advecting field on the given time grid.
FieldTrajectory zero_field_trajectory(const StokesBasis& basis, const std::vector<double>& times);

}  // namespace bsq
