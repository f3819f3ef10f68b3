#include "bsq/trajectory.hpp"

#include <cmath>
#include <string>

namespace bsq {

std::vector<double> uniform_times(double t0, double dt, int steps) {
  if (!(dt > 0.0) || steps < 0) throw std::invalid_argument("uniform_times needs dt > 0 and steps >= 0");
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) t[k] = t0 + k * dt;
  return t;
}

void check_time_grid(const std::vector<double>& times, std::size_t samples, const char* what) {
  if (times.empty()) throw std::invalid_argument(std::string(what) + ": empty time grid");
  if (times.size() != samples) throw std::invalid_argument(std::string(what) + ": sample count mismatch");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw std::invalid_argument(std::string(what) + ": times not increasing");
}

void check_same_times(const std::vector<double>& a, const std::vector<double>& b, const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": time grids differ in length");
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double tol = 1e-12 * std::max(1.0, std::abs(a[k]));
    if (std::abs(a[k] - b[k]) > tol) throw std::invalid_argument(std::string(what) + ": time grids differ");
  }
}

double uniform_step(const std::vector<double>& times, const char* what) {
  if (times.size() < 2) throw std::invalid_argument(std::string(what) + ": need at least two samples");
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * dt)
      throw std::invalid_argument(std::string(what) + ": time grid is not uniform");
  return dt;
}

FieldTrajectory synthesize_trajectory(const StokesBasis& basis, const VelocityTrajectory& traj) {
  check_time_grid(traj.times, traj.states.size(), "velocity trajectory");
  FieldTrajectory out;
  out.times = traj.times;
  out.fields.reserve(traj.size());
  for (const auto& xi : traj.states) out.fields.push_back(basis.synthesize(xi));
  return out;
}

FieldTrajectory zero_field_trajectory(const StokesBasis& basis, const std::vector<double>& times) {
  FieldTrajectory out;
  out.times = times;
  out.fields.assign(times.size(), basis.make_vector());
  return out;
}

}  // namespace bsq
