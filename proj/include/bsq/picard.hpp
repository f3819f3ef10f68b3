#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsq/basis.hpp"
#include "bsq/trajectory.hpp"
#include "bsq/transport.hpp"

namespace bsq {

enum class CouplingMode { co_timestep, alternating };

std::string to_string(CouplingMode m);
CouplingMode coupling_mode_from_string(const std::string& s);

struct PicardConfig {
  double dt = 1e-3;
  /// Outer stopping tolerance relative to the window's initial-data norm.
  double tol = 1e-8;
  int n_max = 40;
  double window_max = 0.4;
  /// Two consecutive ratios above this trigger a window bisection.
  double ratio_threshold = 0.9;
  int max_bisections = 6;
  CouplingMode coupling = CouplingMode::co_timestep;
  /// Buoyancy/forcing coupling sweeps per co-timestep.
  int coupling_iterations = 2;
  /// Inner fixed-point limits for the alternating mode.
  int inner_max = 40;
  double inner_tol = 1e-10;
  TransportConfig transport;

  void validate() const;
};

struct BoussinesqState {
  VelocityCoeffs xi;
  ScalarField theta;
  double time = 0.0;
};

/// Velocity and density on a common uniform time grid.
struct WindowSolution {
  VelocityTrajectory u;
  ScalarTrajectory theta;

  BoussinesqState state(std::size_t k) const { return {u.states.at(k), theta.states.at(k), u.times.at(k)}; }
  BoussinesqState final_state() const { return state(u.size() - 1); }
};

/// Difference norms between successive iterates over one window.
struct PicardIteration {
  int n = 0;
  double grad_sup = 0.0;   // sup_t ||grad (u^n - u^{n-1})||
  double theta_sup = 0.0;  // sup_t ||theta^n - theta^{n-1}||
  double au_l2 = 0.0;      // (int_t ||A (u^n - u^{n-1})||^2)^(1/2)
  double composite = 0.0;
  /// composite(n) / composite(n - 1); 0 for n = 1 or a zero denominator.
  double ratio = 0.0;
  /// Uniform bounds of the iterate itself.
  double u_sup = 0.0, grad_u_sup = 0.0, au_iterate_l2 = 0.0, theta_l3_sup = 0.0;
  /// Alternating mode only: inner fixed-point data.
  int inner_iterations = 0;
  double inner_velocity_ratio = 0.0;
  double inner_density_ratio = 0.0;
};

struct PicardReport {
  double t_start = 0.0;
  double window = 0.0;
  int bisections = 0;
  bool converged = false;
  double data_norm = 0.0;
  double threshold = 0.0;  // absolute stopping threshold tol * data_norm
  std::vector<PicardIteration> iterations;
  /// Windows abandoned by bisection, with the ratios observed on them.
  std::vector<double> abandoned_windows;
  std::vector<std::vector<double>> abandoned_ratios;

  /// Contraction ratio r_n = composite(n + 1) / composite(n); n >= 1.
  double ratio(int n) const;
  double max_ratio() const;
};

class NonconvergenceError : public std::runtime_error {
 public:
  NonconvergenceError(const std::string& what, PicardReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const PicardReport& report() const { return report_; }

 private:
  PicardReport report_;
};

/// sqrt(||u||_D(A)^2 + ||theta||_H1^2).
double data_norm(const StokesBasis& basis, const BoussinesqState& state);

/// Advection-free coupled linear problem on [t0, t0 + steps * dt].
WindowSolution solve_base_case(const StokesBasis& basis, const BoussinesqState& state0, int steps,
                               const PicardConfig& config);

/// One linearized iterate with advecting velocity v sampled on the window grid.
WindowSolution picard_step(const StokesBasis& basis, const FieldTrajectory& v, const BoussinesqState& state0,
                           const PicardConfig& config, PicardIteration* inner = nullptr);

struct WindowResult {
  WindowSolution solution;
  PicardReport report;
};

/// Picard iteration on one window of length <= window; the window is halved
/// when contraction fails. `guess` replaces the base case as iterate 0.
WindowResult solve_window(const StokesBasis& basis, const BoussinesqState& state0, double window,
                          const PicardConfig& config, const VelocityTrajectory* guess = nullptr);

using WindowObserver = std::function<void(const WindowSolution&, const PicardReport&)>;

struct BoussinesqResult {
  BoussinesqState final_state;
  std::vector<PicardReport> reports;
};

/// Chains windows up to `horizon`; every completed window is passed to the
/// observer. On nonconvergence the error carries the failing window's report
/// and the observer has seen all earlier windows.
BoussinesqResult solve_boussinesq(const StokesBasis& basis, const BoussinesqState& state0, double horizon,
                                  const PicardConfig& config, const WindowObserver& observer = {});

/// xi' = eta(theta) - Lambda xi - beta(v) xi at one instant.
VelocityCoeffs velocity_rate(const StokesBasis& basis, const VelocityCoeffs& xi, const ScalarField& theta,
                             const VectorField& v);

}  // namespace bsq
