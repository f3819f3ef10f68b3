#pragma once

#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "bsq/basis.hpp"
#include "bsq/picard.hpp"
#include "bsq/transport.hpp"

namespace bsq {

/// Rigid rotation of a Gaussian bump about the center of the 2pi torus. The
/// rotating streamfunction is cut off smoothly between window_inner and
/// window_outer so the field stays periodic; the bump never leaves the rigid core.
struct RotationSetup {
  double omega = 1.0;
  double t_end = 0.5 * std::numbers::pi;
  int steps = 8;
  double sigma = 0.4;
  double offset = 0.4;
  double window_inner = 2.6;
  double window_outer = 3.1;
  TransportConfig transport{{InterpolationKind::lagrange, 4, false, -1.0}, 16};
};

struct RotationResult {
  int n = 0;
  double linf_error = 0.0;
  double l2_initial = 0.0;
  double l2_final = 0.0;
  double l2_drift = 0.0;  // |l2_final / l2_initial - 1|
};

/// Transport on an n x n grid with zero forcing, compared against the exact rotated bump.
RotationResult rotation_transport(int n, const RotationSetup& setup = {});

/// Rotating velocity field sampled on a grid.
VectorField rotation_velocity(const Grid& grid, const RotationSetup& setup);

struct ContractionRow {
  double window = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_ratio = 0.0;  // over r_n with n >= 1
  std::vector<double> ratios;
  std::string error;
};

/// First-window Picard iteration at each fixed window length (no bisection).
/// Runs use up to `threads` workers; rows come back in input order.
std::vector<ContractionRow> contraction_sweep(const StokesBasis& basis, const BoussinesqState& state0,
                                              const PicardConfig& config, const std::vector<double>& windows,
                                              int threads = 1);

/// Runs jobs[0..n) on up to `threads` workers; results are stored by index.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job);

}  // namespace bsq
