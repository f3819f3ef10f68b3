#include "bsq/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "bsq/trajectory.hpp"

namespace bsq {

namespace {

double bump_tail(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double bump_tail_prime(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

// Smooth cutoff equal to 1 for r <= a and 0 for r >= b, with its derivative.
std::pair<double, double> cutoff(double r, double a, double b) {
  if (r <= a) return {1.0, 0.0};
  if (r >= b) return {0.0, 0.0};
  const double s = (r - a) / (b - a);
  const double p = bump_tail(1.0 - s), q = bump_tail(s);
  const double dp = -bump_tail_prime(1.0 - s), dq = bump_tail_prime(s);
  const double d = p + q;
  return {p / d, (dp * q - p * dq) / (d * d) / (b - a)};
}

double exact_bump(double x, double y, double t, const RotationSetup& s) {
  const double c = std::numbers::pi;
  const double ang = -s.omega * t;
  const double dx = x - c, dy = y - c;
  const double x0 = std::cos(ang) * dx - std::sin(ang) * dy;
  const double y0 = std::sin(ang) * dx + std::cos(ang) * dy;
  const double rx = x0 - s.offset, ry = y0;
  return std::exp(-(rx * rx + ry * ry) / (2.0 * s.sigma * s.sigma));
}

}  // namespace

VectorField rotation_velocity(const Grid& grid, const RotationSetup& s) {
  VectorField v(grid.nx, grid.ny);
  const double c = std::numbers::pi;
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.ny; ++j) {
      const double dx = grid.x[i] - c, dy = grid.y[j] - c;
      const double r = std::hypot(dx, dy);
      const auto [w, dw] = cutoff(r, s.window_inner, s.window_outer);
      // psi = omega r^2 w / 2, v = (-psi_y, psi_x)
      const double psi_r_over_r = s.omega * (w + 0.5 * r * dw);
      v.x(i, j) = -psi_r_over_r * dy;
      v.y(i, j) = psi_r_over_r * dx;
    }
  }
  return v;
}

RotationResult rotation_transport(int n, const RotationSetup& s) {
  const BasisPtr basis = build_torus_basis(Geometry::torus(), 1, n, n);
  const Grid& grid = basis->grid();
  ScalarField theta0 = basis->make_scalar();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) theta0(i, j) = exact_bump(grid.x[i], grid.y[j], 0.0, s);

  const double dt = s.t_end / s.steps;
  FieldTrajectory v;
  v.times = uniform_times(0.0, dt, s.steps);
  v.fields.assign(v.times.size(), rotation_velocity(grid, s));
  VelocityTrajectory u;
  u.times = v.times;
  u.states.assign(v.times.size(), VelocityCoeffs::Zero(static_cast<Eigen::Index>(basis->size())));

  const ScalarTrajectory theta = solve_transport(*basis, v, u, theta0, s.transport);
  const ScalarField& last = theta.states.back();

  RotationResult r;
  r.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r.linf_error = std::max(r.linf_error, std::abs(last(i, j) - exact_bump(grid.x[i], grid.y[j], s.t_end, s)));
  r.l2_initial = basis->norm(theta0);
  r.l2_final = basis->norm(last);
  r.l2_drift = std::abs(r.l2_final / r.l2_initial - 1.0);
  return r;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < n; k = next++) {
          try {
            job(k);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<ContractionRow> contraction_sweep(const StokesBasis& basis, const BoussinesqState& state0,
                                              const PicardConfig& config, const std::vector<double>& windows,
                                              int threads) {
  std::vector<ContractionRow> rows(windows.size());
  parallel_for(windows.size(), threads, [&](std::size_t k) {
    PicardConfig cfg = config;
    cfg.window_max = windows[k];
    cfg.max_bisections = 0;
    ContractionRow& row = rows[k];
    row.window = windows[k];
    PicardReport report;
    try {
      report = solve_window(basis, state0, windows[k], cfg).report;
    } catch (const NonconvergenceError& e) {
      report = e.report();
      row.error = e.what();
    }
    row.iterations = static_cast<int>(report.iterations.size());
    row.converged = report.converged;
    for (int n = 1; n < row.iterations; ++n) row.ratios.push_back(report.ratio(n));
    for (double r : row.ratios) row.max_ratio = std::max(row.max_ratio, r);
  });
  return rows;
}

}  // namespace bsq
