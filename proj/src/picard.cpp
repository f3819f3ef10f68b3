#include "bsq/picard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bsq/advection.hpp"
#include "bsq/linear_solver.hpp"

namespace bsq {

std::string to_string(CouplingMode m) { return m == CouplingMode::co_timestep ? "co_timestep" : "alternating"; }

CouplingMode coupling_mode_from_string(const std::string& s) {
  if (s == "co_timestep") return CouplingMode::co_timestep;
  if (s == "alternating") return CouplingMode::alternating;
  throw std::invalid_argument("unknown coupling mode '" + s + "'");
}

void PicardConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("picard: dt must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("picard: tol must be positive");
  if (n_max < 1) throw std::invalid_argument("picard: n_max must be at least 1");
  if (!(window_max >= dt)) throw std::invalid_argument("picard: window_max must be at least dt");
  if (!(ratio_threshold > 0.0)) throw std::invalid_argument("picard: ratio_threshold must be positive");
  if (max_bisections < 0) throw std::invalid_argument("picard: max_bisections must be non-negative");
  if (coupling_iterations < 1) throw std::invalid_argument("picard: coupling_iterations must be at least 1");
  if (inner_max < 1) throw std::invalid_argument("picard: inner_max must be at least 1");
  if (transport.substeps < 1) throw std::invalid_argument("picard: transport substeps must be at least 1");
}

double PicardReport::ratio(int n) const {
  if (n < 1 || static_cast<std::size_t>(n) >= iterations.size())
    throw std::out_of_range("contraction ratio index out of range");
  return iterations[static_cast<std::size_t>(n)].ratio;
}

double PicardReport::max_ratio() const {
  double r = 0.0;
  for (const auto& it : iterations) r = std::max(r, it.ratio);
  return r;
}

namespace {

double h1_norm(const StokesBasis& basis, const ScalarField& f) {
  const VectorField g = basis.scalar_gradient(f);
  return std::sqrt(basis.inner(f, f) + basis.inner(g.x, g.x) + basis.inner(g.y, g.y));
}

double trapezoid_sq(const std::vector<double>& t, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) s += 0.5 * (t[k] - t[k - 1]) * (v[k] * v[k] + v[k - 1] * v[k - 1]);
  return std::sqrt(s);
}

WindowSolution co_timestep(const StokesBasis& basis, const FieldTrajectory& v, const BoussinesqState& state0,
                           const PicardConfig& config) {
  const std::size_t n = v.size();
  WindowSolution out;
  out.u.times = v.times;
  out.theta.times = v.times;
  out.u.states.reserve(n);
  out.theta.states.reserve(n);
  out.u.states.push_back(state0.xi);
  out.theta.states.push_back(state0.theta);
  if (n == 1) return out;

  const double dt = uniform_step(v.times, "picard_step");
  const LinearStepper stepper(basis.eigenvalues(), dt);
  VelocityCoeffs eta = assemble_buoyancy(basis, state0.theta);
  ScalarField u2 = basis.synthesize_vertical(state0.xi);

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const VelocityCoeffs& xi = out.u.states[k];
    const CharacteristicMap map(basis, v.fields[k], v.fields[k + 1], dt, config.transport);
    ScalarField source = out.theta.states[k];
    source.axpy(-0.5 * dt, u2);
    const ScalarField departed = map.departure(source);

    VectorField vmid = v.fields[k];
    vmid += v.fields[k + 1];
    vmid *= 0.5;
    const AdvectionOperator op(basis, std::move(vmid));
    const VelocityCoeffs beta_xi = op.apply(xi);

    VelocityCoeffs next = stepper.step_with(xi, beta_xi, op, eta);
    ScalarField u2_next, theta_next;
    VelocityCoeffs eta_next;
    auto update_density = [&] {
      u2_next = basis.synthesize_vertical(next);
      theta_next = departed;
      theta_next.axpy(-0.5 * dt, u2_next);
      eta_next = assemble_buoyancy(basis, theta_next);
    };
    for (int it = 0; it < config.coupling_iterations; ++it) {
      update_density();
      next = stepper.step_with(xi, beta_xi, op, VelocityCoeffs(0.5 * (eta + eta_next)));
    }
    update_density();

    out.u.states.push_back(std::move(next));
    out.theta.states.push_back(std::move(theta_next));
    eta = std::move(eta_next);
    u2 = std::move(u2_next);
  }
  return out;
}

double x_norm_difference(const StokesBasis& basis, const VelocityTrajectory& a, const VelocityTrajectory& b) {
  std::vector<double> grad(a.size()), au(a.size());
  double gs = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const VelocityCoeffs d = a.states[k] - b.states[k];
    grad[k] = v_norm(basis, d);
    au[k] = da_norm(basis, d);
    gs = std::max(gs, grad[k]);
  }
  const double al = trapezoid_sq(a.times, au);
  return std::sqrt(gs * gs + al * al);
}

double linf_h1_difference(const StokesBasis& basis, const ScalarTrajectory& a, const ScalarTrajectory& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, h1_norm(basis, a.states[k] - b.states[k]));
  return s;
}

WindowSolution alternating(const StokesBasis& basis, const FieldTrajectory& v, const BoussinesqState& state0,
                           const PicardConfig& config, PicardIteration* inner) {
  ScalarTrajectory theta;
  theta.times = v.times;
  theta.states.assign(v.size(), state0.theta);
  WindowSolution cur;
  double prev_du = 0.0, prev_dth = 0.0;
  const double scale = std::max(1.0, data_norm(basis, state0));
  for (int i = 1; i <= config.inner_max; ++i) {
    VelocityTrajectory u = solve_linear_nse(basis, v, theta, state0.xi);
    ScalarTrajectory th = solve_transport(basis, v, u, state0.theta, config.transport);
    double du = 0.0, dth = 0.0;
    if (i > 1) {
      du = x_norm_difference(basis, u, cur.u);
      dth = linf_h1_difference(basis, th, cur.theta);
      if (inner) {
        inner->inner_iterations = i;
        if (prev_du > 0.0) inner->inner_velocity_ratio = std::max(inner->inner_velocity_ratio, du / prev_du);
        if (prev_dth > 0.0) inner->inner_density_ratio = std::max(inner->inner_density_ratio, dth / prev_dth);
      }
    }
    cur.u = std::move(u);
    cur.theta = std::move(th);
    theta = cur.theta;
    if (i > 1 && du + dth <= config.inner_tol * scale) break;
    prev_du = du;
    prev_dth = dth;
  }
  cur.u.rates.clear();
  cur.theta.rates.clear();
  return cur;
}

PicardIteration compare(const StokesBasis& basis, const WindowSolution& next, const WindowSolution& prev) {
  PicardIteration it;
  const std::size_t n = next.u.size();
  std::vector<double> au(n), au_it(n);
  for (std::size_t k = 0; k < n; ++k) {
    const VelocityCoeffs d = next.u.states[k] - prev.u.states[k];
    it.grad_sup = std::max(it.grad_sup, v_norm(basis, d));
    au[k] = da_norm(basis, d);
    it.theta_sup = std::max(it.theta_sup, basis.norm(next.theta.states[k] - prev.theta.states[k]));

    const VelocityCoeffs& xi = next.u.states[k];
    it.u_sup = std::max(it.u_sup, l2_norm(xi));
    it.grad_u_sup = std::max(it.grad_u_sup, v_norm(basis, xi));
    au_it[k] = da_norm(basis, xi);
    it.theta_l3_sup = std::max(it.theta_l3_sup, basis.lp_norm(next.theta.states[k], 3.0));
  }
  it.au_l2 = trapezoid_sq(next.u.times, au);
  it.au_iterate_l2 = trapezoid_sq(next.u.times, au_it);
  it.composite = std::sqrt(it.grad_sup * it.grad_sup + it.theta_sup * it.theta_sup + it.au_l2 * it.au_l2);
  return it;
}

}  // namespace

double data_norm(const StokesBasis& basis, const BoussinesqState& state) {
  const double da = da_norm(basis, state.xi);
  const double h1 = h1_norm(basis, state.theta);
  return std::sqrt(da * da + h1 * h1);
}

WindowSolution picard_step(const StokesBasis& basis, const FieldTrajectory& v, const BoussinesqState& state0,
                           const PicardConfig& config, PicardIteration* inner) {
  config.validate();
  basis.check_coeffs(state0.xi);
  basis.check_field(state0.theta);
  check_time_grid(v.times, v.fields.size(), "advecting velocity");
  if (std::abs(v.times.front() - state0.time) > 1e-12 * std::max(1.0, std::abs(state0.time)))
    throw std::invalid_argument("picard_step: trajectory does not start at the state time");
  if (config.coupling == CouplingMode::alternating && v.size() > 1) return alternating(basis, v, state0, config, inner);
  return co_timestep(basis, v, state0, config);
}

WindowSolution solve_base_case(const StokesBasis& basis, const BoussinesqState& state0, int steps,
                               const PicardConfig& config) {
  const auto times = uniform_times(state0.time, config.dt, steps);
  return picard_step(basis, zero_field_trajectory(basis, times), state0, config);
}

WindowResult solve_window(const StokesBasis& basis, const BoussinesqState& state0, double window,
                          const PicardConfig& config, const VelocityTrajectory* guess) {
  config.validate();
  if (!(window > 0.0)) throw std::invalid_argument("solve_window: window must be positive");
  if (window > config.window_max * (1.0 + 1e-12))
    throw std::invalid_argument("solve_window: window exceeds the configured maximum");
  int steps = std::max(1, static_cast<int>(std::lround(window / config.dt)));

  PicardReport report;
  report.t_start = state0.time;
  report.data_norm = data_norm(basis, state0);
  report.threshold = config.tol * report.data_norm;

  for (int b = 0;; ++b) {
    report.bisections = b;
    report.window = steps * config.dt;
    report.iterations.clear();
    const auto times = uniform_times(state0.time, config.dt, steps);

    WindowSolution prev;
    if (guess) {
      if (guess->size() != times.size()) throw std::invalid_argument("solve_window: guess does not match the window");
      check_same_times(guess->times, times, "solve_window guess");
      prev.u = *guess;
      prev.theta.times = times;
      prev.theta.states.assign(times.size(), state0.theta);
    } else {
      prev = solve_base_case(basis, state0, steps, config);
    }

    for (int n = 1; n <= config.n_max; ++n) {
      PicardIteration inner;
      WindowSolution next = picard_step(basis, synthesize_trajectory(basis, prev.u), state0, config, &inner);
      PicardIteration it = compare(basis, next, prev);
      it.n = n;
      it.inner_iterations = inner.inner_iterations;
      it.inner_velocity_ratio = inner.inner_velocity_ratio;
      it.inner_density_ratio = inner.inner_density_ratio;
      if (n > 1) {
        const double before = report.iterations.back().composite;
        it.ratio = before > 0.0 ? it.composite / before : 0.0;
      }
      report.iterations.push_back(it);
      if (!std::isfinite(it.composite)) break;
      if (it.composite <= report.threshold) {
        report.converged = true;
        return {std::move(next), std::move(report)};
      }
      if (n >= 3 && it.ratio > config.ratio_threshold &&
          report.iterations[report.iterations.size() - 2].ratio > config.ratio_threshold)
        break;
      prev = std::move(next);
    }
    if (b == config.max_bisections || steps == 1) {
      std::ostringstream os;
      os << "Picard iteration did not converge on window [" << state0.time << ", "
         << state0.time + report.window << "] after " << b << " bisections";
      throw NonconvergenceError(os.str(), report);
    }
    if (guess) throw NonconvergenceError("Picard iteration from the supplied guess did not converge", report);
    std::vector<double> ratios;
    for (const auto& it : report.iterations) ratios.push_back(it.ratio);
    report.abandoned_windows.push_back(report.window);
    report.abandoned_ratios.push_back(std::move(ratios));
    steps = std::max(1, steps / 2);
  }
}

BoussinesqResult solve_boussinesq(const StokesBasis& basis, const BoussinesqState& state0, double horizon,
                                  const PicardConfig& config, const WindowObserver& observer) {
  config.validate();
  if (!(horizon > 0.0)) throw std::invalid_argument("solve_boussinesq: horizon must be positive");
  BoussinesqResult result;
  BoussinesqState state = state0;
  const double t_end = state0.time + horizon;
  double window = config.window_max;
  while (state.time < t_end - 0.5 * config.dt) {
    const int remaining = static_cast<int>(std::lround((t_end - state.time) / config.dt));
    const int w_steps = std::min(remaining, std::max(1, static_cast<int>(std::lround(window / config.dt))));
    WindowResult w = solve_window(basis, state, w_steps * config.dt, config);
    if (w.report.bisections > 0) window = std::min(window, w.report.window);
    BoussinesqState end = w.solution.final_state();
    if (!end.xi.allFinite() || !std::isfinite(da_norm(basis, end.xi)) || !end.theta.all_finite())
      throw std::runtime_error("window end state is not admissible (non-finite norms)");
    if (observer) observer(w.solution, w.report);
    result.reports.push_back(std::move(w.report));
    state = std::move(end);
  }
  result.final_state = std::move(state);
  return result;
}

VelocityCoeffs velocity_rate(const StokesBasis& basis, const VelocityCoeffs& xi, const ScalarField& theta,
                             const VectorField& v) {
  const AdvectionOperator op(basis, v);
  return assemble_buoyancy(basis, theta) - basis.eigenvalues().cwiseProduct(xi) - op.apply(xi);
}

}  // namespace bsq
