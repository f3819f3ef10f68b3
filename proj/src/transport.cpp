#include "bsq/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bsq {
namespace {

double max_speed(const VectorField& v) {
  double m = 0.0;
  for (std::size_t k = 0; k < v.x.size(); ++k) m = std::max(m, std::hypot(v.x[k], v.y[k]));
  return m;
}

// Distance from y to the nearest entry of sorted nodes.
double nearest_gap(const std::vector<double>& nodes, double y) {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), y);
  double d = std::numeric_limits<double>::infinity();
  if (it != nodes.end()) d = *it - y;
  if (it != nodes.begin()) d = std::min(d, y - *(it - 1));
  return d;
}

}  // namespace

CharacteristicMap::CharacteristicMap(const StokesBasis& basis, const VectorField& v_start, const VectorField& v_end,
                                     double dt, const TransportConfig& config)
    : basis_(&basis), config_(config) {
  if (!(dt > 0.0)) throw std::invalid_argument("transport step must be positive");
  if (config.substeps < 1) throw std::invalid_argument("substeps must be at least 1");
  basis.check_field(v_start.x);
  basis.check_field(v_end.x);
  const double vmax = std::max(max_speed(v_start), max_speed(v_end));
  if (vmax == 0.0) {
    identity_ = true;
    return;
  }
  const Grid& g = basis.grid();
  const Geometry& geo = basis.geometry();
  const bool torus = geo.is_torus();
  const double wall_reach = torus ? 0.0 : std::min(g.y[1] - g.y[0], g.y[g.ny - 1] - g.y[g.ny - 2]);

  auto clamp_y = [&](double& y) {
    if (torus) return;
    if (y < 0.0 || y > geo.ly) {
      const double out = y < 0.0 ? -y : y - geo.ly;
      if (out > wall_reach) {
        std::ostringstream os;
        os << "characteristic foot left the channel by " << out << " (cell " << wall_reach << ")";
        throw CharacteristicError(os.str());
      }
      y = std::clamp(y, 0.0, geo.ly);
      ++clamped_;
    }
  };

  InterpolationSpec vspec = config.interpolation;
  vspec.max_offset = 1.1 * dt * vmax;
  const int s = config.substeps;
  const double h = dt / s;
  fx_.resize(g.size());
  fy_.resize(g.size());

  if (s == 1) {
    VectorField vmid = v_start;
    vmid += v_end;
    vmid *= 0.5;
    const auto ix = basis.interpolant(vmid.x, vspec);
    const auto iy = basis.interpolant(vmid.y, vspec);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        const std::size_t k = g.index(i, j);
        const double xm = g.x[i] - 0.5 * h * v_end.x[k];
        double ym = g.y[j] - 0.5 * h * v_end.y[k];
        clamp_y(ym);
        fx_[k] = g.x[i] - h * (*ix)(xm, ym);
        fy_[k] = g.y[j] - h * (*iy)(xm, ym);
        clamp_y(fy_[k]);
      }
  } else {
    const auto sx = basis.interpolant(v_start.x, vspec);
    const auto sy = basis.interpolant(v_start.y, vspec);
    const auto ex = basis.interpolant(v_end.x, vspec);
    const auto ey = basis.interpolant(v_end.y, vspec);
    auto vel = [&](double x, double y, double a) {
      return std::array<double, 2>{(1.0 - a) * (*sx)(x, y) + a * (*ex)(x, y),
                                   (1.0 - a) * (*sy)(x, y) + a * (*ey)(x, y)};
    };
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        double x = g.x[i], y = g.y[j];
        for (int q = 0; q < s; ++q) {
          const double a1 = 1.0 - static_cast<double>(q) / s;
          const auto k1 = vel(x, y, a1);
          const double xm = x - 0.5 * h * k1[0];
          double ym = y - 0.5 * h * k1[1];
          clamp_y(ym);
          const auto k2 = vel(xm, ym, a1 - 0.5 / s);
          x -= h * k2[0];
          y -= h * k2[1];
          clamp_y(y);
        }
        const std::size_t k = g.index(i, j);
        fx_[k] = x;
        fy_[k] = y;
      }
  }

  const double hx = geo.lx / g.nx;
  const double hy = torus ? geo.ly / g.ny : 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double rx = fx_[k] - std::round(fx_[k] / hx) * hx;
    const double ry = torus ? fy_[k] - std::round(fy_[k] / hy) * hy : nearest_gap(g.y, fy_[k]);
    max_offset_ = std::max(max_offset_, std::hypot(rx, ry));
  }
}

ScalarField CharacteristicMap::departure(const ScalarField& f) const {
  basis_->check_field(f);
  if (identity_) return f;
  InterpolationSpec spec = config_.interpolation;
  spec.max_offset = max_offset_;
  const auto interp = basis_->interpolant(f, spec);
  ScalarField out(f.nx(), f.ny());
  for (std::size_t k = 0; k < fx_.size(); ++k) out[k] = (*interp)(fx_[k], fy_[k]);
  return out;
}

ScalarField advect_step(const CharacteristicMap& map, const ScalarField& theta, const ScalarField& u2_start,
                        const ScalarField& u2_end, double dt) {
  ScalarField out = map.departure(theta);
  out.axpy(-0.5 * dt, u2_end);
  out.axpy(-0.5 * dt, map.departure(u2_start));
  return out;
}

ScalarField advect_step(const StokesBasis& basis, const ScalarField& theta, const VectorField& v_start,
                        const VectorField& v_end, const ScalarField& u2_start, const ScalarField& u2_end, double dt,
                        const TransportConfig& config) {
  basis.check_field(theta);
  basis.check_field(u2_start);
  basis.check_field(u2_end);
  const CharacteristicMap map(basis, v_start, v_end, dt, config);
  return advect_step(map, theta, u2_start, u2_end, dt);
}

ScalarField transport_rate(const StokesBasis& basis, const ScalarField& theta, const VectorField& v,
                           const ScalarField& u2) {
  const VectorField grad = basis.scalar_gradient(theta);
  ScalarField out(theta.nx(), theta.ny());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = -(v.x[k] * grad.x[k] + v.y[k] * grad.y[k]) - u2[k];
  return out;
}

ScalarTrajectory solve_transport(const StokesBasis& basis, const FieldTrajectory& v, const VelocityTrajectory& u,
                                 const ScalarField& theta0, const TransportConfig& config) {
  basis.check_field(theta0);
  check_time_grid(v.times, v.fields.size(), "advecting velocity");
  check_time_grid(u.times, u.states.size(), "forcing velocity");
  check_same_times(v.times, u.times, "solve_transport");
  const std::size_t n = v.size();

  std::vector<ScalarField> u2(n);
  for (std::size_t k = 0; k < n; ++k) u2[k] = basis.synthesize_vertical(u.states[k]);

  ScalarTrajectory out;
  out.times = v.times;
  out.states.reserve(n);
  out.states.push_back(theta0);
  if (n > 1) {
    const double dt = uniform_step(v.times, "solve_transport");
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const CharacteristicMap map(basis, v.fields[k], v.fields[k + 1], dt, config);
      out.states.push_back(advect_step(map, out.states[k], u2[k], u2[k + 1], dt));
    }
  }
  out.rates.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.rates.push_back(transport_rate(basis, out.states[k], v.fields[k], u2[k]));
  return out;
}

double w1inf_norm(const StokesBasis& basis, const VectorField& v) {
  const VectorField gx = basis.scalar_gradient(v.x);
  const VectorField gy = basis.scalar_gradient(v.y);
  double vmax = 0.0, gmax = 0.0;
  for (std::size_t k = 0; k < v.x.size(); ++k) {
    vmax = std::max(vmax, std::hypot(v.x[k], v.y[k]));
    const double frob = std::sqrt(gx.x[k] * gx.x[k] + gx.y[k] * gx.y[k] + gy.x[k] * gy.x[k] + gy.y[k] * gy.y[k]);
    gmax = std::max(gmax, frob);
  }
  return vmax + gmax;
}

GrowthAudit gradient_growth_audit(const StokesBasis& basis, const ScalarTrajectory& theta,
                                  const VelocityTrajectory& u, const FieldTrajectory& v) {
  check_time_grid(theta.times, theta.states.size(), "density trajectory");
  check_same_times(theta.times, u.times, "gradient_growth_audit");
  check_same_times(theta.times, v.times, "gradient_growth_audit");
  const std::size_t n = theta.size();
  GrowthAudit a;
  a.times = theta.times;

  auto grad_norm = [&](const ScalarField& f) {
    const VectorField g = basis.scalar_gradient(f);
    return std::sqrt(basis.inner(g.x, g.x) + basis.inner(g.y, g.y));
  };
  const double th0 = basis.norm(theta.states[0]);
  const double g0 = grad_norm(theta.states[0]);
  const double h1_0 = std::sqrt(th0 * th0 + g0 * g0);

  std::vector<double> u_h1(n), v_w1(n), u_l2(n), v_inf(n);
  for (std::size_t k = 0; k < n; ++k) {
    const VelocityCoeffs& xi = u.states[k];
    u_l2[k] = l2_norm(xi);
    u_h1[k] = std::sqrt(u_l2[k] * u_l2[k] + v_norm(basis, xi) * v_norm(basis, xi));
    v_w1[k] = w1inf_norm(basis, v.fields[k]);
    v_inf[k] = max_speed(v.fields[k]);
  }

  double int_u = 0.0, int_v = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      const double dt = a.times[k] - a.times[k - 1];
      int_u += 0.5 * dt * (u_h1[k] + u_h1[k - 1]);
      int_v += 0.5 * dt * (v_w1[k] + v_w1[k - 1]);
    }
    const double lhs = grad_norm(theta.states[k]);
    a.grad_theta.push_back(lhs);
    a.base.push_back(h1_0 + int_u);
    a.stretch.push_back(int_v);

    const double base = h1_0 + int_u;
    if (lhs > base * (1.0 + 1e-12)) {
      const double c = int_v > 0.0 ? std::log(lhs / base) / int_v : std::numeric_limits<double>::infinity();
      a.fitted_c = std::max(a.fitted_c, c);
    }

    const ScalarField rate = k < theta.rates.size()
                                 ? theta.rates[k]
                                 : transport_rate(basis, theta.states[k], v.fields[k],
                                                  basis.synthesize_vertical(u.states[k]));
    const double tt = basis.norm(rate);
    const double rhs = u_l2[k] + v_inf[k] * lhs;
    a.theta_t.push_back(tt);
    a.theta_t_rhs.push_back(rhs);
    if (rhs > 0.0)
      a.theta_t_c = std::max(a.theta_t_c, tt / rhs);
    else if (tt > 0.0)
      a.theta_t_c = std::numeric_limits<double>::infinity();
  }
  return a;
}

}  // namespace bsq
