#include "bsq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bsq/advection.hpp"
#include "bsq/transport.hpp"

namespace bsq {

namespace {

constexpr int kScalarColumns = 19;

double* field_at(DiagnosticsRecord& r, int c) {
  double* fields[kScalarColumns] = {&r.time,          &r.u_l2,         &r.grad_u_l2,        &r.au_l2,
                                    &r.ut_l2,         &r.theta_l2,     &r.theta_l3,         &r.theta_l4,
                                    &r.grad_theta_l2, &r.grad_rho_l2,  &r.rho_h1,           &r.stokes_residual_l2,
                                    &r.grad_u_linf,   &r.d2u_l3,       &r.energy_residual,  &r.u_l4,
                                    &r.u_linf,        &r.theta_t_l2,   &r.utt_vprime};
  return fields[c];
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& v, std::size_t upto) {
  double s = 0.0;
  for (std::size_t k = 1; k <= upto; ++k) s += 0.5 * (t[k] - t[k - 1]) * (v[k] + v[k - 1]);
  return s;
}

// Smallest C >= 0 with lhs <= base * exp(C * stretch) at every sample.
double fit_exponent(const std::vector<double>& lhs, const std::vector<double>& base,
                    const std::vector<double>& stretch) {
  double c = 0.0;
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    if (lhs[k] <= base[k] * (1.0 + 1e-12)) continue;
    if (stretch[k] <= 0.0 || base[k] <= 0.0) return std::numeric_limits<double>::infinity();
    c = std::max(c, std::log(lhs[k] / base[k]) / stretch[k]);
  }
  return c;
}

double uniform_dt(const std::vector<double>& t) {
  if (t.size() < 2) throw std::invalid_argument("need at least two samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs(t[k] - t[k - 1] - dt) > 1e-9 * dt) throw std::invalid_argument("samples are not uniformly spaced");
  return dt;
}

std::vector<double> derivative(const std::vector<double>& f, double dt) {
  const std::size_t n = f.size();
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0)
      d[k] = (f[1] - f[0]) / dt;
    else if (k + 1 == n)
      d[k] = (f[k] - f[k - 1]) / dt;
    else
      d[k] = (f[k + 1] - f[k - 1]) / (2.0 * dt);
  }
  return d;
}

std::size_t tail_begin(std::size_t n, double fraction) {
  const auto len = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  return n - std::min(n, std::max<std::size_t>(len, 1));
}

double max_of(const std::vector<double>& v, std::size_t from = 0) {
  double m = 0.0;
  for (std::size_t k = from; k < v.size(); ++k) m = std::max(m, v[k]);
  return m;
}

}  // namespace

std::vector<std::string> diagnostics_columns() {
  std::vector<std::string> c = {"time",          "u_l2",          "grad_u_l2",       "au_l2",
                                "ut_l2",         "theta_l2",      "theta_l3",        "theta_l4",
                                "grad_theta_l2", "grad_rho_l2",   "rho_h1",          "stokes_residual_l2",
                                "grad_u_linf",   "d2u_l3",        "energy_residual", "u_l4",
                                "u_linf",        "theta_t_l2",    "utt_vprime"};
  for (int j = 1; j <= kProbeCount; ++j) c.push_back("probe_" + std::to_string(j));
  return c;
}

std::vector<double> to_row(const DiagnosticsRecord& r) {
  DiagnosticsRecord copy = r;
  std::vector<double> row;
  row.reserve(kScalarColumns + kProbeCount);
  for (int c = 0; c < kScalarColumns; ++c) row.push_back(*field_at(copy, c));
  for (double p : r.probes) row.push_back(p);
  return row;
}

DiagnosticsRecord from_row(const std::vector<double>& row) {
  if (row.size() != static_cast<std::size_t>(kScalarColumns + kProbeCount))
    throw std::invalid_argument("diagnostics row has " + std::to_string(row.size()) + " columns, expected " +
                                std::to_string(kScalarColumns + kProbeCount));
  DiagnosticsRecord r;
  for (int c = 0; c < kScalarColumns; ++c) *field_at(r, c) = row[c];
  for (int j = 0; j < kProbeCount; ++j) r.probes[j] = row[kScalarColumns + j];
  return r;
}

StateRates nonlinear_rates(const StokesBasis& basis, const BoussinesqState& state) {
  StateRates r;
  const VectorField u = basis.synthesize(state.xi);
  r.xi_dot = velocity_rate(basis, state.xi, state.theta, u);
  r.theta_dot = transport_rate(basis, state.theta, u, u.y);
  return r;
}

double energy(const StokesBasis& basis, const BoussinesqState& state) {
  return 0.5 * (state.xi.squaredNorm() + basis.inner(state.theta, state.theta));
}

DiagnosticsRecord record(const StokesBasis& basis, const BoussinesqState& state, const StateRates& rates) {
  basis.check_coeffs(state.xi);
  basis.check_field(state.theta);
  DiagnosticsRecord r;
  r.time = state.time;
  r.u_l2 = l2_norm(state.xi);
  r.grad_u_l2 = v_norm(basis, state.xi);
  r.au_l2 = da_norm(basis, state.xi);
  r.ut_l2 = rates.xi_dot.size() ? l2_norm(rates.xi_dot) : 0.0;

  const ScalarField& th = state.theta;
  r.theta_l2 = basis.norm(th);
  r.theta_l3 = basis.lp_norm(th, 3.0);
  r.theta_l4 = basis.lp_norm(th, 4.0);
  const VectorField gt = basis.scalar_gradient(th);
  r.grad_theta_l2 = std::sqrt(basis.inner(gt.x, gt.x) + basis.inner(gt.y, gt.y));
  ScalarField gy1 = gt.y;
  for (std::size_t k = 0; k < gy1.size(); ++k) gy1[k] += 1.0;
  r.grad_rho_l2 = std::sqrt(basis.inner(gt.x, gt.x) + basis.inner(gy1, gy1));
  if (basis.geometry().is_torus()) {
    r.rho_h1 = std::sqrt(r.theta_l2 * r.theta_l2 + r.grad_rho_l2 * r.grad_rho_l2);
  } else {
    ScalarField rho = th;
    const Grid& g = basis.grid();
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) rho(i, j) += g.y[j];
    r.rho_h1 = std::sqrt(basis.inner(rho, rho) + r.grad_rho_l2 * r.grad_rho_l2);
  }

  const VelocityCoeffs eta = assemble_buoyancy(basis, th);
  r.stokes_residual_l2 = (basis.eigenvalues().cwiseProduct(state.xi) - eta).norm();
  for (int j = 0; j < kProbeCount && j < eta.size(); ++j) r.probes[j] = eta[j];

  const VectorField u = basis.synthesize(state.xi);
  ScalarField speed = basis.make_scalar();
  for (std::size_t k = 0; k < speed.size(); ++k) speed[k] = std::hypot(u.x[k], u.y[k]);
  r.u_l4 = basis.lp_norm(speed, 4.0);
  r.u_linf = speed.max_abs();

  const GradientField g = basis.synthesize_gradient(state.xi);
  for (std::size_t k = 0; k < speed.size(); ++k) {
    const double f = std::sqrt(g.ux_x[k] * g.ux_x[k] + g.ux_y[k] * g.ux_y[k] + g.uy_x[k] * g.uy_x[k] +
                               g.uy_y[k] * g.uy_y[k]);
    r.grad_u_linf = std::max(r.grad_u_linf, f);
  }
  const HessianField h = basis.synthesize_hessian(state.xi);
  ScalarField d2 = basis.make_scalar();
  for (std::size_t k = 0; k < d2.size(); ++k)
    d2[k] = std::sqrt(h.ux_xx[k] * h.ux_xx[k] + 2.0 * h.ux_xy[k] * h.ux_xy[k] + h.ux_yy[k] * h.ux_yy[k] +
                      h.uy_xx[k] * h.uy_xx[k] + 2.0 * h.uy_xy[k] * h.uy_xy[k] + h.uy_yy[k] * h.uy_yy[k]);
  r.d2u_l3 = basis.lp_norm(d2, 3.0);

  if (rates.theta_dot.size()) r.theta_t_l2 = basis.norm(rates.theta_dot);
  if (rates.xi_ddot.size()) {
    const Eigen::VectorXd& lam = basis.eigenvalues();
    for (Eigen::Index j = 0; j < rates.xi_ddot.size(); ++j)
      r.utt_vprime = std::max(r.utt_vprime, std::abs(rates.xi_ddot[j]) / std::sqrt(lam[j]));
  }
  return r;
}

EnergyAudit energy_balance_audit(const std::vector<double>& times, const std::vector<double>& e,
                                 const std::vector<double>& grad_u) {
  if (times.size() != e.size() || times.size() != grad_u.size())
    throw std::invalid_argument("energy audit series lengths differ");
  EnergyAudit a;
  if (times.size() < 2) return a;
  const double dt = uniform_dt(times);
  const double scale = e.front() > 0.0 ? e.front() : 1.0;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double r = (e[k + 1] - e[k]) / dt + 0.5 * (grad_u[k] * grad_u[k] + grad_u[k + 1] * grad_u[k + 1]);
    a.times.push_back(times[k]);
    a.raw.push_back(r);
    a.normalized.push_back(r / scale);
    a.max_abs_normalized = std::max(a.max_abs_normalized, std::abs(r / scale));
  }
  return a;
}

WindowDiagnostics diagnose_window(const StokesBasis& basis, const WindowSolution& solution, int stride,
                                  bool include_first, bool include_last, long long step_offset) {
  if (stride < 1) throw std::invalid_argument("record stride must be at least 1");
  WindowDiagnostics d;
  const std::size_t n = solution.u.size();
  const double dt = n > 1 ? solution.u.times[1] - solution.u.times[0] : 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const BoussinesqState s = solution.state(k);
    d.times.push_back(s.time);
    d.energy.push_back(energy(basis, s));
    d.grad_u.push_back(v_norm(basis, s.xi));
  }
  for (std::size_t k = 0; k < n; ++k) {
    const bool take = (k == 0 && include_first) || (k > 0 && (step_offset + static_cast<long long>(k)) % stride == 0) ||
                      (k + 1 == n && include_last);
    if (!take) continue;
    const BoussinesqState s = solution.state(k);
    StateRates rates = nonlinear_rates(basis, s);
    if (n > 1) {
      const std::size_t other = k > 0 ? k - 1 : 1;
      const StateRates nb = nonlinear_rates(basis, solution.state(other));
      rates.xi_ddot = (k > 0 ? rates.xi_dot - nb.xi_dot : nb.xi_dot - rates.xi_dot) / dt;
    }
    DiagnosticsRecord r = record(basis, s, rates);
    if (k > 0)
      r.energy_residual = (d.energy[k] - d.energy[k - 1]) / dt +
                          0.5 * (d.grad_u[k] * d.grad_u[k] + d.grad_u[k - 1] * d.grad_u[k - 1]);
    d.records.push_back(r);
  }
  return d;
}

double log_slope(const std::vector<double>& t, const std::vector<double>& v, double floor) {
  const std::size_t n = t.size();
  if (n < 2) return 0.0;
  double st = 0.0, sv = 0.0;
  std::vector<double> lv(n);
  for (std::size_t k = 0; k < n; ++k) {
    lv[k] = std::log(std::max(v[k], floor));
    st += t[k];
    sv += lv[k];
  }
  st /= static_cast<double>(n);
  sv /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    num += (t[k] - st) * (lv[k] - sv);
    den += (t[k] - st) * (t[k] - st);
  }
  return den > 0.0 ? num / den : 0.0;
}

std::vector<AsymptoticVerdict> asymptotic_report(const std::vector<DiagnosticsRecord>& records,
                                                 const AsymptoticThresholds& th) {
  const std::size_t n = records.size();
  const std::size_t b = tail_begin(n, th.tail_fraction);
  const bool short_tail = n == 0 || n - b < static_cast<std::size_t>(th.min_tail_samples);
  const double tail_start = n ? records[b].time : 0.0;

  auto series = [&](auto get) {
    std::vector<double> v;
    for (const auto& r : records) v.push_back(get(r));
    return v;
  };
  std::vector<double> t = series([](const DiagnosticsRecord& r) { return r.time; });
  const std::vector<double> tail_t(t.begin() + static_cast<std::ptrdiff_t>(b), t.end());
  auto tail = [&](const std::vector<double>& v) {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(b), v.end());
  };

  std::vector<AsymptoticVerdict> out;
  auto finish = [&](AsymptoticVerdict v, bool pass) {
    v.tail_start = tail_start;
    v.inconclusive = short_tail;
    v.passed = !short_tail && pass;
    out.push_back(std::move(v));
  };

  auto decay = [&](const char* name, const char* quantity, const std::vector<double>& v, double frac) {
    AsymptoticVerdict a;
    a.name = name;
    a.quantity = quantity;
    const double peak = max_of(v);
    const double tail_max = max_of(v, b);
    a.statistic = peak > 0.0 ? tail_max / peak : 0.0;
    a.threshold = frac;
    a.fitted = {peak, tail_max};
    const bool pass = a.statistic <= frac;
    finish(std::move(a), pass);
  };
  decay("a", "grad_u_l2", series([](const DiagnosticsRecord& r) { return r.grad_u_l2; }), th.grad_decay_frac);
  decay("b", "stokes_residual_l2", series([](const DiagnosticsRecord& r) { return r.stokes_residual_l2; }),
        th.residual_decay_frac);

  {
    const auto au = series([](const DiagnosticsRecord& r) { return r.au_l2; });
    AsymptoticVerdict c;
    c.name = "c";
    c.quantity = "au_l2";
    c.statistic = log_slope(tail_t, tail(au), th.log_floor);
    c.threshold = th.au_slope_max;
    c.fitted = {max_of(au)};
    const bool pass = std::isfinite(max_of(au)) && c.statistic <= th.au_slope_max;
    finish(std::move(c), pass);
  }
  {
    const auto gr = series([](const DiagnosticsRecord& r) { return r.grad_rho_l2; });
    AsymptoticVerdict d;
    d.name = "d";
    d.quantity = "grad_rho_l2";
    d.statistic = log_slope(tail_t, tail(gr), th.log_floor);
    d.threshold = th.rho_growth_max;
    d.fitted = {max_of(gr)};
    const bool pass = d.statistic <= th.rho_growth_max;
    finish(std::move(d), pass);
  }
  {
    AsymptoticVerdict e;
    e.name = "e";
    e.quantity = "probes";
    e.threshold = th.probe_frac;
    bool pass = true;
    for (int j = 0; j < kProbeCount; ++j) {
      const auto p = series([j](const DiagnosticsRecord& r) { return std::abs(r.probes[j]); });
      const double peak = max_of(p);
      const double stat = peak > th.log_floor ? max_of(p, b) / peak : 0.0;
      e.fitted.push_back(stat);
      e.statistic = std::max(e.statistic, stat);
      pass = pass && stat <= th.probe_frac;
    }
    finish(std::move(e), pass);
  }
  return out;
}

LemmaVerdict decay_lemma_check(const std::vector<double>& t, const std::vector<double>& f,
                               const std::vector<double>& g, const std::vector<double>& h, DecayVariant variant,
                               double tail_fraction, double decay_frac) {
  if (f.size() != t.size()) throw std::invalid_argument("f and t lengths differ");
  if (variant != DecayVariant::i && g.size() != t.size()) throw std::invalid_argument("g is required");
  if (variant == DecayVariant::iii && h.size() != t.size()) throw std::invalid_argument("h is required");
  const double dt = uniform_dt(t);
  const std::size_t n = t.size();
  const std::size_t b = tail_begin(n, tail_fraction);
  const auto fdot = derivative(f, dt);
  LemmaVerdict v;
  const double inf = std::numeric_limits<double>::infinity();

  // Integrability trend on a finite window: the tail mean must be small relative to the peak.
  auto integrable = [&](const std::vector<double>& q, const char* name) {
    double mean = 0.0;
    for (std::size_t k = b; k < n; ++k) mean += q[k];
    mean /= static_cast<double>(n - b);
    if (mean > decay_frac * max_of(q)) v.failures.push_back(std::string(name) + " is not integrable (tail trend)");
  };
  auto dominated = [&](double& c) {
    for (std::size_t k = 0; k < n; ++k) {
      if (f[k] <= 0.0) continue;
      c = std::max(c, g[k] > 0.0 ? f[k] / g[k] : inf);
    }
  };

  double c = 0.0;
  if (variant == DecayVariant::i) {
    integrable(f, "f");
    for (double d : fdot) c = std::max(c, std::abs(d));
    if (!std::isfinite(c)) v.failures.push_back("f' is unbounded");
  } else if (variant == DecayVariant::ii) {
    integrable(g, "g");
    for (std::size_t k = 0; k < n; ++k) c = std::max(c, (fdot[k] + g[k]) / (f[k] * f[k] + 1.0));
    dominated(c);
    if (!std::isfinite(c)) v.failures.push_back("no finite constant satisfies the inequalities");
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      const double lhs = fdot[k] + g[k];
      const double rhs = h[k] * (f[k] + 1.0);
      if (lhs <= 0.0) continue;
      c = std::max(c, rhs > 0.0 ? lhs / rhs : inf);
    }
    dominated(c);
    c = std::max({c, f.front(), max_of(h)});
    if (!std::isfinite(c)) v.failures.push_back("no finite constant satisfies the inequalities");
    if (max_of(h, b) > decay_frac * max_of(h)) v.failures.push_back("h does not tend to zero (tail trend)");
  }
  v.fitted_c = c;
  v.hypotheses_hold = v.failures.empty();

  const double peak = max_of(f);
  bool concl = max_of(f, b) <= decay_frac * peak;
  if (variant == DecayVariant::ii && std::isfinite(c)) concl = concl && peak <= c;
  v.conclusion_holds = concl;
  return v;
}

double sobolev_ratio(const DiagnosticsRecord& r) {
  const double rhs = r.grad_u_l2 + r.d2u_l3;
  return rhs > 0.0 ? r.grad_u_linf / rhs : 0.0;
}

double ladyzhenskaya_ratio(const DiagnosticsRecord& r) {
  const double rhs = std::sqrt(r.u_l2 * r.grad_u_l2);
  return rhs > 0.0 ? r.u_l4 / rhs : 0.0;
}

InequalityAudit inequality_audit(const std::vector<DiagnosticsRecord>& records) {
  InequalityAudit a;
  const std::size_t n = records.size();
  if (n == 0) return a;
  std::vector<double> t(n), theta_sq(n), uv(n), uh1(n), w1(n), d2cube(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = records[k];
    t[k] = r.time;
    theta_sq[k] = r.theta_l2 * r.theta_l2;
    uv[k] = r.u_l2 * r.u_l2 * r.grad_u_l2 * r.grad_u_l2;
    uh1[k] = std::sqrt(r.u_l2 * r.u_l2 + r.grad_u_l2 * r.grad_u_l2);
    w1[k] = r.u_linf + r.grad_u_linf;
    d2cube[k] = r.d2u_l3 * r.d2u_l3 * r.d2u_l3;
    a.sobolev_c = std::max(a.sobolev_c, sobolev_ratio(r));
    a.ladyzhenskaya_c = std::max(a.ladyzhenskaya_c, ladyzhenskaya_ratio(r));
    a.utt_sup = std::max(a.utt_sup, r.utt_vprime);
    const double rhs = r.u_l2 + r.u_linf * r.grad_theta_l2;
    if (rhs > 0.0)
      a.theta_t_c = std::max(a.theta_t_c, r.theta_t_l2 / rhs);
    else if (r.theta_t_l2 > 0.0)
      a.theta_t_c = std::numeric_limits<double>::infinity();
  }
  const double g0 = records.front().grad_u_l2;
  const double h1_0 = std::sqrt(records.front().theta_l2 * records.front().theta_l2 +
                                records.front().grad_theta_l2 * records.front().grad_theta_l2);
  std::vector<double> lhs_g(n), base_g(n), s_g(n), lhs_t(n), base_t(n), s_t(n);
  for (std::size_t k = 0; k < n; ++k) {
    lhs_g[k] = records[k].grad_u_l2 * records[k].grad_u_l2;
    base_g[k] = g0 * g0 + trapezoid(t, theta_sq, k);
    s_g[k] = trapezoid(t, uv, k);
    lhs_t[k] = records[k].grad_theta_l2;
    base_t[k] = h1_0 + trapezoid(t, uh1, k);
    s_t[k] = trapezoid(t, w1, k);
  }
  a.gronwall_c = fit_exponent(lhs_g, base_g, s_g);
  a.growth_c = fit_exponent(lhs_t, base_t, s_t);
  a.l3w23_integral = trapezoid(t, d2cube, n - 1);
  return a;
}

}  // namespace bsq
