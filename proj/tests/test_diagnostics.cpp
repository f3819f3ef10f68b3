#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bsq/diagnostics.hpp"
#include "bsq/linear_solver.hpp"
#include "bsq/torus_basis.hpp"
#include "support/oracles.hpp"

using namespace bsq;

namespace {

constexpr double pi = std::numbers::pi;

BoussinesqState rest(const StokesBasis& b) {
  return {VelocityCoeffs::Zero(static_cast<Eigen::Index>(b.size())), b.make_scalar(), 0.0};
}

StateRates no_rates() { return {}; }

std::vector<DiagnosticsRecord> synthetic(double t_end, int n, const std::function<void(DiagnosticsRecord&)>& fill) {
  std::vector<DiagnosticsRecord> out(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    out[static_cast<std::size_t>(k)].time = t_end * k / n;
    fill(out[static_cast<std::size_t>(k)]);
  }
  return out;
}

const AsymptoticVerdict& verdict(const std::vector<AsymptoticVerdict>& vs, const std::string& name) {
  for (const auto& v : vs)
    if (v.name == name) return v;
  throw std::runtime_error("missing verdict " + name);
}

std::vector<double> grid(double t_end, int n) {
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) t[static_cast<std::size_t>(k)] = t_end * k / n;
  return t;
}

}  // namespace

TEST(Record, FirstModeHasUnitNorms) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 16, 16);
  BoussinesqState s = rest(*b);
  s.xi[0] = 1.0;
  ASSERT_DOUBLE_EQ(b->eigenvalues()[0], 1.0);
  const DiagnosticsRecord r = record(*b, s, no_rates());
  EXPECT_NEAR(r.u_l2, 1.0, 1e-15);
  EXPECT_NEAR(r.grad_u_l2, 1.0, 1e-15);
  EXPECT_NEAR(r.au_l2, 1.0, 1e-15);
  EXPECT_NEAR(r.stokes_residual_l2, 1.0, 1e-15);
}

TEST(Record, FirstModeClosedFormNorms) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 64, 64);
  BoussinesqState s = rest(*b);
  s.xi[0] = 1.0;
  const DiagnosticsRecord r = record(*b, s, no_rates());
  const double amp = 1.0 / (pi * std::numbers::sqrt2);
  EXPECT_NEAR(r.u_linf, amp, 1e-13);
  EXPECT_NEAR(r.grad_u_linf, amp, 1e-13);
  EXPECT_NEAR(r.u_l4, amp * std::pow(2 * pi * 3 * pi / 4, 0.25), 1e-13);
  EXPECT_NEAR(r.d2u_l3, amp * std::cbrt(2 * pi * 8.0 / 3.0), 1e-6);
  EXPECT_NEAR(sobolev_ratio(r), amp / (1.0 + r.d2u_l3), 1e-15);
  EXPECT_NEAR(ladyzhenskaya_ratio(r), r.u_l4, 1e-13);
}

TEST(Record, SineDensityNorms) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 16, 16);
  BoussinesqState s = rest(*b);
  const Grid& g = b->grid();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) s.theta(i, j) = std::sin(g.x[i]);
  const DiagnosticsRecord r = record(*b, s, no_rates());
  EXPECT_NEAR(r.theta_l2, std::sqrt(2 * pi * pi), 1e-12);
  EXPECT_NEAR(r.grad_theta_l2, std::sqrt(2 * pi * pi), 1e-12);
  EXPECT_NEAR(r.grad_rho_l2, std::sqrt(2 * pi * pi + 4 * pi * pi), 1e-12);
}

TEST(Record, RestStateDensityGradientIsBackground) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 16, 16);
  const DiagnosticsRecord r = record(*b, rest(*b), no_rates());
  EXPECT_EQ(r.u_l2, 0.0);
  EXPECT_EQ(r.theta_l2, 0.0);
  EXPECT_NEAR(r.grad_rho_l2, 2 * pi, 1e-12);
  EXPECT_NEAR(r.rho_h1, 2 * pi, 1e-12);
}

TEST(Record, BlobL3MatchesRefinedQuadrature) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 64, 64);
  auto blob = [](double x, double y) {
    const double dx = x - pi, dy = y - 2.5;
    return std::exp(-(dx * dx + dy * dy) / (2 * 0.4 * 0.4));
  };
  BoussinesqState s = rest(*b);
  const Grid& g = b->grid();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) s.theta(i, j) = blob(g.x[i], g.y[j]);
  const DiagnosticsRecord r = record(*b, s, no_rates());
  const double exact = std::cbrt(oracle::periodic_lp_integral(blob, 2 * pi, 2 * pi, 3.0));
  EXPECT_NEAR(r.theta_l3, exact, 1e-8);
}

TEST(Record, SpectralIdentitiesMatchGridNorms) {
  const auto b = build_torus_basis(Geometry::torus(), 5, 32, 32);
  BoussinesqState s = rest(*b);
  for (Eigen::Index j = 0; j < s.xi.size(); ++j) s.xi[j] = std::sin(0.9 * j + 0.1);
  const DiagnosticsRecord r = record(*b, s, no_rates());
  const VectorField u = b->synthesize(s.xi);
  EXPECT_NEAR(r.u_l2, std::sqrt(b->inner(u.x, u.x) + b->inner(u.y, u.y)), 1e-10 * r.u_l2);
  const GradientField g = b->synthesize_gradient(s.xi);
  const double grad = std::sqrt(b->inner(g.ux_x, g.ux_x) + b->inner(g.ux_y, g.ux_y) + b->inner(g.uy_x, g.uy_x) +
                                b->inner(g.uy_y, g.uy_y));
  EXPECT_NEAR(r.grad_u_l2, grad, 1e-10 * grad);
}

TEST(Record, RoundTripsThroughRow) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 16, 16);
  BoussinesqState s = rest(*b);
  s.xi[3] = 0.4;
  s.theta(3, 5) = 1.0;
  const auto rates = nonlinear_rates(*b, s);
  const DiagnosticsRecord r = record(*b, s, rates);
  const auto row = to_row(r);
  EXPECT_EQ(row.size(), diagnostics_columns().size());
  EXPECT_EQ(to_row(from_row(row)), row);
  for (double v : row) EXPECT_TRUE(std::isfinite(v));
  EXPECT_THROW(from_row({1.0, 2.0}), std::invalid_argument);
}

TEST(Inequalities, HomogeneousRatiosAreScaleInvariant) {
  const auto b = build_torus_basis(Geometry::torus(), 5, 32, 32);
  BoussinesqState s = rest(*b);
  for (Eigen::Index j = 0; j < s.xi.size(); ++j) s.xi[j] = std::cos(1.7 * j) / (1.0 + j);
  const DiagnosticsRecord r1 = record(*b, s, no_rates());
  s.xi *= 10.0;
  const DiagnosticsRecord r10 = record(*b, s, no_rates());
  EXPECT_NEAR(ladyzhenskaya_ratio(r10), ladyzhenskaya_ratio(r1), 1e-12);
  EXPECT_NEAR(sobolev_ratio(r10), sobolev_ratio(r1), 1e-12);
}

TEST(Inequalities, SingleModeAuditIsFiniteAndExact) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 16, 16);
  BoussinesqState s = rest(*b);
  s.xi[0] = 1.0;
  std::vector<DiagnosticsRecord> recs;
  for (int k = 0; k < 4; ++k) {
    s.time = 0.1 * k;
    recs.push_back(record(*b, s, nonlinear_rates(*b, s)));
  }
  const InequalityAudit a = inequality_audit(recs);
  EXPECT_NEAR(a.sobolev_c, sobolev_ratio(recs[0]), 1e-15);
  EXPECT_NEAR(a.ladyzhenskaya_c, ladyzhenskaya_ratio(recs[0]), 1e-15);
  EXPECT_TRUE(std::isfinite(a.gronwall_c));
  EXPECT_TRUE(std::isfinite(a.growth_c));
  EXPECT_NEAR(a.l3w23_integral, 0.3 * std::pow(recs[0].d2u_l3, 3), 1e-12);
}

TEST(EnergyAudit, ZeroTrajectoryHasZeroResidual) {
  const auto t = grid(1.0, 10);
  const std::vector<double> z(t.size(), 0.0);
  const auto a = energy_balance_audit(t, z, z);
  EXPECT_EQ(a.raw.size(), 10u);
  EXPECT_EQ(a.max_abs_normalized, 0.0);
}

TEST(EnergyAudit, StokesDecayDefectQuarters) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 16, 16);
  VelocityCoeffs xi0 = VelocityCoeffs::Zero(static_cast<Eigen::Index>(b->size()));
  for (Eigen::Index j = 0; j < xi0.size(); ++j) xi0[j] = 1.0 / (1.0 + j);
  std::vector<double> defect;
  for (double dt : {0.005, 0.0025, 0.00125}) {
    const auto times = uniform_times(0.0, dt, static_cast<int>(std::lround(1.0 / dt)));
    ScalarTrajectory th;
    th.times = times;
    th.states.assign(times.size(), b->make_scalar());
    const auto u = solve_linear_nse(*b, zero_field_trajectory(*b, times), th, xi0);
    std::vector<double> e, g;
    for (const auto& xi : u.states) {
      e.push_back(0.5 * xi.squaredNorm());
      g.push_back(v_norm(*b, xi));
    }
    defect.push_back(energy_balance_audit(times, e, g).max_abs_normalized);
  }
  EXPECT_NEAR(defect[0] / defect[1], 4.0, 0.3);
  EXPECT_NEAR(defect[1] / defect[2], 4.0, 0.3);
}

TEST(EnergyAudit, RejectsNonUniformGrid) {
  const std::vector<double> t{0.0, 0.1, 0.3}, z(3, 0.0);
  EXPECT_THROW(energy_balance_audit(t, z, z), std::invalid_argument);
}

TEST(Asymptotics, ExponentialDecayPassesA) {
  const auto recs = synthetic(20.0, 400, [](DiagnosticsRecord& r) { r.grad_u_l2 = std::exp(-r.time); });
  const auto vs = asymptotic_report(recs);
  ASSERT_EQ(vs.size(), 5u);
  const auto& a = verdict(vs, "a");
  EXPECT_TRUE(a.passed);
  EXPECT_FALSE(a.inconclusive);
  EXPECT_NEAR(a.tail_start, 15.0, 0.1);
  EXPECT_NEAR(a.statistic, std::exp(-15.0), 1e-3);
}

TEST(Asymptotics, PersistentGradientFailsA) {
  const auto recs = synthetic(20.0, 400, [](DiagnosticsRecord& r) { r.grad_u_l2 = 1.0 + 0.5 * std::sin(r.time); });
  EXPECT_FALSE(verdict(asymptotic_report(recs), "a").passed);
}

TEST(Asymptotics, AlgebraicGrowthIsSubExponential) {
  std::vector<double> slopes;
  for (double t_end : {50.0, 100.0, 200.0}) {
    const auto recs = synthetic(t_end, 1000, [](DiagnosticsRecord& r) { r.grad_rho_l2 = 1.0 + 0.01 * r.time; });
    const auto vs = asymptotic_report(recs);
    const auto& d = verdict(vs, "d");
    EXPECT_TRUE(d.passed);
    slopes.push_back(d.statistic);
  }
  EXPECT_LT(slopes[1], slopes[0]);
  EXPECT_LT(slopes[2], slopes[1]);
}

TEST(Asymptotics, ExponentialGrowthFailsD) {
  const auto recs = synthetic(50.0, 500, [](DiagnosticsRecord& r) { r.grad_rho_l2 = std::exp(0.2 * r.time); });
  const auto vs = asymptotic_report(recs);
  const auto& d = verdict(vs, "d");
  EXPECT_FALSE(d.passed);
  EXPECT_NEAR(d.statistic, 0.2, 1e-9);
}

TEST(Asymptotics, ShortTrajectoryIsInconclusive) {
  const auto recs = synthetic(1.0, 4, [](DiagnosticsRecord& r) { r.grad_u_l2 = std::exp(-10 * r.time); });
  for (const auto& v : asymptotic_report(recs)) {
    EXPECT_TRUE(v.inconclusive) << v.name;
    EXPECT_FALSE(v.passed) << v.name;
  }
  for (const auto& v : asymptotic_report({})) EXPECT_FALSE(v.passed);
}

TEST(Asymptotics, ReportIsDeterministic) {
  const auto recs = synthetic(20.0, 100, [](DiagnosticsRecord& r) {
    r.grad_u_l2 = std::exp(-r.time);
    r.au_l2 = 1.0 / (1.0 + r.time);
    r.probes[2] = std::exp(-0.5 * r.time);
  });
  const auto a = asymptotic_report(recs), b = asymptotic_report(recs);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].statistic, b[k].statistic);
    EXPECT_EQ(a[k].passed, b[k].passed);
  }
  EXPECT_TRUE(verdict(a, "c").passed);
  EXPECT_TRUE(verdict(a, "e").passed);
}

TEST(Asymptotics, RoundoffProbeIsZero) {
  const auto recs = synthetic(20.0, 100, [](DiagnosticsRecord& r) {
    r.probes[0] = std::exp(-r.time);
    r.probes[3] = 1e-17 * std::cos(7.0 * r.time);
  });
  const auto vs = asymptotic_report(recs);
  const auto& e = verdict(vs, "e");
  EXPECT_TRUE(e.passed);
  EXPECT_EQ(e.fitted[3], 0.0);
}

TEST(Asymptotics, PersistentProbeFailsE) {
  const auto recs = synthetic(20.0, 100, [](DiagnosticsRecord& r) { r.probes[1] = 1e-6 * (1.0 + std::exp(-r.time)); });
  const auto vs = asymptotic_report(recs);
  const auto& e = verdict(vs, "e");
  EXPECT_FALSE(e.passed);
  EXPECT_NEAR(e.fitted[1], 0.5, 1e-2);
}

TEST(DecayLemma, ExponentialDecayVariantOne) {
  const auto t = grid(40.0, 4000);
  std::vector<double> f;
  for (double x : t) f.push_back(std::exp(-x));
  const auto v = decay_lemma_check(t, f, {}, {}, DecayVariant::i);
  EXPECT_TRUE(v.hypotheses_hold);
  EXPECT_TRUE(v.conclusion_holds);
  EXPECT_LE(v.fitted_c, 1.0 + 1e-9);
}

TEST(DecayLemma, ConstantIsHypothesisFailureNotCounterexample) {
  const auto t = grid(40.0, 4000);
  const std::vector<double> f(t.size(), 1.0);
  const auto v = decay_lemma_check(t, f, {}, {}, DecayVariant::i);
  EXPECT_FALSE(v.hypotheses_hold);
  EXPECT_FALSE(v.conclusion_holds);
  ASSERT_FALSE(v.failures.empty());
  EXPECT_NE(v.failures.front().find("integrable"), std::string::npos);
}

TEST(DecayLemma, HarmonicDecayVariantTwo) {
  const auto t = grid(100.0, 10000);
  std::vector<double> f;
  for (double x : t) f.push_back(1.0 / (1.0 + x));
  const auto v = decay_lemma_check(t, f, f, {}, DecayVariant::ii);
  EXPECT_TRUE(v.hypotheses_hold);
  EXPECT_TRUE(v.conclusion_holds);
  EXPECT_TRUE(std::isfinite(v.fitted_c));
  EXPECT_GT(v.fitted_c, 0.0);
}

TEST(DecayLemma, VariantThreeNeedsVanishingH) {
  const auto t = grid(40.0, 4000);
  std::vector<double> f, g, h;
  for (double x : t) {
    f.push_back(std::exp(-x));
    g.push_back(std::exp(-x));
    h.push_back(std::exp(-0.5 * x));
  }
  const auto good = decay_lemma_check(t, f, g, h, DecayVariant::iii);
  EXPECT_TRUE(good.hypotheses_hold);
  EXPECT_TRUE(good.conclusion_holds);
  const std::vector<double> flat(t.size(), 1.0);
  EXPECT_FALSE(decay_lemma_check(t, f, g, flat, DecayVariant::iii).hypotheses_hold);
  EXPECT_THROW(decay_lemma_check(t, f, g, {}, DecayVariant::iii), std::invalid_argument);
}

TEST(DecayLemma, RejectsNonUniformGrid) {
  const std::vector<double> t{0.0, 1.0, 3.0}, f{1.0, 0.5, 0.1};
  EXPECT_THROW(decay_lemma_check(t, f, {}, {}, DecayVariant::i), std::invalid_argument);
}

TEST(LogSlope, RecoversExponent) {
  const auto t = grid(5.0, 50);
  std::vector<double> v;
  for (double x : t) v.push_back(3.0 * std::exp(-0.7 * x));
  EXPECT_NEAR(log_slope(t, v), -0.7, 1e-12);
}

TEST(DiagnoseWindow, SamplesOnGlobalStride) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 16, 16);
  PicardConfig c;
  c.dt = 0.01;
  BoussinesqState s = rest(*b);
  s.xi[0] = 0.3;
  s.time = 0.07;
  const auto w = solve_base_case(*b, s, 10, c);
  const auto d = diagnose_window(*b, w, 4, false, true, 7);
  ASSERT_EQ(d.times.size(), 11u);
  std::vector<double> times;
  for (const auto& r : d.records) times.push_back(r.time);
  ASSERT_EQ(times.size(), 4u);
  EXPECT_NEAR(times[0], 0.08, 1e-12);
  EXPECT_NEAR(times[1], 0.12, 1e-12);
  EXPECT_NEAR(times[2], 0.16, 1e-12);
  EXPECT_NEAR(times[3], 0.17, 1e-12);
  for (const auto& r : d.records) EXPECT_GT(r.utt_vprime, 0.0);
  EXPECT_THROW(diagnose_window(*b, w, 0, true, true), std::invalid_argument);
}
