#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bsq/channel_basis.hpp"
#include "bsq/studies.hpp"
#include "bsq/torus_basis.hpp"
#include "bsq/trajectory.hpp"
#include "bsq/transport.hpp"

using namespace bsq;

namespace {

constexpr double pi = std::numbers::pi;

ScalarField blob(const StokesBasis& b, double cx, double cy, double sigma) {
  ScalarField s = b.make_scalar();
  const Grid& g = b.grid();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double dx = g.x[i] - cx, dy = g.y[j] - cy;
      s(i, j) = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
    }
  return s;
}

VelocityTrajectory constant_coeffs(const std::vector<double>& times, const VelocityCoeffs& xi) {
  VelocityTrajectory u;
  u.times = times;
  u.states.assign(times.size(), xi);
  return u;
}

FieldTrajectory constant_field(const std::vector<double>& times, const VectorField& v) {
  FieldTrajectory f;
  f.times = times;
  f.fields.assign(times.size(), v);
  return f;
}

VelocityCoeffs smooth_coeffs(std::size_t m, double phase, double scale) {
  VelocityCoeffs xi(static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < xi.size(); ++j) xi[j] = scale * std::sin(1.3 * j + phase) / (1.0 + 0.5 * j);
  return xi;
}

double range_excess(const ScalarField& f, double lo, double hi) {
  double e = 0.0;
  for (double v : f.values()) e = std::max({e, v - hi, lo - v});
  return e;
}

}  // namespace

TEST(AdvectStep, ZeroVelocityAndForcingIsIdentity) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 16, 16);
  const ScalarField th = blob(*b, 3.0, 3.0, 0.7);
  const ScalarField z = b->make_scalar();
  const ScalarField next = advect_step(*b, th, b->make_vector(), b->make_vector(), z, z, 0.1);
  for (std::size_t k = 0; k < th.size(); ++k) EXPECT_EQ(next[k], th[k]);
}

TEST(AdvectStep, ConstantForcingIsExact) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 16, 16);
  const ScalarField th = blob(*b, 3.0, 3.0, 0.7);
  const ScalarField c = b->make_scalar(0.25);
  const ScalarField next = advect_step(*b, th, b->make_vector(), b->make_vector(), c, c, 0.1);
  for (std::size_t k = 0; k < th.size(); ++k) EXPECT_NEAR(next[k], th[k] - 0.025, 1e-15);
}

TEST(SolveTransport, StillFluidKeepsDensity) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 16, 16);
  const auto times = uniform_times(0.0, 0.1, 10);
  const ScalarField th0 = blob(*b, 2.0, 4.0, 0.8);
  const auto th = solve_transport(*b, zero_field_trajectory(*b, times),
                                  constant_coeffs(times, VelocityCoeffs::Zero(static_cast<Eigen::Index>(b->size()))), th0);
  for (const auto& s : th.states)
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_EQ(s[k], th0[k]);
}

TEST(SolveTransport, SteadyVerticalVelocityForcesLinearly) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 16, 16);
  const auto times = uniform_times(0.0, 0.05, 20);
  const VelocityCoeffs xi = smooth_coeffs(b->size(), 0.3, 1.0);
  const ScalarField th0 = blob(*b, 2.0, 4.0, 0.8);
  const ScalarField g = b->synthesize_vertical(xi);
  const auto th = solve_transport(*b, zero_field_trajectory(*b, times), constant_coeffs(times, xi), th0);
  for (std::size_t k = 0; k < times.size(); ++k)
    for (std::size_t p = 0; p < th0.size(); ++p) EXPECT_NEAR(th.states[k][p], th0[p] - times[k] * g[p], 1e-13);
  ASSERT_EQ(th.rates.size(), times.size());
  for (std::size_t p = 0; p < th0.size(); ++p) EXPECT_NEAR(th.rates[0][p], -g[p], 1e-13);
}

TEST(SolveTransport, RigidRotationConvergesAtInterpolationOrder) {
  RotationSetup s;
  const auto r32 = rotation_transport(32, s), r64 = rotation_transport(64, s), r128 = rotation_transport(128, s);
  EXPECT_LT(r64.linf_error, r32.linf_error);
  EXPECT_LT(r128.linf_error, r64.linf_error);
  const double p = s.transport.interpolation.order;
  EXPECT_GE(std::log2(r32.linf_error / r64.linf_error), p - 0.5);
  EXPECT_GE(std::log2(r64.linf_error / r128.linf_error), p - 0.5);
}

TEST(SolveTransport, RotationL2DriftSmallAndShrinking) {
  RotationSetup s;
  s.t_end = 1.0;
  const auto r64 = rotation_transport(64, s), r128 = rotation_transport(128, s);
  EXPECT_LE(r128.l2_drift, 1e-3);
  EXPECT_LT(r128.l2_drift, r64.l2_drift);
}

TEST(SolveTransport, LpNormsConservedUnderRefinement) {
  std::vector<std::array<double, 3>> drift;
  for (int n : {32, 64}) {
    const auto b = build_torus_basis(Geometry::torus(), 4, n, n);
    const auto times = uniform_times(0.0, 0.05, 20);
    const VectorField v = b->synthesize(smooth_coeffs(b->size(), 0.2, 1.0));
    const ScalarField th0 = blob(*b, pi, pi, 0.6);
    const auto th = solve_transport(*b, constant_field(times, v),
                                    constant_coeffs(times, VelocityCoeffs::Zero(static_cast<Eigen::Index>(b->size()))), th0);
    std::array<double, 3> d{};
    const double ps[3] = {2.0, 3.0, std::numeric_limits<double>::infinity()};
    for (int q = 0; q < 3; ++q) {
      const double a = b->lp_norm(th0, ps[q]), c = b->lp_norm(th.states.back(), ps[q]);
      d[static_cast<std::size_t>(q)] = std::abs(c / a - 1.0);
    }
    drift.push_back(d);
  }
  for (int q = 0; q < 3; ++q) {
    EXPECT_LE(drift[1][static_cast<std::size_t>(q)], 1.01 * drift[0][static_cast<std::size_t>(q)] + 1e-9)
        << "p index " << q;
    EXPECT_LE(drift[1][static_cast<std::size_t>(q)], 1e-2);
  }
  EXPECT_LE(drift[1][0], 1e-3);
}

TEST(SolveTransport, MaximumPrincipleAndLimiter) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 32, 32);
  const auto times = uniform_times(0.0, 0.1, 10);
  const VectorField v = b->synthesize(smooth_coeffs(b->size(), 1.2, 1.5));
  const ScalarField th0 = blob(*b, pi, pi, 0.4);
  const auto zero = constant_coeffs(times, VelocityCoeffs::Zero(static_cast<Eigen::Index>(b->size())));
  double lo = th0[0], hi = th0[0];
  for (double x : th0.values()) lo = std::min(lo, x), hi = std::max(hi, x);

  const auto plain = solve_transport(*b, constant_field(times, v), zero, th0);
  EXPECT_LE(range_excess(plain.states.back(), lo, hi), 0.01 * (hi - lo));

  TransportConfig limited;
  limited.interpolation.limiter = true;
  const auto lim = solve_transport(*b, constant_field(times, v), zero, th0, limited);
  for (const auto& s : lim.states) EXPECT_LE(range_excess(s, lo, hi), 1e-14);
}

TEST(GrowthAudit, StillFluidHasNoStretching) {
  const auto b = build_torus_basis(Geometry::torus(), 4, 16, 16);
  const auto times = uniform_times(0.0, 0.05, 20);
  const VelocityCoeffs xi = smooth_coeffs(b->size(), 0.3, 1.0);
  const auto u = constant_coeffs(times, xi);
  const auto v = zero_field_trajectory(*b, times);
  const auto th = solve_transport(*b, v, u, blob(*b, 2.0, 4.0, 0.8));
  const GrowthAudit a = gradient_growth_audit(*b, th, u, v);
  EXPECT_LE(a.fitted_c, 1e-8);
  for (std::size_t k = 0; k < a.times.size(); ++k) EXPECT_LE(a.grad_theta[k], a.base[k] * (1 + 1e-12));
  EXPECT_LE(a.theta_t_c, 1.0 + 1e-12);
}

TEST(GrowthAudit, RigidRotationIsIsometric) {
  const auto b = build_torus_basis(Geometry::torus(), 1, 64, 64);
  RotationSetup s;
  s.transport.interpolation.kind = InterpolationKind::lagrange;
  const auto times = uniform_times(0.0, s.t_end / s.steps, s.steps);
  const auto v = constant_field(times, rotation_velocity(b->grid(), s));
  const auto u = constant_coeffs(times, VelocityCoeffs::Zero(static_cast<Eigen::Index>(b->size())));
  const auto th = solve_transport(*b, v, u, blob(*b, pi + s.offset, pi, s.sigma), s.transport);
  const GrowthAudit a = gradient_growth_audit(*b, th, u, v);
  for (double g : a.grad_theta) EXPECT_NEAR(g / a.grad_theta[0], 1.0, 2e-2);
  EXPECT_LE(a.fitted_c, 1e-8);
}

TEST(GrowthAudit, ShearGrowthFittedConstantStable) {
  std::vector<double> cs;
  for (int n : {32, 64}) {
    const auto b = build_torus_basis(Geometry::torus(), 1, n, n);
    const auto times = uniform_times(0.0, 0.1, 30);
    VectorField shear = b->make_vector();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) shear.x(i, j) = std::sin(b->grid().y[j]);
    const auto v = constant_field(times, shear);
    const auto u = constant_coeffs(times, VelocityCoeffs::Zero(static_cast<Eigen::Index>(b->size())));
    const auto th = solve_transport(*b, v, u, blob(*b, pi, pi, 0.8));
    const GrowthAudit a = gradient_growth_audit(*b, th, u, v);
    for (std::size_t k = 1; k < a.times.size(); ++k)
      EXPECT_LE(a.grad_theta[k], a.grad_theta[0] * (1.0 + 1.01 * a.times[k]));
    EXPECT_TRUE(std::isfinite(a.fitted_c));
    cs.push_back(a.fitted_c);
  }
  EXPECT_GT(cs[0], 0.0);
  EXPECT_NEAR(cs[1] / cs[0], 1.0, 0.2);
}

TEST(Characteristics, ChannelFootLeavingDomainIsAnError) {
  const auto b = build_channel_basis(Geometry::channel(), 1, 16, 24, 3);
  VectorField v = b->make_vector();
  for (std::size_t k = 0; k < v.y.size(); ++k) v.y[k] = 1.0;
  EXPECT_THROW(CharacteristicMap(*b, v, v, 0.5, {}), CharacteristicError);
  for (std::size_t k = 0; k < v.y.size(); ++k) v.y[k] = 1e-4;
  const CharacteristicMap small(*b, v, v, 0.01, {});
  EXPECT_GT(small.clamped(), 0);
}

TEST(Characteristics, ChannelAdmissibleFlowNeedsNoClamping) {
  const auto b = build_channel_basis(Geometry::channel(), 2, 16, 32, 4);
  const VectorField v = b->synthesize(smooth_coeffs(b->size(), 0.5, 1.0));
  const CharacteristicMap map(*b, v, v, 0.01, {});
  for (std::size_t k = 0; k < map.foot_y().size(); ++k) {
    EXPECT_GE(map.foot_y()[k], -1e-12);
    EXPECT_LE(map.foot_y()[k], 1.0 + 1e-12);
  }
}
