#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bsq/advection.hpp"
#include "bsq/channel_basis.hpp"
#include "bsq/linear_solver.hpp"
#include "bsq/torus_basis.hpp"
#include "bsq/trajectory.hpp"
#include "oracles.hpp"

using namespace bsq;

namespace {

constexpr double pi = std::numbers::pi;

BasisPtr small_torus() {
  static const BasisPtr b = build_torus_basis(Geometry::torus(), 4, 16, 16);
  return b;
}

VelocityCoeffs smooth_coeffs(std::size_t m, double phase, double scale = 1.0) {
  VelocityCoeffs xi(static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < xi.size(); ++j) xi[j] = scale * std::sin(1.3 * j + phase) / (1.0 + 0.5 * j);
  return xi;
}

ScalarField smooth_scalar(const StokesBasis& b, double a) {
  ScalarField s = b.make_scalar();
  const Grid& g = b.grid();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) s(i, j) = std::sin(g.x[i] + a) * std::cos(2 * g.y[j]) + 0.3 * std::cos(g.y[j] - a);
  return s;
}

ScalarTrajectory theta_trajectory(const StokesBasis& b, const std::vector<double>& times, double amp) {
  ScalarTrajectory th;
  th.times = times;
  for (double t : times) {
    ScalarField s = smooth_scalar(b, t);
    s *= amp;
    th.states.push_back(std::move(s));
  }
  return th;
}

double linear_energy_residual(const StokesBasis& b, const VelocityTrajectory& u, const ScalarTrajectory& th) {
  const auto& lam = b.eigenvalues();
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    const double dt = u.times[k + 1] - u.times[k];
    const VelocityCoeffs &a = u.states[k], &c = u.states[k + 1];
    const VelocityCoeffs ea = assemble_buoyancy(b, th.states[k]), ec = assemble_buoyancy(b, th.states[k + 1]);
    const double r = (c.squaredNorm() - a.squaredNorm()) / (2.0 * dt) +
                     0.5 * (lam.dot(a.cwiseAbs2()) + lam.dot(c.cwiseAbs2())) - 0.5 * (a.dot(ea) + c.dot(ec));
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace

TEST(Advection, ZeroVelocityGivesZeroMatrix) {
  const auto b = small_torus();
  const AdvectionMatrix a = assemble_advection(*b, b->make_vector());
  EXPECT_EQ(a.beta.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Advection, AntisymmetricWithZeroDiagonal) {
  const auto b = small_torus();
  for (double phase : {0.0, 1.0, 2.0}) {
    const AdvectionMatrix a = assemble_advection(*b, b->synthesize(smooth_coeffs(b->size(), phase)), true);
    EXPECT_LE((a.beta + a.beta.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(a.beta.diagonal().cwiseAbs().maxCoeff(), 1e-10);
    const VelocityCoeffs xi = smooth_coeffs(b->size(), phase + 0.5);
    EXPECT_NEAR(xi.dot(a.apply(xi)), 0.0, 1e-10);
  }
}

TEST(Advection, ChannelAntisymmetry) {
  const auto b = build_channel_basis(Geometry::channel(), 2, 16, 48, 4);
  const AdvectionMatrix a = assemble_advection(*b, b->synthesize(smooth_coeffs(b->size(), 0.4)));
  EXPECT_LE((a.beta + a.beta.transpose()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Advection, MatchesClosedFormQuadratureAtDoubledResolution) {
  const auto coarse = build_torus_basis(Geometry::torus(), 4, 16, 16);
  const auto& tb = static_cast<const TorusBasis&>(*coarse);
  const AdvectionMatrix a = assemble_advection(tb, tb.mode(0));
  const int n = 32;
  const double h = 2 * pi / n;
  const double norm = std::sqrt(2.0) / (2 * pi);
  auto value = [&](std::size_t j, double x, double y, bool deriv, int dir) {
    const auto& m = tb.mode_info(j);
    const double ph = m.wx * x + m.wy * y;
    double s = m.sine ? std::sin(ph) : std::cos(ph);
    if (deriv) s = (m.sine ? std::cos(ph) : -std::sin(ph)) * (dir == 0 ? m.wx : m.wy);
    return std::array<double, 2>{norm * m.ex * s, norm * m.ey * s};
  };
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      double sum = 0.0;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          const double x = p * h, y = q * h;
          const auto v = value(0, x, y, false, 0);
          const auto gx = value(j, x, y, true, 0), gy = value(j, x, y, true, 1);
          const auto wi = value(i, x, y, false, 0);
          sum += (v[0] * gx[0] + v[1] * gy[0]) * wi[0] + (v[0] * gx[1] + v[1] * gy[1]) * wi[1];
        }
      EXPECT_NEAR(a.beta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), sum * h * h, 1e-13);
    }
}

TEST(Advection, StrictModeRejectsCompressibleField) {
  const auto b = small_torus();
  VectorField v = b->make_vector();
  const Grid& g = b->grid();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) v.x(i, j) = std::sin(g.x[i]);
  EXPECT_THROW(assemble_advection(*b, v, true), AntisymmetryError);
  EXPECT_GT(assemble_advection(*b, v).antisymmetry_defect, 1e-3);
}

TEST(Advection, OperatorMatchesMatrix) {
  const auto b = small_torus();
  const VectorField v = b->synthesize(smooth_coeffs(b->size(), 0.9));
  const AdvectionMatrix a = assemble_advection(*b, v);
  const AdvectionOperator op(*b, v);
  const VelocityCoeffs xi = smooth_coeffs(b->size(), 2.2);
  EXPECT_LE((a.apply(xi) - op.apply(xi)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Buoyancy, ZeroAndConstantDensity) {
  const auto b = small_torus();
  EXPECT_EQ(assemble_buoyancy(*b, b->make_scalar()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE(assemble_buoyancy(*b, b->make_scalar(3.7)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Buoyancy, CosineDensityHitsOnlyUnitHorizontalModes) {
  const auto b = small_torus();
  const auto& tb = static_cast<const TorusBasis&>(*b);
  ScalarField th = b->make_scalar();
  for (int i = 0; i < b->grid().nx; ++i)
    for (int j = 0; j < b->grid().ny; ++j) th(i, j) = std::cos(b->grid().x[i]);
  const VelocityCoeffs eta = assemble_buoyancy(*b, th);
  for (std::size_t j = 0; j < b->size(); ++j) {
    const auto& m = tb.mode_info(j);
    const double expected = (m.kx == 1 && m.ky == 0 && !m.sine) ? m.ey * pi * std::sqrt(2.0) : 0.0;
    EXPECT_NEAR(eta[static_cast<Eigen::Index>(j)], expected, 1e-12) << b->descriptor(j);
  }
}

TEST(StepLinear, PureDecayIsExact) {
  const auto b = small_torus();
  const std::size_t m = b->size();
  const VelocityCoeffs xi = smooth_coeffs(m, 0.1);
  const AdvectionMatrix zero{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)), 0.0};
  const double dt = 0.013;
  const VelocityCoeffs next = step_linear(*b, xi, zero, VelocityCoeffs::Zero(static_cast<Eigen::Index>(m)), dt);
  for (Eigen::Index j = 0; j < xi.size(); ++j) {
    const double exact = std::exp(-b->eigenvalues()[j] * dt) * xi[j];
    if (exact != 0.0) EXPECT_LE(std::abs(next[j] - exact) / std::abs(exact), 1e-13);
  }
}

TEST(StepLinear, ConstantForcingMatchesVariationOfConstants) {
  const auto b = small_torus();
  const Eigen::VectorXd& lam = b->eigenvalues();
  const std::size_t m = b->size();
  const VelocityCoeffs xi = smooth_coeffs(m, 0.3), eta = smooth_coeffs(m, 1.1, 2.0);
  const AdvectionMatrix zero{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)), 0.0};
  auto error = [&](double dt) {
    const VelocityCoeffs next = step_linear(*b, xi, zero, eta, dt);
    double e = 0.0;
    for (Eigen::Index j = 0; j < xi.size(); ++j) {
      const double exact = std::exp(-lam[j] * dt) * xi[j] + (1.0 - std::exp(-lam[j] * dt)) / lam[j] * eta[j];
      e = std::max(e, std::abs(next[j] - exact));
    }
    return e;
  };
  EXPECT_LE(error(0.02), 1e-14);
  EXPECT_LE(error(0.3), 1e-14);

  VelocityCoeffs x = xi;
  for (int s = 0; s < 4000; ++s) x = step_linear(*b, x, zero, eta, 0.01);
  EXPECT_LE((x - eta.cwiseQuotient(lam)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(StepLinear, FrozenSystemConvergesToMatrixExponentialAtSecondOrder) {
  const auto b = small_torus();
  const std::size_t m = b->size();
  const AdvectionMatrix beta = assemble_advection(*b, b->synthesize(smooth_coeffs(m, 0.6, 3.0)));
  const VelocityCoeffs xi0 = smooth_coeffs(m, 0.2), eta = smooth_coeffs(m, 2.5);
  const Eigen::MatrixXd full = Eigen::MatrixXd(b->eigenvalues().asDiagonal()) + beta.beta;
  const double t = 0.5;
  const Eigen::VectorXd exact = oracle::frozen_linear_solution(full, eta, xi0, t);
  std::vector<double> errors;
  for (int steps : {25, 50, 100}) {
    VelocityCoeffs x = xi0;
    for (int s = 0; s < steps; ++s) x = step_linear(*b, x, beta, eta, t / steps);
    errors.push_back((x - exact).norm());
  }
  for (int k = 0; k < 2; ++k) {
    EXPECT_GT(errors[k] / errors[k + 1], 3.5);
    EXPECT_LT(errors[k] / errors[k + 1], 4.5);
  }
}

TEST(SolveLinearNse, StokesDecayClosedForm) {
  const auto b = small_torus();
  const auto times = uniform_times(0.0, 0.01, 50);
  ScalarTrajectory th;
  th.times = times;
  th.states.assign(times.size(), b->make_scalar());
  const VelocityCoeffs xi0 = smooth_coeffs(b->size(), 0.7);
  const VelocityTrajectory u = solve_linear_nse(*b, zero_field_trajectory(*b, times), th, xi0);
  const auto& lam = b->eigenvalues();
  for (std::size_t k = 0; k < u.size(); ++k) {
    double expected = 0.0;
    for (Eigen::Index j = 0; j < lam.size(); ++j)
      expected += lam[j] * std::exp(-2 * lam[j] * times[k]) * xi0[j] * xi0[j];
    EXPECT_NEAR(std::pow(v_norm(*b, u.states[k]), 2), expected, 1e-12 * std::max(1.0, expected));
  }
  ASSERT_EQ(u.rates.size(), u.size());
  EXPECT_LE((u.rates[0] + lam.cwiseProduct(xi0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveLinearNse, FixedDensityReachesSteadyState) {
  const auto b = small_torus();
  const auto times = uniform_times(0.0, 0.05, 800);
  ScalarTrajectory th;
  th.times = times;
  th.states.assign(times.size(), smooth_scalar(*b, 0.4));
  const VelocityTrajectory u =
      solve_linear_nse(*b, zero_field_trajectory(*b, times), th, VelocityCoeffs::Zero(static_cast<Eigen::Index>(b->size())));
  const VelocityCoeffs target = assemble_buoyancy(*b, th.states[0]).cwiseQuotient(b->eigenvalues());
  EXPECT_LE((u.states.back() - target).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveLinearNse, EnergyBalanceResidualIsSecondOrder) {
  const auto b = small_torus();
  auto residual = [&](int steps) {
    const auto times = uniform_times(0.0, 0.4 / steps, steps);
    VelocityTrajectory vt;
    vt.times = times;
    for (double t : times) vt.states.push_back(smooth_coeffs(b->size(), t, 2.0));
    const auto th = theta_trajectory(*b, times, 1.0);
    const auto u = solve_linear_nse(*b, synthesize_trajectory(*b, vt), th, smooth_coeffs(b->size(), 0.0));
    return linear_energy_residual(*b, u, th);
  };
  const double r1 = residual(40), r2 = residual(80);
  EXPECT_GT(r1 / r2, 3.5);
  EXPECT_LT(r1 / r2, 4.5);
}

TEST(SolveLinearNse, SuperpositionAndDeterminism) {
  const auto b = small_torus();
  const auto times = uniform_times(0.0, 0.01, 30);
  VelocityTrajectory vt;
  vt.times = times;
  for (double t : times) vt.states.push_back(smooth_coeffs(b->size(), 3 * t, 1.5));
  const FieldTrajectory v = synthesize_trajectory(*b, vt);
  const auto tha = theta_trajectory(*b, times, 1.0), thb = theta_trajectory(*b, times, -0.4);
  ScalarTrajectory thab = tha;
  for (std::size_t k = 0; k < times.size(); ++k) thab.states[k] += thb.states[k];
  const VelocityCoeffs xa = smooth_coeffs(b->size(), 0.1), xb = smooth_coeffs(b->size(), 0.9);
  const auto ua = solve_linear_nse(*b, v, tha, xa), ub = solve_linear_nse(*b, v, thb, xb);
  const auto uab = solve_linear_nse(*b, v, thab, xa + xb);
  for (std::size_t k = 0; k < times.size(); ++k)
    EXPECT_LE((uab.states[k] - ua.states[k] - ub.states[k]).cwiseAbs().maxCoeff(), 1e-12);
  const auto again = solve_linear_nse(*b, v, tha, xa);
  for (std::size_t k = 0; k < times.size(); ++k) EXPECT_TRUE(again.states[k] == ua.states[k]);
}

TEST(SolveLinearNse, RejectsMismatchedTimeGrids) {
  const auto b = small_torus();
  const auto times = uniform_times(0.0, 0.01, 10);
  const auto th = theta_trajectory(*b, uniform_times(0.0, 0.02, 10), 1.0);
  EXPECT_THROW(solve_linear_nse(*b, zero_field_trajectory(*b, times), th,
                                VelocityCoeffs::Zero(static_cast<Eigen::Index>(b->size()))),
               std::invalid_argument);
}
