#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support/oracles.hpp"

namespace {

constexpr double pi = std::numbers::pi;

struct ModeAmplitudes {
  double a = 0.0, b = 0.0;
};

// Vertical velocity a cos x and density b cos x, read off the grid.
ModeAmplitudes amplitudes(const bsq::VectorField& u, const bsq::ScalarField& th) {
  const int n = u.nx();
  double a = 0.0, b = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < u.ny(); ++j) {
      const double c = std::cos(2 * pi * i / n);
      a += u.y(i, j) * c;
      b += th(i, j) * c;
    }
  const double scale = 2.0 / (static_cast<double>(n) * u.ny());
  return {a * scale, b * scale};
}

}  // namespace

TEST(ChannelOracle, ConvergesAtSecondOrder) {
  const double k = 1.5;
  const double best = oracle::channel_eigenvalues_extrapolated(k, 120, 1)[0];
  const double e1 = std::abs(oracle::channel_eigenvalues_fd(k, 60, 1)[0] - best);
  const double e2 = std::abs(oracle::channel_eigenvalues_fd(k, 121, 1)[0] - best);
  EXPECT_NEAR(e1 / e2, 4.0, 0.4);
}

TEST(ChannelOracle, ClampedBucklingEigenvalue) {
  const auto ev = oracle::channel_eigenvalues_extrapolated(0.0, 100, 1);
  EXPECT_NEAR(ev[0], 4 * pi * pi, 1e-6 * 4 * pi * pi);
}

TEST(ChannelOracle, EigenvaluesAscend) {
  const auto ev = oracle::channel_eigenvalues_fd(2.0, 80, 5);
  ASSERT_EQ(ev.size(), 5u);
  for (std::size_t j = 1; j < ev.size(); ++j) EXPECT_GT(ev[j], ev[j - 1]);
}

TEST(ExpmOracle, DiagonalSystemClosedForm) {
  Eigen::MatrixXd m = Eigen::Vector3d(0.5, 2.0, 7.0).asDiagonal();
  const Eigen::VectorXd eta = Eigen::Vector3d(1.0, -2.0, 0.3);
  const Eigen::VectorXd xi0 = Eigen::Vector3d(0.2, 0.0, -1.0);
  const double t = 0.8;
  const Eigen::VectorXd got = oracle::frozen_linear_solution(m, eta, xi0, t);
  for (int j = 0; j < 3; ++j) {
    const double e = std::exp(-m(j, j) * t);
    EXPECT_NEAR(got[j], e * xi0[j] + (1 - e) / m(j, j) * eta[j], 1e-14);
  }
}

TEST(ExpmOracle, RotationGenerator) {
  Eigen::MatrixXd m(2, 2);
  m << 0.0, -1.0, 1.0, 0.0;
  const Eigen::VectorXd got = oracle::frozen_linear_solution(m, Eigen::VectorXd::Zero(2), Eigen::Vector2d(1.0, 0.0), pi / 3);
  EXPECT_NEAR(got[0], std::cos(pi / 3), 1e-14);
  EXPECT_NEAR(got[1], -std::sin(pi / 3), 1e-14);
}

TEST(QuadratureOracle, ClosedFormIntegrals) {
  EXPECT_NEAR(oracle::periodic_lp_integral([](double x, double) { return std::sin(x); }, 2 * pi, 2 * pi, 2.0),
              2 * pi * pi, 1e-12);
  EXPECT_NEAR(oracle::periodic_lp_integral([](double x, double y) { return 2 + std::cos(x) * std::cos(y); }, 2 * pi,
                                           2 * pi, 2.0),
              17 * pi * pi, 1e-11);
}

TEST(ImexOracle, SingleModeMatchesCoupledDecay) {
  const int n = 16;
  Eigen::MatrixXd m(2, 2);
  m << 1.0, -1.0, 1.0, 0.0;
  const Eigen::VectorXd exact = oracle::frozen_linear_solution(m, Eigen::VectorXd::Zero(2), Eigen::Vector2d(0.1, 0.0), 1.0);
  std::vector<double> errors;
  for (int steps : {50, 100, 200}) {
    bsq::VectorField u0(n, n);
    bsq::ScalarField th0(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) u0.y(i, j) = 0.1 * std::cos(2 * pi * i / n);
    const auto r = oracle::imex_boussinesq(u0, th0, 4, 1.0 / steps, steps);
    ASSERT_EQ(r.times.size(), static_cast<std::size_t>(steps) + 1);
    EXPECT_NEAR(r.times.back(), 1.0, 1e-12);
    EXPECT_LE(r.velocity.back().x.max_abs(), 1e-14);
    const auto amp = amplitudes(r.velocity.back(), r.theta.back());
    errors.push_back(std::hypot(amp.a - exact[0], amp.b - exact[1]));
  }
  EXPECT_LE(errors.back(), 1e-5);
  EXPECT_NEAR(errors[0] / errors[1], 4.0, 0.6);
  EXPECT_NEAR(errors[1] / errors[2], 4.0, 0.6);
}
