#include "bsq/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bsq {

VelocityCoeffs StokesBasis::project_vertical(const ScalarField& f) const {
  return project(VectorField(ScalarField(f.nx(), f.ny()), f));
}

VectorField StokesBasis::mode(std::size_t j) const {
  if (j >= size()) throw std::out_of_range("mode index out of range");
  VelocityCoeffs e = VelocityCoeffs::Zero(static_cast<Eigen::Index>(size()));
  e[static_cast<Eigen::Index>(j)] = 1.0;
  return synthesize(e);
}

double StokesBasis::integrate(const ScalarField& f) const {
  check_field(f);
  double s = 0.0;
  for (int i = 0; i < grid_.nx; ++i) {
    double row = 0.0;
    for (int j = 0; j < grid_.ny; ++j) row += grid_.wy[j] * f(i, j);
    s += grid_.wx[i] * row;
  }
  return s;
}

double StokesBasis::inner(const ScalarField& a, const ScalarField& b) const {
  check_field(a);
  check_field(b);
  double s = 0.0;
  for (int i = 0; i < grid_.nx; ++i) {
    double row = 0.0;
    for (int j = 0; j < grid_.ny; ++j) row += grid_.wy[j] * a(i, j) * b(i, j);
    s += grid_.wx[i] * row;
  }
  return s;
}

double StokesBasis::inner(const VectorField& a, const VectorField& b) const {
  return inner(a.x, b.x) + inner(a.y, b.y);
}

double StokesBasis::lp_norm(const ScalarField& f, double p) const {
  check_field(f);
  if (std::isinf(p)) return f.max_abs();
  double s = 0.0;
  for (int i = 0; i < grid_.nx; ++i)
    for (int j = 0; j < grid_.ny; ++j) s += grid_.weight(i, j) * std::pow(std::abs(f(i, j)), p);
  return std::pow(s, 1.0 / p);
}

void StokesBasis::check_coeffs(const VelocityCoeffs& xi) const {
  if (static_cast<std::size_t>(xi.size()) != size())
    throw std::invalid_argument("coefficient vector length " + std::to_string(xi.size()) +
                                " does not match basis size " + std::to_string(size()));
}

void StokesBasis::check_field(const ScalarField& f) const {
  if (f.nx() != grid_.nx || f.ny() != grid_.ny)
    throw std::invalid_argument("field dimensions " + std::to_string(f.nx()) + "x" + std::to_string(f.ny()) +
                                " do not match basis grid " + std::to_string(grid_.nx) + "x" +
                                std::to_string(grid_.ny));
}

BasisReport StokesBasis::verify() const {
  BasisReport report;
  report.rejected = rejected_;
  const auto m = static_cast<Eigen::Index>(size());
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (m == 0) return report;

  // Weighted sample matrix: rows are (component, node), columns are modes.
  Eigen::MatrixXd samples(2 * n, m);
  Eigen::VectorXd sqrt_w(n);
  for (int i = 0; i < grid_.nx; ++i)
    for (int j = 0; j < grid_.ny; ++j)
      sqrt_w[static_cast<Eigen::Index>(grid_.index(i, j))] = std::sqrt(grid_.weight(i, j));

  for (Eigen::Index c = 0; c < m; ++c) {
    const VectorField w = mode(static_cast<std::size_t>(c));
    for (Eigen::Index k = 0; k < n; ++k) {
      samples(k, c) = sqrt_w[k] * w.x[static_cast<std::size_t>(k)];
      samples(n + k, c) = sqrt_w[k] * w.y[static_cast<std::size_t>(k)];
    }
    report.divergence_max = std::max(report.divergence_max, norm(divergence(w)));

    if (!geometry_.is_torus()) {
      for (int i = 0; i < grid_.nx; ++i)
        for (int j : {0, grid_.ny - 1})
          report.wall_max = std::max({report.wall_max, std::abs(w.x(i, j)), std::abs(w.y(i, j))});
    }

    VelocityCoeffs e = VelocityCoeffs::Zero(m);
    e[c] = 1.0;
    const HessianField h = synthesize_hessian(e);
    VectorField minus_lap(-1.0 * (h.ux_xx + h.ux_yy), -1.0 * (h.uy_xx + h.uy_yy));
    VelocityCoeffs r = project(minus_lap);
    r[c] -= eigenvalues_[c];
    report.eigen_residual = std::max(report.eigen_residual, r.norm());
  }
  const Eigen::MatrixXd gram = samples.transpose() * samples;
  report.orthonormality_error = (gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
  return report;
}

double l2_norm(const VelocityCoeffs& xi) { return xi.norm(); }

double v_norm(const StokesBasis& basis, const VelocityCoeffs& xi) {
  return std::sqrt((basis.eigenvalues().array() * xi.array().square()).sum());
}

double da_norm(const StokesBasis& basis, const VelocityCoeffs& xi) {
  return std::sqrt((basis.eigenvalues().array().square() * xi.array().square()).sum());
}

}  // namespace bsq
