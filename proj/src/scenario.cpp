#include "bsq/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace bsq {

std::vector<std::string> scenario_names() {
  return {"zero", "blob", "shear-blob", "stratified-perturbation", "single-mode", "random"};
}

ScalarField gaussian_bump(const StokesBasis& basis, double amplitude, double sigma, double cx, double cy) {
  if (!(sigma > 0.0)) throw std::invalid_argument("bump width must be positive");
  const Grid& g = basis.grid();
  const Geometry& geo = basis.geometry();
  const int images_y = geo.is_torus() ? 2 : 0;
  ScalarField f = basis.make_scalar();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      double s = 0.0;
      for (int a = -2; a <= 2; ++a)
        for (int b = -images_y; b <= images_y; ++b) {
          const double dx = g.x[i] - cx + a * geo.lx;
          const double dy = g.y[j] - cy + b * geo.ly;
          s += std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        }
      f(i, j) = amplitude * s;
    }
  return f;
}

BoussinesqState make_initial_state(const StokesBasis& basis, const ScenarioSpec& spec) {
  const Geometry& geo = basis.geometry();
  const Grid& g = basis.grid();
  const double two_pi = 2.0 * std::numbers::pi;
  const double cx = spec.center_x < 0.0 ? 0.5 * geo.lx : spec.center_x;
  const double cy = spec.center_y < 0.0 ? 0.5 * geo.ly : spec.center_y;
  const auto m = static_cast<Eigen::Index>(basis.size());

  BoussinesqState s;
  s.xi = VelocityCoeffs::Zero(m);
  s.theta = basis.make_scalar();
  s.time = 0.0;

  if (spec.name == "zero") return s;
  if (spec.name == "blob") {
    s.theta = gaussian_bump(basis, spec.amplitude, spec.sigma, cx, cy);
    return s;
  }
  if (spec.name == "shear-blob") {
    VectorField shear = basis.make_vector();
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j)
        shear.x(i, j) = spec.shear * (geo.is_torus() ? std::sin(two_pi * g.y[j] / geo.ly)
                                                     : std::sin(std::numbers::pi * g.y[j]));
    s.xi = basis.project(shear);
    s.theta = gaussian_bump(basis, spec.amplitude, spec.sigma, cx, cy);
    return s;
  }
  if (spec.name == "stratified-perturbation") {
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        const double cyv = geo.is_torus() ? std::cos(two_pi * g.y[j] / geo.ly) : std::cos(std::numbers::pi * g.y[j]);
        s.theta(i, j) = spec.delta * std::cos(two_pi * g.x[i] / geo.lx) * cyv;
      }
    return s;
  }
  if (spec.name == "single-mode") {
    if (spec.mode < 0 || spec.mode >= m) throw std::invalid_argument("single-mode index out of range");
    s.xi[spec.mode] = spec.amplitude;
    return s;
  }
  if (spec.name == "random") {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, two_pi);
    const Eigen::Index count = std::min<Eigen::Index>(spec.random_modes, m);
    for (Eigen::Index j = 0; j < count; ++j) s.xi[j] = spec.amplitude * normal(rng) / basis.eigenvalues()[j];
    for (int kx = 0; kx <= 2; ++kx)
      for (int ky = -2; ky <= 2; ++ky) {
        if (kx == 0 && ky <= 0) continue;
        const double a = spec.amplitude * normal(rng) / (kx * kx + ky * ky);
        const double p = phase(rng);
        for (int i = 0; i < g.nx; ++i)
          for (int j = 0; j < g.ny; ++j)
            s.theta(i, j) += a * std::cos(two_pi * (kx * g.x[i] / geo.lx + ky * g.y[j] / geo.ly) + p);
      }
    return s;
  }
  throw std::invalid_argument("unknown scenario '" + spec.name + "'");
}

}  // namespace bsq
