#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsq/basis.hpp"
#include "bsq/picard.hpp"

namespace bsq {

/// Initial-data preset. Centers default to the middle of the domain.
struct ScenarioSpec {
  std::string name = "blob";
  double amplitude = 1.0;  // density bump height, or velocity scale for single-mode/random
  double sigma = 0.6;      // bump width
  double center_x = -1.0;  // negative: domain center
  double center_y = -1.0;
  double shear = 0.2;  // shear-blob velocity amplitude
  double delta = 0.1;  // stratified-perturbation amplitude
  int mode = 0;        // single-mode index
  int random_modes = 8;
  std::uint64_t seed = 1;
};

std::vector<std::string> scenario_names();

/// (u0, theta0) projected into the discretization at time 0.
BoussinesqState make_initial_state(const StokesBasis& basis, const ScenarioSpec& spec);

/// Periodized Gaussian bump sampled on the basis grid.
ScalarField gaussian_bump(const StokesBasis& basis, double amplitude, double sigma, double cx, double cy);

}  // namespace bsq
