#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "bsq/basis.hpp"
#include "bsq/diagnostics.hpp"
#include "bsq/geometry.hpp"
#include "bsq/picard.hpp"
#include "bsq/scenario.hpp"

namespace bsq {

struct BasisConfig {
  int nx = 64;
  int ny = 64;              // torus grid rows, or channel vertical intervals
  int max_wavenumber = 0;   // torus; 0 selects the largest unaliased value
  int kx_max = 4;           // channel
  int modes_per_k = 8;      // channel
};

struct OutputConfig {
  std::string dir;          // empty: derived from the output root and scenario
  int record_every = 10;    // steps between diagnostics records
  int checkpoint_every = 1; // windows between checkpoints; 0 disables
};

struct SimConfig {
  Geometry geometry;
  BasisConfig basis;
  double horizon = 1.0;
  PicardConfig picard;  // picard.dt is the time step
  ScenarioSpec scenario;
  OutputConfig output;
  AsymptoticThresholds thresholds;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

nlohmann::json to_json(const SimConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
SimConfig config_from_json(const nlohmann::json& j);
SimConfig load_config(const std::string& path);

/// Canonical serialization (sorted keys, round-trip doubles) without the
/// thread count and output directory, which do not affect results.
std::string canonical_dump(const SimConfig& c);
/// FNV-1a 64 of the canonical serialization.
std::uint64_t config_hash(const SimConfig& c);
std::string hash_hex(std::uint64_t h);

BasisPtr build_basis(const SimConfig& c);

}  // namespace bsq
