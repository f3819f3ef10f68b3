#include "bsq/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

namespace bsq {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument("config section '" + where + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw std::invalid_argument("unknown config key '" + where + "." + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json section(const json& j, const char* key) { return j.contains(key) ? j.at(key) : json::object(); }

}  // namespace

void SimConfig::validate() const {
  geometry.validate();
  if (basis.nx < 4 || basis.ny < 4) throw std::invalid_argument("basis.nx and basis.ny must be at least 4");
  if (basis.max_wavenumber < 0) throw std::invalid_argument("basis.max_wavenumber must be non-negative");
  if (basis.kx_max < 0) throw std::invalid_argument("basis.kx_max must be non-negative");
  if (basis.modes_per_k < 1) throw std::invalid_argument("basis.modes_per_k must be at least 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("time.horizon must be positive");
  picard.validate();
  if (output.record_every < 1) throw std::invalid_argument("output.record_every must be at least 1");
  if (output.checkpoint_every < 0) throw std::invalid_argument("output.checkpoint_every must be non-negative");
  if (threads < 0) throw std::invalid_argument("threads must be non-negative");
  if (!(thresholds.tail_fraction > 0.0 && thresholds.tail_fraction <= 1.0))
    throw std::invalid_argument("diagnostics.tail_fraction must be in (0, 1]");
  bool known = false;
  for (const auto& n : scenario_names()) known = known || n == scenario.name;
  if (!known) throw std::invalid_argument("unknown scenario '" + scenario.name + "'");
}

json to_json(const SimConfig& c) {
  json j;
  j["geometry"] = {{"kind", to_string(c.geometry.kind)}, {"lx", c.geometry.lx}, {"ly", c.geometry.ly}};
  j["basis"] = {{"nx", c.basis.nx},
                {"ny", c.basis.ny},
                {"max_wavenumber", c.basis.max_wavenumber},
                {"kx_max", c.basis.kx_max},
                {"modes_per_k", c.basis.modes_per_k}};
  j["time"] = {{"dt", c.picard.dt}, {"horizon", c.horizon}};
  const auto& p = c.picard;
  j["picard"] = {{"tol", p.tol},
                 {"n_max", p.n_max},
                 {"window_max", p.window_max},
                 {"ratio_threshold", p.ratio_threshold},
                 {"max_bisections", p.max_bisections},
                 {"coupling", to_string(p.coupling)},
                 {"coupling_iterations", p.coupling_iterations},
                 {"inner_max", p.inner_max},
                 {"inner_tol", p.inner_tol}};
  j["transport"] = {{"interpolation", to_string(p.transport.interpolation.kind)},
                    {"order", p.transport.interpolation.order},
                    {"limiter", p.transport.interpolation.limiter},
                    {"substeps", p.transport.substeps}};
  const auto& s = c.scenario;
  j["scenario"] = {{"name", s.name},         {"amplitude", s.amplitude}, {"sigma", s.sigma},
                   {"center_x", s.center_x}, {"center_y", s.center_y},   {"shear", s.shear},
                   {"delta", s.delta},       {"mode", s.mode},           {"random_modes", s.random_modes},
                   {"seed", s.seed}};
  j["output"] = {{"dir", c.output.dir},
                 {"record_every", c.output.record_every},
                 {"checkpoint_every", c.output.checkpoint_every}};
  const auto& t = c.thresholds;
  j["diagnostics"] = {{"tail_fraction", t.tail_fraction},         {"grad_decay_frac", t.grad_decay_frac},
                      {"residual_decay_frac", t.residual_decay_frac}, {"au_slope_max", t.au_slope_max},
                      {"rho_growth_max", t.rho_growth_max},       {"probe_frac", t.probe_frac},
                      {"min_tail_samples", t.min_tail_samples},   {"log_floor", t.log_floor}};
  j["threads"] = c.threads;
  return j;
}

SimConfig config_from_json(const json& j) {
  reject_unknown(j, {"geometry", "basis", "time", "picard", "transport", "scenario", "output", "diagnostics", "threads"},
                 "config");
  SimConfig c;
  const json g = section(j, "geometry");
  reject_unknown(g, {"kind", "lx", "ly"}, "geometry");
  if (g.contains("kind")) c.geometry.kind = geometry_kind_from_string(g.at("kind").get<std::string>());
  if (!c.geometry.is_torus()) c.geometry.ly = 1.0;
  read(g, "lx", c.geometry.lx);
  read(g, "ly", c.geometry.ly);

  const json b = section(j, "basis");
  reject_unknown(b, {"nx", "ny", "max_wavenumber", "kx_max", "modes_per_k"}, "basis");
  read(b, "nx", c.basis.nx);
  read(b, "ny", c.basis.ny);
  read(b, "max_wavenumber", c.basis.max_wavenumber);
  read(b, "kx_max", c.basis.kx_max);
  read(b, "modes_per_k", c.basis.modes_per_k);

  const json t = section(j, "time");
  reject_unknown(t, {"dt", "horizon"}, "time");
  read(t, "dt", c.picard.dt);
  read(t, "horizon", c.horizon);

  const json p = section(j, "picard");
  reject_unknown(p, {"tol", "n_max", "window_max", "ratio_threshold", "max_bisections", "coupling",
                     "coupling_iterations", "inner_max", "inner_tol"},
                 "picard");
  read(p, "tol", c.picard.tol);
  read(p, "n_max", c.picard.n_max);
  read(p, "window_max", c.picard.window_max);
  read(p, "ratio_threshold", c.picard.ratio_threshold);
  read(p, "max_bisections", c.picard.max_bisections);
  if (p.contains("coupling")) c.picard.coupling = coupling_mode_from_string(p.at("coupling").get<std::string>());
  read(p, "coupling_iterations", c.picard.coupling_iterations);
  read(p, "inner_max", c.picard.inner_max);
  read(p, "inner_tol", c.picard.inner_tol);

  const json tr = section(j, "transport");
  reject_unknown(tr, {"interpolation", "order", "limiter", "substeps"}, "transport");
  if (tr.contains("interpolation"))
    c.picard.transport.interpolation.kind =
        interpolation_kind_from_string(tr.at("interpolation").get<std::string>());
  read(tr, "order", c.picard.transport.interpolation.order);
  read(tr, "limiter", c.picard.transport.interpolation.limiter);
  read(tr, "substeps", c.picard.transport.substeps);

  const json s = section(j, "scenario");
  reject_unknown(s, {"name", "amplitude", "sigma", "center_x", "center_y", "shear", "delta", "mode", "random_modes",
                     "seed"},
                 "scenario");
  read(s, "name", c.scenario.name);
  read(s, "amplitude", c.scenario.amplitude);
  read(s, "sigma", c.scenario.sigma);
  read(s, "center_x", c.scenario.center_x);
  read(s, "center_y", c.scenario.center_y);
  read(s, "shear", c.scenario.shear);
  read(s, "delta", c.scenario.delta);
  read(s, "mode", c.scenario.mode);
  read(s, "random_modes", c.scenario.random_modes);
  read(s, "seed", c.scenario.seed);

  const json o = section(j, "output");
  reject_unknown(o, {"dir", "record_every", "checkpoint_every"}, "output");
  read(o, "dir", c.output.dir);
  read(o, "record_every", c.output.record_every);
  read(o, "checkpoint_every", c.output.checkpoint_every);

  const json d = section(j, "diagnostics");
  reject_unknown(d, {"tail_fraction", "grad_decay_frac", "residual_decay_frac", "au_slope_max", "rho_growth_max",
                     "probe_frac", "min_tail_samples", "log_floor"},
                 "diagnostics");
  read(d, "tail_fraction", c.thresholds.tail_fraction);
  read(d, "grad_decay_frac", c.thresholds.grad_decay_frac);
  read(d, "residual_decay_frac", c.thresholds.residual_decay_frac);
  read(d, "au_slope_max", c.thresholds.au_slope_max);
  read(d, "rho_growth_max", c.thresholds.rho_growth_max);
  read(d, "probe_frac", c.thresholds.probe_frac);
  read(d, "min_tail_samples", c.thresholds.min_tail_samples);
  read(d, "log_floor", c.thresholds.log_floor);

  read(j, "threads", c.threads);
  c.validate();
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string canonical_dump(const SimConfig& c) {
  json j = to_json(c);
  j.erase("threads");
  j["output"].erase("dir");
  return j.dump();
}

std::uint64_t config_hash(const SimConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical_dump(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

BasisPtr build_basis(const SimConfig& c) {
  if (c.geometry.is_torus()) {
    const int k = c.basis.max_wavenumber > 0 ? c.basis.max_wavenumber : (std::min(c.basis.nx, c.basis.ny) - 1) / 3;
    return build_torus_basis(c.geometry, k, c.basis.nx, c.basis.ny);
  }
  return build_channel_basis(c.geometry, c.basis.kx_max, c.basis.nx, c.basis.ny, c.basis.modes_per_k);
}

}  // namespace bsq
