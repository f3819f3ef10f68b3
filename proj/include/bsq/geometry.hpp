#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace bsq {

enum class GeometryKind { torus, channel };

/// Torus: periodic in both directions. Channel: periodic in x, no-slip walls
/// at y = 0 and y = 1.
struct Geometry {
  GeometryKind kind = GeometryKind::torus;
  double lx = 2.0 * std::numbers::pi;
  double ly = 2.0 * std::numbers::pi;

  static Geometry torus(double lx = 2.0 * std::numbers::pi, double ly = 2.0 * std::numbers::pi) {
    Geometry g{GeometryKind::torus, lx, ly};
    g.validate();
    return g;
  }
  static Geometry channel(double lx = 2.0 * std::numbers::pi) {
    Geometry g{GeometryKind::channel, lx, 1.0};
    g.validate();
    return g;
  }

  void validate() const {
    if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("geometry side lengths must be positive");
    if (kind == GeometryKind::channel && ly != 1.0)
      throw std::invalid_argument("channel height is fixed to 1");
  }

  bool is_torus() const { return kind == GeometryKind::torus; }
  double area() const { return lx * ly; }
};

inline std::string to_string(GeometryKind k) { return k == GeometryKind::torus ? "torus" : "channel"; }

inline GeometryKind geometry_kind_from_string(const std::string& s) {
  if (s == "torus") return GeometryKind::torus;
  if (s == "channel") return GeometryKind::channel;
  throw std::invalid_argument("unknown geometry kind '" + s + "'");
}

}  // namespace bsq
