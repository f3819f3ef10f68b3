#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace bsq {

/// Collocation grid with tensor-product quadrature. Storage is row-major with
/// the x index outermost: value(i, j) lives at i * ny + j.
struct Grid {
  int nx = 0;
  int ny = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> wx;
  std::vector<double> wy;

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * ny + j; }
  double weight(int i, int j) const { return wx[i] * wy[j]; }
};

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(int nx, int ny, double fill = 0.0)
      : nx_(nx), ny_(ny), values_(static_cast<std::size_t>(nx) * ny, fill) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[static_cast<std::size_t>(i) * ny_ + j]; }
  double operator()(int i, int j) const { return values_[static_cast<std::size_t>(i) * ny_ + j]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool same_shape(const ScalarField& o) const { return nx_ == o.nx_ && ny_ == o.ny_; }

  ScalarField& operator+=(const ScalarField& o) {
    check(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    check(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
    return *this;
  }
  ScalarField& operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  /// this += a * o
  ScalarField& axpy(double a, const ScalarField& o) {
    check(o);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * o.values_[k];
    return *this;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

 private:
  void check(const ScalarField& o) const {
    if (!same_shape(o)) throw std::invalid_argument("ScalarField shape mismatch");
  }

  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> values_;
};

struct VectorField {
  ScalarField x;
  ScalarField y;

  VectorField() = default;
  VectorField(int nx, int ny) : x(nx, ny), y(nx, ny) {}
  VectorField(ScalarField fx, ScalarField fy) : x(std::move(fx)), y(std::move(fy)) {
    if (!x.same_shape(y)) throw std::invalid_argument("VectorField component shape mismatch");
  }

  int nx() const { return x.nx(); }
  int ny() const { return x.ny(); }

  VectorField& operator+=(const VectorField& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  VectorField& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  VectorField& axpy(double a, const VectorField& o) {
    x.axpy(a, o.x);
    y.axpy(a, o.y);
    return *this;
  }
};

/// Velocity gradient d(u_i)/d(x_j).
struct GradientField {
  ScalarField ux_x, ux_y, uy_x, uy_y;
};

/// Second derivatives of both velocity components.
struct HessianField {
  ScalarField ux_xx, ux_xy, ux_yy, uy_xx, uy_xy, uy_yy;
};

}  // namespace bsq
