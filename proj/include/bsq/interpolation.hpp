#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bsq/fft.hpp"
#include "bsq/field.hpp"

namespace bsq {

enum class InterpolationKind { spectral, lagrange };

struct InterpolationSpec {
  InterpolationKind kind = InterpolationKind::spectral;
  /// Number of stencil points per direction for Lagrange interpolation (even).
  int order = 6;
  /// Clip values to the range of the enclosing grid cell.
  bool limiter = false;
  /// Upper bound on the distance from evaluation points to their nearest grid
  /// node; negative means unknown (the worst case is assumed).
  double max_offset = -1.0;
};

std::string to_string(InterpolationKind k);
InterpolationKind interpolation_kind_from_string(const std::string& s);

class ScalarInterpolant {
 public:
  virtual ~ScalarInterpolant() = default;
  virtual double operator()(double x, double y) const = 0;
};

/// Trigonometric interpolation on a uniform periodic grid, evaluated by a
/// Taylor expansion about the nearest node with spectrally exact derivatives.
/// The expansion order is picked so that the truncation error is below
/// roundoff for the field's resolved wavenumber content.
class SpectralInterpolant final : public ScalarInterpolant {
 public:
  SpectralInterpolant(const ScalarField& f, double lx, double ly, const Fft2D& fft, double max_offset,
                      bool limiter);
  double operator()(double x, double y) const override;
  int taylor_order() const { return order_; }

  static constexpr int max_order = 32;

 private:
  int nx_, ny_;
  double lx_, ly_, hx_, hy_;
  int order_ = 0;
  bool limiter_;
  ScalarField source_;
  // derivs_[a][b] holds d^a/dx^a d^b/dy^b / (a! b!) on the grid, a + b <= order_.
  std::vector<std::vector<ScalarField>> derivs_;
};

/// Tensor-product Lagrange interpolation. The x direction is periodic and
/// uniform; the y direction is either periodic-uniform or bounded with
/// arbitrary nodes (one-sided stencils near the ends).
class LagrangeInterpolant final : public ScalarInterpolant {
 public:
  LagrangeInterpolant(const ScalarField& f, const Grid& grid, double lx, double ly, bool periodic_y, int order,
                      bool limiter);
  double operator()(double x, double y) const override;

 private:
  ScalarField source_;
  Grid grid_;
  double lx_, ly_;
  bool periodic_y_;
  int order_;
  bool limiter_;
};

}  // namespace bsq
