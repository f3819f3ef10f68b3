#pragma once

#include <Eigen/Dense>

#include "bsq/basis.hpp"

namespace bsq {

/// beta_ij = (v . grad w_j, w_i) for a frozen advecting velocity v.
struct AdvectionMatrix {
  Eigen::MatrixXd beta;
  double antisymmetry_defect = 0.0;  // ||beta + beta^T||_max / max(1, ||beta||_max)

  VelocityCoeffs apply(const VelocityCoeffs& xi) const { return beta * xi; }
};

/// Raised by strict assembly when the antisymmetry defect exceeds the tolerance.
class AntisymmetryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Assembles beta column by column. With strict set, a defect above `tol`
/// throws AntisymmetryError.
AdvectionMatrix assemble_advection(const StokesBasis& basis, const VectorField& v, bool strict = false,
                                   double tol = 1e-10);

/// eta_j = (theta e_2, w_j).
VelocityCoeffs assemble_buoyancy(const StokesBasis& basis, const ScalarField& theta);

/// P_m P(v . grad u) evaluated without forming beta.
class AdvectionOperator {
 public:
  AdvectionOperator(const StokesBasis& basis, VectorField v);

  VelocityCoeffs apply(const VelocityCoeffs& xi) const;
  const VectorField& velocity() const { return v_; }
  bool is_zero() const { return zero_; }

 private:
  const StokesBasis* basis_;
  VectorField v_;
  bool zero_;
};

/// v . grad u on the grid.
VectorField advect_field(const VectorField& v, const GradientField& g);

}  // namespace bsq
