#include "bsq/advection.hpp"

#include <algorithm>
#include <sstream>

namespace bsq {

VectorField advect_field(const VectorField& v, const GradientField& g) {
  VectorField out(v.nx(), v.ny());
  for (std::size_t k = 0; k < v.x.size(); ++k) {
    out.x[k] = v.x[k] * g.ux_x[k] + v.y[k] * g.ux_y[k];
    out.y[k] = v.x[k] * g.uy_x[k] + v.y[k] * g.uy_y[k];
  }
  return out;
}

AdvectionMatrix assemble_advection(const StokesBasis& basis, const VectorField& v, bool strict, double tol) {
  basis.check_field(v.x);
  basis.check_field(v.y);
  const auto m = static_cast<Eigen::Index>(basis.size());
  AdvectionMatrix out;
  out.beta = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    VelocityCoeffs e = VelocityCoeffs::Zero(m);
    e[j] = 1.0;
    out.beta.col(j) = basis.project(advect_field(v, basis.synthesize_gradient(e)));
  }
  if (m > 0) {
    const double scale = std::max(1.0, out.beta.cwiseAbs().maxCoeff());
    out.antisymmetry_defect = (out.beta + out.beta.transpose()).cwiseAbs().maxCoeff() / scale;
  }
  if (strict && out.antisymmetry_defect > tol) {
    std::ostringstream os;
    os << "advection matrix antisymmetry defect " << out.antisymmetry_defect << " exceeds " << tol;
    throw AntisymmetryError(os.str());
  }
  return out;
}

VelocityCoeffs assemble_buoyancy(const StokesBasis& basis, const ScalarField& theta) {
  return basis.project_vertical(theta);
}

AdvectionOperator::AdvectionOperator(const StokesBasis& basis, VectorField v)
    : basis_(&basis), v_(std::move(v)), zero_(v_.x.max_abs() == 0.0 && v_.y.max_abs() == 0.0) {
  basis.check_field(v_.x);
  basis.check_field(v_.y);
}

VelocityCoeffs AdvectionOperator::apply(const VelocityCoeffs& xi) const {
  if (zero_) return VelocityCoeffs::Zero(xi.size());
  return basis_->project(advect_field(v_, basis_->synthesize_gradient(xi)));
}

}  // namespace bsq
