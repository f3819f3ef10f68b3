#pragma once

#include <Eigen/Dense>

#include <vector>

namespace bsq::cheb {

/// Chebyshev-Gauss-Lobatto nodes on [-1, 1] in ascending order: z_j = -cos(pi j / n).
std::vector<double> lobatto_nodes(int n);

/// Differentiation matrix for the ascending Lobatto nodes.
Eigen::MatrixXd diff_matrix(int n);

/// Clenshaw-Curtis weights on [-1, 1] for the ascending Lobatto nodes.
std::vector<double> clenshaw_curtis_weights(int n);

/// Chebyshev coefficients of the interpolant through values at the ascending Lobatto nodes.
std::vector<double> coefficients(const std::vector<double>& values);

/// Barycentric evaluation of the Lobatto interpolant at t in [-1, 1].
double evaluate(const std::vector<double>& values, double t);

}  // namespace bsq::cheb
