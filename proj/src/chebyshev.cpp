#include "bsq/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bsq::cheb {

std::vector<double> lobatto_nodes(int n) {
  if (n < 1) throw std::invalid_argument("lobatto_nodes: n must be >= 1");
  std::vector<double> z(n + 1);
  for (int j = 0; j <= n; ++j) z[j] = -std::cos(std::numbers::pi * j / n);
  // Symmetrize so that z[n - j] == -z[j] exactly.
  for (int j = 0; j <= n / 2; ++j) {
    const double v = 0.5 * (z[j] - z[n - j]);
    z[j] = v;
    z[n - j] = -v;
  }
  if (n % 2 == 0) z[n / 2] = 0.0;
  return z;
}

Eigen::MatrixXd diff_matrix(int n) {
  const auto z = lobatto_nodes(n);
  std::vector<double> w(n + 1);
  for (int j = 0; j <= n; ++j) w[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    double diag = 0.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      d(i, j) = (w[j] / w[i]) / (z[i] - z[j]);
      diag -= d(i, j);
    }
    d(i, i) = diag;  // negative-sum trick
  }
  return d;
}

std::vector<double> clenshaw_curtis_weights(int n) {
  // Trefethen, Spectral Methods in MATLAB, clencurt.
  std::vector<double> w(n + 1, 0.0);
  const double pi = std::numbers::pi;
  std::vector<double> theta(n + 1);
  for (int j = 0; j <= n; ++j) theta[j] = pi * j / n;
  if (n % 2 == 0) {
    w[0] = w[n] = 1.0 / (n * n - 1.0);
    for (int j = 1; j < n; ++j) {
      double v = 1.0;
      for (int k = 1; k < n / 2; ++k) v -= 2.0 * std::cos(2.0 * k * theta[j]) / (4.0 * k * k - 1.0);
      v -= std::cos(n * theta[j]) / (n * n - 1.0);
      w[j] = 2.0 * v / n;
    }
  } else {
    w[0] = w[n] = 1.0 / (static_cast<double>(n) * n);
    for (int j = 1; j < n; ++j) {
      double v = 1.0;
      for (int k = 1; k <= (n - 1) / 2; ++k) v -= 2.0 * std::cos(2.0 * k * theta[j]) / (4.0 * k * k - 1.0);
      w[j] = 2.0 * v / n;
    }
  }
  return w;  // symmetric, so ordering of nodes does not matter
}

std::vector<double> coefficients(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size()) - 1;
  std::vector<double> c(n + 1, 0.0);
  // Node j (ascending) corresponds to theta = pi (n - j) / n in the descending convention.
  for (int k = 0; k <= n; ++k) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double theta = std::numbers::pi * (n - j) / n;
      const double f = (j == 0 || j == n) ? 0.5 : 1.0;
      s += f * values[j] * std::cos(k * theta);
    }
    c[k] = 2.0 * s / n;
  }
  c[0] *= 0.5;
  c[n] *= 0.5;
  return c;
}

double evaluate(const std::vector<double>& values, double t) {
  const int n = static_cast<int>(values.size()) - 1;
  const auto z = lobatto_nodes(n);
  double num = 0.0, den = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double diff = t - z[j];
    if (diff == 0.0) return values[j];
    const double w = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0) / diff;
    num += w * values[j];
    den += w;
  }
  return num / den;
}

}  // namespace bsq::cheb
