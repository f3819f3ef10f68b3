#include "bsq/channel_basis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "bsq/chebyshev.hpp"

namespace bsq {
namespace {

constexpr double kResidualGate = 1e-8;
constexpr double kResolutionGate = 1e-8;

double tail_ratio(const std::vector<double>& values) {
  const auto c = cheb::coefficients(values);
  const int n = static_cast<int>(c.size()) - 1;
  double head = 0.0, tail = 0.0;
  for (int j = 0; j <= n; ++j) {
    head = std::max(head, std::abs(c[j]));
    if (j >= n - 3) tail = std::max(tail, std::abs(c[j]));
  }
  return head > 0.0 ? tail / head : 0.0;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Fix the sign so that the entry of largest magnitude is positive.
void fix_sign(Eigen::VectorXd& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0.0) v = -v;
}

struct Candidate {
  double lambda;
  Eigen::VectorXd vec;
};

std::vector<Candidate> real_positive_eigenpairs(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw std::runtime_error("channel eigensolve failed");
  std::vector<Candidate> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto ev = es.eigenvalues()[i];
    if (!std::isfinite(ev.real()) || ev.real() <= 0.0) continue;
    if (std::abs(ev.imag()) > 1e-8 * std::abs(ev.real())) continue;
    Eigen::VectorXd v = es.eigenvectors().col(i).real();
    if (v.norm() == 0.0) continue;
    v /= v.norm();
    fix_sign(v);
    out.push_back({ev.real(), std::move(v)});
  }
  std::sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) { return x.lambda < y.lambda; });
  return out;
}

}  // namespace

ChannelEigenpairs solve_channel_eigenproblem(double k, int ny, int count) {
  if (ny < 4) throw std::invalid_argument("channel eigensolve needs at least 4 intervals");
  const int n = ny;
  const int m = n - 1;
  const auto z = cheb::lobatto_nodes(n);
  const Eigen::MatrixXd d = cheb::diff_matrix(n);
  const Eigen::MatrixXd d2 = d * d;
  const Eigen::MatrixXd d3 = d2 * d;
  const Eigen::MatrixXd d4 = d3 * d;

  ChannelEigenpairs result;
  auto reject = [&](double lambda, const std::string& why) {
    std::ostringstream os;
    os << "k=" << k << " lambda=" << lambda << ": " << why;
    result.rejected.push_back(os.str());
  };

  auto pad = [&](const Eigen::VectorXd& interior) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n + 1);
    full.segment(1, m) = interior;
    return full;
  };

  if (k == 0.0) {
    const Eigen::MatrixXd a = -4.0 * d2.block(1, 1, m, m);
    for (auto& c : real_positive_eigenpairs(a)) {
      if (static_cast<int>(result.lambda.size()) == count) break;
      const double res = (a * c.vec - c.lambda * c.vec).norm() / (c.lambda * c.vec.norm());
      const Eigen::VectorXd u = pad(c.vec);
      if (res > kResidualGate) {
        reject(c.lambda, "residual " + std::to_string(res));
        continue;
      }
      if (tail_ratio(to_std(u)) > kResolutionGate) {
        reject(c.lambda, "unresolved profile");
        continue;
      }
      std::array<std::vector<double>, 4> prof;
      prof[0].assign(n + 1, 0.0);
      prof[1] = to_std(u);
      prof[2] = to_std(2.0 * (d * u));
      prof[3] = to_std(4.0 * (d2 * u));
      result.lambda.push_back(c.lambda);
      result.profiles.push_back(std::move(prof));
    }
    return result;
  }

  // Clamped streamfunction phi = (1 - z^2) q with q = 0 at both ends.
  Eigen::VectorXd zi(m), si(m);
  for (int i = 0; i < m; ++i) {
    zi[i] = z[i + 1];
    si[i] = 1.0 - z[i + 1] * z[i + 1];
  }
  const Eigen::MatrixXd q1 = d.block(1, 1, m, m), q2 = d2.block(1, 1, m, m), q3 = d3.block(1, 1, m, m),
                        q4 = d4.block(1, 1, m, m);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);
  const Eigen::MatrixXd s = si.asDiagonal();
  const Eigen::MatrixXd zd = zi.asDiagonal();
  const Eigen::MatrixXd p2 = s * q2 - 4.0 * zd * q1 - 2.0 * id;
  const Eigen::MatrixXd p4 = s * q4 - 8.0 * zd * q3 - 12.0 * q2;
  const double k2 = k * k;
  // (D_y^2 - k^2)^2 phi = lambda (k^2 - D_y^2) phi with D_y = 2 D_z.
  const Eigen::MatrixXd lhs = 16.0 * p4 - 8.0 * k2 * p2 + k2 * k2 * s;
  const Eigen::MatrixXd rhs = k2 * s - 4.0 * p2;
  const Eigen::MatrixXd a = rhs.partialPivLu().solve(lhs);

  for (auto& c : real_positive_eigenpairs(a)) {
    if (static_cast<int>(result.lambda.size()) == count) break;
    const Eigen::VectorXd mq = rhs * c.vec;
    const double res = (lhs * c.vec - c.lambda * mq).norm() / (c.lambda * mq.norm());
    if (res > kResidualGate) {
      reject(c.lambda, "residual " + std::to_string(res));
      continue;
    }
    const Eigen::VectorXd q = pad(c.vec);
    const Eigen::VectorXd dq1 = d * q, dq2 = d2 * q, dq3 = d3 * q;
    Eigen::VectorXd zz(n + 1), ss(n + 1);
    for (int i = 0; i <= n; ++i) {
      zz[i] = z[i];
      ss[i] = 1.0 - z[i] * z[i];
    }
    const Eigen::ArrayXd phi = ss.array() * q.array();
    const Eigen::ArrayXd phi1 = ss.array() * dq1.array() - 2.0 * zz.array() * q.array();
    const Eigen::ArrayXd phi2 = ss.array() * dq2.array() - 4.0 * zz.array() * dq1.array() - 2.0 * q.array();
    const Eigen::ArrayXd phi3 = ss.array() * dq3.array() - 6.0 * zz.array() * dq2.array() - 6.0 * dq1.array();
    const Eigen::VectorXd phiv = phi.matrix();
    if (tail_ratio(to_std(phiv)) > kResolutionGate) {
      reject(c.lambda, "unresolved profile");
      continue;
    }
    std::array<std::vector<double>, 4> prof;
    prof[0] = to_std(phiv);
    prof[1] = to_std((2.0 * phi1).matrix());
    prof[2] = to_std((4.0 * phi2).matrix());
    prof[3] = to_std((8.0 * phi3).matrix());
    result.lambda.push_back(c.lambda);
    result.profiles.push_back(std::move(prof));
  }
  return result;
}

namespace {

Grid channel_grid(const Geometry& g, int nx, int ny) {
  Grid grid;
  grid.nx = nx;
  grid.ny = ny + 1;
  grid.x.resize(nx);
  grid.wx.assign(nx, g.lx / nx);
  for (int i = 0; i < nx; ++i) grid.x[i] = g.lx * i / nx;
  const auto z = cheb::lobatto_nodes(ny);
  const auto w = cheb::clenshaw_curtis_weights(ny);
  grid.y.resize(ny + 1);
  grid.wy.resize(ny + 1);
  for (int j = 0; j <= ny; ++j) {
    grid.y[j] = 0.5 * (1.0 + z[j]);
    grid.wy[j] = 0.5 * w[j];
  }
  grid.y.front() = 0.0;
  grid.y.back() = 1.0;
  return grid;
}

// (cos coefficient, sin coefficient) of the n-th derivative of cos or sin, without the k^n factor.
std::pair<double, double> trig_derivative(bool sine, int n) {
  const int r = n % 4;
  if (!sine) {
    switch (r) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, -1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, 1.0};
    }
  }
  switch (r) {
    case 0: return {0.0, 1.0};
    case 1: return {1.0, 0.0};
    case 2: return {0.0, -1.0};
    default: return {-1.0, 0.0};
  }
}

}  // namespace

ChannelBasis::ChannelBasis(const Geometry& geometry, int kx_max, int nx, int ny, int modes_per_k)
    : StokesBasis(geometry, channel_grid(geometry, nx, ny)), kx_max_(kx_max) {
  geometry.validate();
  if (geometry.is_torus()) throw std::invalid_argument("ChannelBasis requires a channel geometry");
  if (ny < 16) throw std::invalid_argument("channel basis requires Ny >= 16");
  if (kx_max < 0) throw std::invalid_argument("kx_max must be non-negative");
  if (modes_per_k < 1) throw std::invalid_argument("modes_per_k must be at least 1");
  if (nx <= 3 * kx_max || nx < 8)
    throw std::invalid_argument("channel grid nx must exceed 3 * kx_max (and be at least 8)");

  const double lx = geometry.lx;
  for (int kx = 0; kx <= kx_max; ++kx) {
    const double k = 2.0 * std::numbers::pi * kx / lx;
    auto eig = solve_channel_eigenproblem(k, ny, modes_per_k);
    for (auto& r : eig.rejected) rejected_.push_back(r);
    for (std::size_t n = 0; n < eig.lambda.size(); ++n) {
      for (bool sine : {false, true}) {
        if (kx == 0 && sine) continue;
        ChannelMode mode;
        mode.kx = kx;
        mode.n = static_cast<int>(n) + 1;
        mode.sine = sine;
        mode.k = k;
        mode.lambda = eig.lambda[n];
        mode.profile = eig.profiles[n];
        // Discrete norm: sum over x of cos^2 (or sin^2) is lx / 2 for kx != 0.
        double s = 0.0;
        for (int j = 0; j < grid_.ny; ++j) {
          const double p0 = mode.profile[0][j], p1 = mode.profile[1][j];
          s += grid_.wy[j] * (kx == 0 ? lx * p1 * p1 : 0.5 * lx * (p1 * p1 + k * k * p0 * p0));
        }
        const double scale = 1.0 / std::sqrt(s);
        for (auto& p : mode.profile)
          for (auto& v : p) v *= scale;
        modes_.push_back(std::move(mode));
      }
    }
  }
  std::stable_sort(modes_.begin(), modes_.end(), [](const ChannelMode& a, const ChannelMode& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return std::tie(a.kx, a.n, a.sine) < std::tie(b.kx, b.n, b.sine);
  });
  eigenvalues_.resize(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t j = 0; j < modes_.size(); ++j) eigenvalues_[static_cast<Eigen::Index>(j)] = modes_[j].lambda;

  cos_table_.assign(kx_max + 1, std::vector<double>(nx));
  sin_table_.assign(kx_max + 1, std::vector<double>(nx));
  for (int kx = 0; kx <= kx_max; ++kx)
    for (int i = 0; i < nx; ++i) {
      const double ph = 2.0 * std::numbers::pi * kx * i / nx;
      cos_table_[kx][i] = std::cos(ph);
      sin_table_[kx][i] = std::sin(ph);
    }
  dy_ = 2.0 * cheb::diff_matrix(ny);
  fft_x_ = std::make_unique<Fft2D>(nx, 1);
}

std::string ChannelBasis::descriptor(std::size_t j) const {
  const auto& m = modes_.at(j);
  std::ostringstream os;
  os << "kx=" << m.kx << " n=" << m.n << " " << (m.kx == 0 ? "shear" : (m.sine ? "sin" : "cos"));
  return os.str();
}

ScalarField ChannelBasis::accumulate(const VelocityCoeffs& xi, int component, int a, int b) const {
  check_coeffs(xi);
  const int ny = grid_.ny, nx = grid_.nx;
  std::vector<std::vector<double>> ccos(kx_max_ + 1, std::vector<double>(ny, 0.0));
  std::vector<std::vector<double>> csin(kx_max_ + 1, std::vector<double>(ny, 0.0));
  for (std::size_t j = 0; j < modes_.size(); ++j) {
    const double c = xi[static_cast<Eigen::Index>(j)];
    if (c == 0.0) continue;
    const auto& m = modes_[j];
    const int pd = component == 0 ? b + 1 : b;
    const int n = component == 0 ? a : a + 1;
    if (pd > 3) throw std::invalid_argument("channel profile derivative order too high");
    if (m.kx == 0 && n > 0) continue;
    const double sign = component == 0 ? 1.0 : -1.0;
    const double kn = std::pow(m.k, n);
    const auto [fc, fs] = trig_derivative(m.sine, n);
    const auto& prof = m.profile[pd];
    const double wc = sign * c * kn * fc, ws = sign * c * kn * fs;
    for (int y = 0; y < ny; ++y) {
      ccos[m.kx][y] += wc * prof[y];
      csin[m.kx][y] += ws * prof[y];
    }
  }
  ScalarField f(nx, ny);
  for (int kx = 0; kx <= kx_max_; ++kx) {
    const auto& ct = cos_table_[kx];
    const auto& st = sin_table_[kx];
    for (int i = 0; i < nx; ++i)
      for (int y = 0; y < ny; ++y) f(i, y) += ccos[kx][y] * ct[i] + csin[kx][y] * st[i];
  }
  return f;
}

VectorField ChannelBasis::synthesize(const VelocityCoeffs& xi) const {
  return VectorField(accumulate(xi, 0, 0, 0), accumulate(xi, 1, 0, 0));
}

ScalarField ChannelBasis::synthesize_vertical(const VelocityCoeffs& xi) const { return accumulate(xi, 1, 0, 0); }

GradientField ChannelBasis::synthesize_gradient(const VelocityCoeffs& xi) const {
  return {accumulate(xi, 0, 1, 0), accumulate(xi, 0, 0, 1), accumulate(xi, 1, 1, 0), accumulate(xi, 1, 0, 1)};
}

HessianField ChannelBasis::synthesize_hessian(const VelocityCoeffs& xi) const {
  return {accumulate(xi, 0, 2, 0), accumulate(xi, 0, 1, 1), accumulate(xi, 0, 0, 2),
          accumulate(xi, 1, 2, 0), accumulate(xi, 1, 1, 1), accumulate(xi, 1, 0, 2)};
}

VelocityCoeffs ChannelBasis::project(const VectorField& f) const {
  check_field(f.x);
  check_field(f.y);
  const int nx = grid_.nx, ny = grid_.ny;
  const double dx = geometry_.lx / nx;
  auto transform = [&](const ScalarField& g, const std::vector<std::vector<double>>& table) {
    std::vector<std::vector<double>> out(kx_max_ + 1, std::vector<double>(ny, 0.0));
    for (int kx = 0; kx <= kx_max_; ++kx)
      for (int i = 0; i < nx; ++i) {
        const double t = dx * table[kx][i];
        for (int y = 0; y < ny; ++y) out[kx][y] += t * g(i, y);
      }
    return out;
  };
  const auto cx = transform(f.x, cos_table_), sx = transform(f.x, sin_table_);
  const auto cy = transform(f.y, cos_table_), sy = transform(f.y, sin_table_);
  VelocityCoeffs xi(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t j = 0; j < modes_.size(); ++j) {
    const auto& m = modes_[j];
    const auto& p0 = m.profile[0];
    const auto& p1 = m.profile[1];
    double s = 0.0;
    for (int y = 0; y < ny; ++y) {
      double v;
      if (m.kx == 0)
        v = p1[y] * cx[0][y];
      else if (!m.sine)
        v = p1[y] * cx[m.kx][y] + m.k * p0[y] * sy[m.kx][y];
      else
        v = p1[y] * sx[m.kx][y] - m.k * p0[y] * cy[m.kx][y];
      s += grid_.wy[y] * v;
    }
    xi[static_cast<Eigen::Index>(j)] = s;
  }
  return xi;
}

ScalarField ChannelBasis::derivative_x(const ScalarField& f) const {
  check_field(f);
  const int nx = grid_.nx, ny = grid_.ny;
  ScalarField out(nx, ny);
  std::vector<Complex> row(nx), spec(nx), back(nx);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int y = 0; y < ny; ++y) {
    for (int i = 0; i < nx; ++i) row[i] = f(i, y);
    fft_x_->forward(row, spec);
    for (int i = 0; i < nx; ++i) {
      const int ki = wave_index(i, nx);
      if (2 * ki == -nx) {
        spec[i] = 0.0;
        continue;
      }
      spec[i] *= Complex(0.0, two_pi * ki / geometry_.lx / nx);
    }
    fft_x_->inverse(spec, back);
    for (int i = 0; i < nx; ++i) out(i, y) = back[i].real();
  }
  return out;
}

ScalarField ChannelBasis::derivative_y(const ScalarField& f) const {
  check_field(f);
  const int nx = grid_.nx, ny = grid_.ny;
  ScalarField out(nx, ny);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> in(f.values().data(),
                                                                                               nx, ny);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> res(out.values().data(), nx,
                                                                                         ny);
  res = in * dy_.transpose();
  return out;
}

VectorField ChannelBasis::scalar_gradient(const ScalarField& f) const {
  return VectorField(derivative_x(f), derivative_y(f));
}

ScalarField ChannelBasis::divergence(const VectorField& f) const {
  ScalarField d = derivative_x(f.x);
  d += derivative_y(f.y);
  return d;
}

std::unique_ptr<ScalarInterpolant> ChannelBasis::interpolant(const ScalarField& f,
                                                             const InterpolationSpec& spec) const {
  check_field(f);
  return std::make_unique<LagrangeInterpolant>(f, grid_, geometry_.lx, geometry_.ly, false, spec.order,
                                               spec.limiter);
}

BasisPtr build_channel_basis(const Geometry& geometry, int kx_max, int nx, int ny, int modes_per_k) {
  return std::make_shared<ChannelBasis>(geometry, kx_max, nx, ny, modes_per_k);
}

}  // namespace bsq
