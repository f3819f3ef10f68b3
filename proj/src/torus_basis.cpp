#include "bsq/torus_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace bsq {
namespace {

Complex ipow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

Grid uniform_grid(const Geometry& g, int nx, int ny) {
  Grid grid;
  grid.nx = nx;
  grid.ny = ny;
  grid.x.resize(nx);
  grid.y.resize(ny);
  grid.wx.assign(nx, g.lx / nx);
  grid.wy.assign(ny, g.ly / ny);
  for (int i = 0; i < nx; ++i) grid.x[i] = g.lx * i / nx;
  for (int j = 0; j < ny; ++j) grid.y[j] = g.ly * j / ny;
  return grid;
}

}  // namespace

TorusBasis::TorusBasis(const Geometry& geometry, int max_wavenumber, int nx, int ny)
    : StokesBasis(geometry, uniform_grid(geometry, nx, ny)), max_wavenumber_(max_wavenumber) {
  geometry.validate();
  if (!geometry.is_torus()) throw std::invalid_argument("TorusBasis requires a torus geometry");
  if (max_wavenumber < 1) throw std::invalid_argument("max_wavenumber must be at least 1");
  if (nx <= 3 * max_wavenumber || ny <= 3 * max_wavenumber) {
    std::ostringstream os;
    os << "grid " << nx << "x" << ny << " cannot resolve max_wavenumber " << max_wavenumber
       << ": quadratic products of retained modes alias unless nx, ny > 3 * max_wavenumber (need at least "
       << 3 * max_wavenumber + 1 << ")";
    throw std::invalid_argument(os.str());
  }
  norm_ = std::sqrt(2.0 / geometry.area());
  const double two_pi = 2.0 * std::numbers::pi;
  const int kmax = max_wavenumber;
  for (int kx = 0; kx <= kmax; ++kx) {
    for (int ky = -kmax; ky <= kmax; ++ky) {
      if (kx * kx + ky * ky > kmax * kmax) continue;
      if (kx == 0 && ky <= 0) continue;
      for (bool sine : {false, true}) {
        TorusMode m;
        m.kx = kx;
        m.ky = ky;
        m.sine = sine;
        m.wx = two_pi * kx / geometry.lx;
        m.wy = two_pi * ky / geometry.ly;
        const double k = std::hypot(m.wx, m.wy);
        m.ex = -m.wy / k;
        m.ey = m.wx / k;
        modes_.push_back(m);
      }
    }
  }
  auto lambda = [](const TorusMode& m) { return m.wx * m.wx + m.wy * m.wy; };
  std::stable_sort(modes_.begin(), modes_.end(), [&](const TorusMode& a, const TorusMode& b) {
    const double la = lambda(a), lb = lambda(b);
    if (la != lb) return la < lb;
    return std::tie(a.kx, a.ky, a.sine) < std::tie(b.kx, b.ky, b.sine);
  });
  eigenvalues_.resize(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t j = 0; j < modes_.size(); ++j) eigenvalues_[static_cast<Eigen::Index>(j)] = lambda(modes_[j]);
  for (const auto& m : modes_) bins_.emplace_back(bin(m.kx, m.ky), bin(-m.kx, -m.ky));
  fft_ = std::make_unique<Fft2D>(nx, ny);
}

std::string TorusBasis::descriptor(std::size_t j) const {
  const auto& m = modes_.at(j);
  std::ostringstream os;
  os << "k=(" << m.kx << "," << m.ky << ") " << (m.sine ? "sin" : "cos");
  return os.str();
}

std::array<double, 2> TorusBasis::mode_value(std::size_t j, double x, double y) const {
  const auto& m = modes_.at(j);
  const double phase = m.wx * x + m.wy * y;
  const double s = norm_ * (m.sine ? std::sin(phase) : std::cos(phase));
  return {m.ex * s, m.ey * s};
}

std::size_t TorusBasis::bin(int kx, int ky) const {
  const int i = ((kx % grid_.nx) + grid_.nx) % grid_.nx;
  const int j = ((ky % grid_.ny) + grid_.ny) % grid_.ny;
  return grid_.index(i, j);
}

std::vector<Complex> TorusBasis::spectrum(const VelocityCoeffs& xi, int component, int dx, int dy) const {
  check_coeffs(xi);
  std::vector<Complex> spec(grid_.size(), Complex{});
  const Complex factor = ipow(dx + dy);
  for (std::size_t j = 0; j < modes_.size(); ++j) {
    const double a = xi[static_cast<Eigen::Index>(j)];
    if (a == 0.0) continue;
    const auto& m = modes_[j];
    const double pol = component == 0 ? m.ex : m.ey;
    if (pol == 0.0) continue;
    double amp = a * norm_ * pol;
    for (int q = 0; q < dx; ++q) amp *= m.wx;
    for (int q = 0; q < dy; ++q) amp *= m.wy;
    const Complex c = m.sine ? Complex(0.0, -0.5 * amp) : Complex(0.5 * amp, 0.0);
    const Complex ck = factor * c;
    spec[bins_[j].first] += ck;
    spec[bins_[j].second] += std::conj(ck);
  }
  return spec;
}

ScalarField TorusBasis::to_field(std::span<const Complex> spec) const {
  ScalarField f(grid_.nx, grid_.ny);
  const auto r = fft_->inverse_real(spec);
  std::copy(r.begin(), r.end(), f.values().begin());
  return f;
}

std::pair<ScalarField, ScalarField> TorusBasis::to_fields(std::vector<Complex> a,
                                                          const std::vector<Complex>& b) const {
  // Both spectra are Hermitian, so one inverse transform of a + i b yields both fields.
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += Complex(-b[k].imag(), b[k].real());
  std::vector<Complex> out(a.size());
  fft_->inverse(a, out);
  ScalarField fa(grid_.nx, grid_.ny), fb(grid_.nx, grid_.ny);
  for (std::size_t k = 0; k < out.size(); ++k) {
    fa[k] = out[k].real();
    fb[k] = out[k].imag();
  }
  return {std::move(fa), std::move(fb)};
}

VectorField TorusBasis::synthesize(const VelocityCoeffs& xi) const {
  auto [ux, uy] = to_fields(spectrum(xi, 0, 0, 0), spectrum(xi, 1, 0, 0));
  return VectorField(std::move(ux), std::move(uy));
}

ScalarField TorusBasis::synthesize_vertical(const VelocityCoeffs& xi) const {
  return to_field(spectrum(xi, 1, 0, 0));
}

GradientField TorusBasis::synthesize_gradient(const VelocityCoeffs& xi) const {
  auto [xx, xy] = to_fields(spectrum(xi, 0, 1, 0), spectrum(xi, 0, 0, 1));
  auto [yx, yy] = to_fields(spectrum(xi, 1, 1, 0), spectrum(xi, 1, 0, 1));
  return {std::move(xx), std::move(xy), std::move(yx), std::move(yy)};
}

HessianField TorusBasis::synthesize_hessian(const VelocityCoeffs& xi) const {
  auto [a, b] = to_fields(spectrum(xi, 0, 2, 0), spectrum(xi, 0, 1, 1));
  auto [c, d] = to_fields(spectrum(xi, 0, 0, 2), spectrum(xi, 1, 2, 0));
  auto [e, f] = to_fields(spectrum(xi, 1, 1, 1), spectrum(xi, 1, 0, 2));
  return {std::move(a), std::move(b), std::move(c), std::move(d), std::move(e), std::move(f)};
}

VelocityCoeffs TorusBasis::project(const VectorField& f) const {
  check_field(f.x);
  check_field(f.y);
  std::vector<Complex> packed(grid_.size()), spec(grid_.size());
  for (std::size_t k = 0; k < packed.size(); ++k) packed[k] = Complex(f.x[k], f.y[k]);
  fft_->forward(packed, spec);
  const double cell = geometry_.area() / static_cast<double>(grid_.size());
  VelocityCoeffs xi(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t j = 0; j < modes_.size(); ++j) {
    const auto& m = modes_[j];
    const Complex p = spec[bins_[j].first];
    const Complex q = std::conj(spec[bins_[j].second]);
    const Complex fx = 0.5 * (p + q);
    const Complex fy = Complex(0.0, -0.5) * (p - q);
    const Complex s = m.ex * fx + m.ey * fy;
    xi[static_cast<Eigen::Index>(j)] = cell * norm_ * (m.sine ? -s.imag() : s.real());
  }
  return xi;
}

VelocityCoeffs TorusBasis::project_vertical(const ScalarField& f) const {
  check_field(f);
  const auto fy = fft_->forward_real(f.values());
  const double cell = geometry_.area() / static_cast<double>(grid_.size());
  VelocityCoeffs xi(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t j = 0; j < modes_.size(); ++j) {
    const auto& m = modes_[j];
    const Complex s = m.ey * fy[bins_[j].first];
    xi[static_cast<Eigen::Index>(j)] = cell * norm_ * (m.sine ? -s.imag() : s.real());
  }
  return xi;
}

std::vector<Complex> TorusBasis::derivative_spectrum(const std::vector<Complex>& spec, int a, int b) const {
  std::vector<Complex> out(spec.size());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  const double two_pi = 2.0 * std::numbers::pi;
  const Complex factor = ipow(a + b);
  for (int i = 0; i < grid_.nx; ++i) {
    const int ki = wave_index(i, grid_.nx);
    const bool nyq_x = 2 * ki == -grid_.nx;
    const double wx = two_pi * ki / geometry_.lx;
    for (int j = 0; j < grid_.ny; ++j) {
      const int kj = wave_index(j, grid_.ny);
      const bool nyq_y = 2 * kj == -grid_.ny;
      const std::size_t k = grid_.index(i, j);
      if ((nyq_x && a % 2 == 1) || (nyq_y && b % 2 == 1)) continue;
      const double wy = two_pi * kj / geometry_.ly;
      out[k] = spec[k] * factor * (std::pow(wx, a) * std::pow(wy, b) * scale);
    }
  }
  return out;
}

ScalarField TorusBasis::derivative(const ScalarField& f, int a, int b) const {
  check_field(f);
  return to_field(derivative_spectrum(fft_->forward_real(f.values()), a, b));
}

VectorField TorusBasis::scalar_gradient(const ScalarField& f) const {
  check_field(f);
  const auto spec = fft_->forward_real(f.values());
  auto [gx, gy] = to_fields(derivative_spectrum(spec, 1, 0), derivative_spectrum(spec, 0, 1));
  return VectorField(std::move(gx), std::move(gy));
}

ScalarField TorusBasis::divergence(const VectorField& f) const {
  ScalarField d = derivative(f.x, 1, 0);
  d += derivative(f.y, 0, 1);
  return d;
}

std::unique_ptr<ScalarInterpolant> TorusBasis::interpolant(const ScalarField& f,
                                                           const InterpolationSpec& spec) const {
  check_field(f);
  if (spec.kind == InterpolationKind::spectral)
    return std::make_unique<SpectralInterpolant>(f, geometry_.lx, geometry_.ly, *fft_, spec.max_offset,
                                                 spec.limiter);
  return std::make_unique<LagrangeInterpolant>(f, grid_, geometry_.lx, geometry_.ly, true, spec.order,
                                               spec.limiter);
}

BasisPtr build_torus_basis(const Geometry& geometry, int max_wavenumber, int nx, int ny) {
  return std::make_shared<TorusBasis>(geometry, max_wavenumber, nx, ny);
}

}  // namespace bsq
