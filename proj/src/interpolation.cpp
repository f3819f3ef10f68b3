#include "bsq/interpolation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bsq {

std::string to_string(InterpolationKind k) { return k == InterpolationKind::spectral ? "spectral" : "lagrange"; }

InterpolationKind interpolation_kind_from_string(const std::string& s) {
  if (s == "spectral") return InterpolationKind::spectral;
  if (s == "lagrange") return InterpolationKind::lagrange;
  throw std::invalid_argument("unknown interpolation kind '" + s + "'");
}

namespace {

double wrap(double v, double period) {
  double w = std::fmod(v, period);
  if (w < 0.0) w += period;
  if (w >= period) w -= period;
  return w;
}

int mod(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

SpectralInterpolant::SpectralInterpolant(const ScalarField& f, double lx, double ly, const Fft2D& fft,
                                         double max_offset, bool limiter)
    : nx_(f.nx()), ny_(f.ny()), lx_(lx), ly_(ly), hx_(lx / f.nx()), hy_(ly / f.ny()), limiter_(limiter),
      source_(f) {
  if (fft.nx() != nx_ || fft.ny() != ny_) throw std::invalid_argument("SpectralInterpolant: FFT size mismatch");
  const std::size_t n = f.size();
  auto spec = fft.forward_real(f.values());
  const double scale = 1.0 / static_cast<double>(n);
  const double two_pi = 2.0 * std::numbers::pi;

  double amax = 0.0;
  for (int i = 0; i < nx_; ++i)
    for (int j = 0; j < ny_; ++j) {
      auto& c = spec[static_cast<std::size_t>(i) * ny_ + j];
      c *= scale;
      if (2 * wave_index(i, nx_) == -nx_ || 2 * wave_index(j, ny_) == -ny_) c = 0.0;
      amax = std::max(amax, std::abs(c));
    }
  double keff = 0.0;
  for (int i = 0; i < nx_; ++i)
    for (int j = 0; j < ny_; ++j) {
      if (std::abs(spec[static_cast<std::size_t>(i) * ny_ + j]) <= 1e-14 * amax) continue;
      const double kx = two_pi * wave_index(i, nx_) / lx, ky = two_pi * wave_index(j, ny_) / ly;
      keff = std::max(keff, std::sqrt(kx * kx + ky * ky));
    }

  const double worst = 0.5 * std::hypot(hx_, hy_);
  const double r = max_offset < 0.0 ? worst : std::min(max_offset, worst);
  const double z = r * keff;
  order_ = 0;
  double term = z;  // z^(q+1) / (q+1)!
  while (term > 1e-16 && order_ < max_order) {
    ++order_;
    term *= z / (order_ + 1);
  }

  derivs_.resize(order_ + 1);
  std::vector<double> fact(order_ + 1, 1.0);
  for (int q = 1; q <= order_; ++q) fact[q] = fact[q - 1] * q;
  // powx[a][i] = kx_i^a / a!, likewise in y.
  std::vector<std::vector<double>> powx(order_ + 1, std::vector<double>(nx_)), powy(order_ + 1, std::vector<double>(ny_));
  for (int q = 0; q <= order_; ++q) {
    for (int i = 0; i < nx_; ++i) powx[q][i] = std::pow(two_pi * wave_index(i, nx_) / lx, q) / fact[q];
    for (int j = 0; j < ny_; ++j) powy[q][j] = std::pow(two_pi * wave_index(j, ny_) / ly, q) / fact[q];
  }
  static const Complex ipow[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

  for (int a = 0; a <= order_; ++a) derivs_[a].resize(order_ + 1 - a);
  // Each derivative field is real, so two are recovered from one complex
  // inverse transform. Only fields of equal total degree share a transform:
  // their magnitudes are comparable, so neither pollutes the other's roundoff.
  std::vector<std::array<int, 4>> jobs;  // a1, b1, a2, b2 (a2 < 0: single)
  for (int q = 0; q <= order_; ++q)
    for (int a = 0; a <= q; a += 2) jobs.push_back({a, q - a, a + 1 <= q ? a + 1 : -1, q - a - 1});
  std::vector<Complex> d(n), out(n);
  for (const auto& [a1, b1, a2, b2] : jobs) {
    const bool two = a2 >= 0;
    const Complex f1 = ipow[(a1 + b1) % 4];
    const Complex f2 = two ? Complex(0.0, 1.0) * ipow[(a2 + b2) % 4] : Complex{};
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < ny_; ++j) {
        const std::size_t k = static_cast<std::size_t>(i) * ny_ + j;
        const double p2 = two ? powx[a2][i] * powy[b2][j] : 0.0;
        d[k] = spec[k] * (f1 * (powx[a1][i] * powy[b1][j]) + f2 * p2);
      }
    fft.inverse(d, out);
    ScalarField g1(nx_, ny_), g2(nx_, ny_);
    for (std::size_t k = 0; k < n; ++k) {
      g1[k] = out[k].real();
      g2[k] = out[k].imag();
    }
    derivs_[a1][b1] = std::move(g1);
    if (two) derivs_[a2][b2] = std::move(g2);
  }
}

double SpectralInterpolant::operator()(double x, double y) const {
  const double xw = wrap(x, lx_), yw = wrap(y, ly_);
  const int i0 = static_cast<int>(std::lround(xw / hx_));
  const int j0 = static_cast<int>(std::lround(yw / hy_));
  const double rx = xw - i0 * hx_, ry = yw - j0 * hy_;
  const int i = mod(i0, nx_), j = mod(j0, ny_);
  // Horner in x over Horner-in-y inner sums.
  double value = 0.0;
  for (int a = order_; a >= 0; --a) {
    const auto& row = derivs_[a];
    double inner = 0.0;
    for (int b = static_cast<int>(row.size()) - 1; b >= 0; --b) inner = inner * ry + row[b](i, j);
    value = value * rx + inner;
  }
  if (limiter_) {
    const int ic = mod(static_cast<int>(std::floor(xw / hx_)), nx_);
    const int jc = mod(static_cast<int>(std::floor(yw / hy_)), ny_);
    const int ic1 = mod(ic + 1, nx_), jc1 = mod(jc + 1, ny_);
    const double lo = std::min({source_(ic, jc), source_(ic1, jc), source_(ic, jc1), source_(ic1, jc1)});
    const double hi = std::max({source_(ic, jc), source_(ic1, jc), source_(ic, jc1), source_(ic1, jc1)});
    value = std::clamp(value, lo, hi);
  }
  return value;
}

LagrangeInterpolant::LagrangeInterpolant(const ScalarField& f, const Grid& grid, double lx, double ly,
                                         bool periodic_y, int order, bool limiter)
    : source_(f), grid_(grid), lx_(lx), ly_(ly), periodic_y_(periodic_y), order_(order), limiter_(limiter) {
  if (order < 2 || order % 2 != 0) throw std::invalid_argument("Lagrange order must be even and >= 2");
  if (order > 32) throw std::invalid_argument("Lagrange order above 32 is not supported");
  if (order > grid.nx || order > grid.ny) throw std::invalid_argument("Lagrange stencil larger than grid");
  if (f.nx() != grid.nx || f.ny() != grid.ny) throw std::invalid_argument("LagrangeInterpolant: shape mismatch");
}

namespace {

// Weights for equispaced nodes start, start+1, ..., start+p-1 (in units of h) at position t.
void uniform_weights(double t, int start, int p, double* w) {
  for (int s = 0; s < p; ++s) {
    double num = 1.0, den = 1.0;
    for (int r = 0; r < p; ++r) {
      if (r == s) continue;
      num *= t - (start + r);
      den *= static_cast<double>(s - r);
    }
    w[s] = num / den;
  }
}

void general_weights(double t, const double* nodes, int p, double* w) {
  for (int s = 0; s < p; ++s) {
    double num = 1.0, den = 1.0;
    for (int r = 0; r < p; ++r) {
      if (r == s) continue;
      num *= t - nodes[r];
      den *= nodes[s] - nodes[r];
    }
    w[s] = num / den;
  }
}

}  // namespace

double LagrangeInterpolant::operator()(double x, double y) const {
  const int p = order_;
  const int nx = grid_.nx, ny = grid_.ny;
  const double hx = lx_ / nx;
  const double xw = wrap(x, lx_);
  const double tx = xw / hx;
  const int ix = static_cast<int>(std::floor(tx));
  const int sx = ix - p / 2 + 1;
  double wxs[64], wys[64];
  int jy[64];
  uniform_weights(tx, sx, p, wxs);

  int jc = 0, jc1 = 0;
  if (periodic_y_) {
    const double hy = ly_ / ny;
    const double yw = wrap(y, ly_);
    const double ty = yw / hy;
    const int iy = static_cast<int>(std::floor(ty));
    const int sy = iy - p / 2 + 1;
    uniform_weights(ty, sy, p, wys);
    for (int s = 0; s < p; ++s) jy[s] = mod(sy + s, ny);
    jc = mod(iy, ny);
    jc1 = mod(iy + 1, ny);
  } else {
    const double yc = std::clamp(y, grid_.y.front(), grid_.y.back());
    auto it = std::upper_bound(grid_.y.begin(), grid_.y.end(), yc);
    int iy = static_cast<int>(it - grid_.y.begin()) - 1;
    iy = std::clamp(iy, 0, ny - 2);
    const int sy = std::clamp(iy - p / 2 + 1, 0, ny - p);
    general_weights(yc, grid_.y.data() + sy, p, wys);
    for (int s = 0; s < p; ++s) jy[s] = sy + s;
    jc = iy;
    jc1 = iy + 1;
  }

  double value = 0.0;
  for (int a = 0; a < p; ++a) {
    const int i = mod(sx + a, nx);
    double row = 0.0;
    for (int b = 0; b < p; ++b) row += wys[b] * source_(i, jy[b]);
    value += wxs[a] * row;
  }
  if (limiter_) {
    const int ic = mod(ix, nx), ic1 = mod(ix + 1, nx);
    const double lo = std::min({source_(ic, jc), source_(ic1, jc), source_(ic, jc1), source_(ic1, jc1)});
    const double hi = std::max({source_(ic, jc), source_(ic1, jc), source_(ic, jc1), source_(ic1, jc1)});
    value = std::clamp(value, lo, hi);
  }
  return value;
}

}  // namespace bsq
