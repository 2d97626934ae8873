#include "xfel/kernels.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "xfel/error.hpp"
#include "xfel/fft.hpp"

namespace xfel {
namespace {

constexpr double pi = std::numbers::pi;

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> gl_nodes{-0.9602898564975363, -0.7966664774136267,
                                         -0.5255324099163290, -0.1834346424956498,
                                         0.1834346424956498,  0.5255324099163290,
                                         0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> gl_weights{0.1012285362903763, 0.2223810344533745,
                                           0.3137066458778873, 0.3626837833783620,
                                           0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};

double truncated_kernel_hat(double k, double lc) {
  if (k == 0.0) return 2.0 * pi * lc * lc;
  double s = std::sin(0.5 * k * lc);
  return 8.0 * pi * s * s / (k * k);
}

std::vector<double>& scratch_real(std::size_t n) {
  thread_local std::vector<double> buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

std::vector<cplx>& scratch_modes(std::size_t n) {
  thread_local std::vector<cplx> buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

}  // namespace

double origin_cell_average(double h) {
  double acc = 0.0;
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b)
      for (int c = 0; c < 8; ++c) {
        double r = std::sqrt(gl_nodes[a] * gl_nodes[a] + gl_nodes[b] * gl_nodes[b] +
                             gl_nodes[c] * gl_nodes[c]);
        acc += gl_weights[a] * gl_weights[b] * gl_weights[c] / r;
      }
  // nodes live on [-1,1]^3 (volume 8); physical radius is r*h/2
  return acc / 8.0 * 2.0 / h;
}

KernelSet make_kernels(const GridSpec& grid) {
  grid.validate();
  KernelSet ks;
  ks.grid = grid;
  const int n = grid.n_per_axis;
  const std::size_t total = grid.size();
  ks.laplacian_multiplier.resize(total);
  ks.coulomb_grid.resize(total);
  ks.harmonic_partial_grid.resize(total);
  ks.radius_sq_grid.resize(total);

  const double origin_value = origin_cell_average(grid.spacing());
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    const double k1 = grid.wavenumber(i), x1 = grid.coord(i);
    for (int j = 0; j < n; ++j) {
      const double k2 = grid.wavenumber(j), x2 = grid.coord(j);
      for (int k = 0; k < n; ++k, ++idx) {
        const double k3 = grid.wavenumber(k), x3 = grid.coord(k);
        ks.laplacian_multiplier[idx] = -(k1 * k1 + k2 * k2 + k3 * k3);
        const double r2 = x1 * x1 + x2 * x2 + x3 * x3;
        ks.radius_sq_grid[idx] = r2;
        ks.harmonic_partial_grid[idx] = x1 * x1 + x2 * x2;
        ks.coulomb_grid[idx] = r2 == 0.0 ? origin_value : 1.0 / std::sqrt(r2);
      }
    }
  }

  const int m = 2 * n;
  const int mh = m / 2 + 1;
  ks.truncation_radius = 2.0 * grid.half_length;
  ks.hartree_multiplier.resize(static_cast<std::size_t>(m) * m * mh);
  // padded box has half-length 2L, so mode spacing is pi/(2L)
  const double dk = pi / (2.0 * grid.half_length);
  auto kpad = [&](int a) { return dk * (a < m / 2 ? a : a - m); };
  idx = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < mh; ++k, ++idx) {
        const double kx = kpad(i), ky = kpad(j), kz = dk * k;
        ks.hartree_multiplier[idx] =
            truncated_kernel_hat(std::sqrt(kx * kx + ky * ky + kz * kz), ks.truncation_radius);
      }
  return ks;
}

std::vector<double> hartree_potential(const Field& f, const KernelSet& kernels) {
  require_same_grid(f.grid(), kernels.grid);
  const int n = f.grid().n_per_axis;
  const int m = 2 * n;
  const auto nn = static_cast<std::size_t>(n), mm = static_cast<std::size_t>(m);
  const std::size_t real_size = mm * mm * mm;
  const std::size_t mode_size = mm * mm * (mm / 2 + 1);

  std::vector<double>& rho = scratch_real(real_size);
  std::vector<cplx>& modes = scratch_modes(mode_size);
  std::fill(rho.begin(), rho.begin() + static_cast<std::ptrdiff_t>(real_size), 0.0);
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j)
      for (std::size_t k = 0; k < nn; ++k)
        rho[(i * mm + j) * mm + k] = std::norm(f[(i * nn + j) * nn + k]);

  fft::r2c3(rho.data(), modes.data(), m);
  for (std::size_t i = 0; i < mode_size; ++i) modes[i] *= kernels.hartree_multiplier[i];
  fft::c2r3(modes.data(), rho.data(), m);

  const double scale = 1.0 / static_cast<double>(real_size);
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = 0; j < nn; ++j)
      for (std::size_t k = 0; k < nn; ++k)
        v[(i * nn + j) * nn + k] = scale * rho[(i * mm + j) * mm + k];
  return v;
}

Field hartree_convolve(const Field& f, const KernelSet& kernels) {
  std::vector<double> v = hartree_potential(f, kernels);
  Field out(f.grid());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

Field coulomb_apply(const Field& f, const KernelSet& kernels) {
  require_same_grid(f.grid(), kernels.grid);
  Field out = f;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= kernels.coulomb_grid[i];
  return out;
}

Field neg_laplacian(const Field& f, const KernelSet& kernels) {
  require_same_grid(f.grid(), kernels.grid);
  Field out = f;
  const int n = f.grid().n_per_axis;
  fft::forward3(out.data(), n);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= -kernels.laplacian_multiplier[i];
  fft::inverse3(out.data(), n);
  return out;
}

void kinetic_propagate(Field& f, double dt, const KernelSet& kernels) {
  require_same_grid(f.grid(), kernels.grid);
  const int n = f.grid().n_per_axis;
  fft::forward3(f.data(), n);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double phase = dt * kernels.laplacian_multiplier[i];
    f[i] *= cplx{std::cos(phase), std::sin(phase)};
  }
  fft::inverse3(f.data(), n);
}

double gradient_norm_sq(const Field& f) {
  const GridSpec& g = f.grid();
  const int n = g.n_per_axis;
  std::vector<cplx> modes(f.values().begin(), f.values().end());
  fft::forward3(modes.data(), n);
  std::vector<double> k2(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) k2[static_cast<std::size_t>(a)] = g.wavenumber(a) * g.wavenumber(a);
  double s = 0.0;
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double kij = k2[static_cast<std::size_t>(i)] + k2[static_cast<std::size_t>(j)];
      for (int k = 0; k < n; ++k, ++idx) s += (kij + k2[static_cast<std::size_t>(k)]) * std::norm(modes[idx]);
    }
  return s * g.volume_element();
}

double lp_norm_pow(const Field& f, double q) {
  if (!(q >= 1.0)) throw InvalidArgument("lp_norm_pow needs q >= 1");
  double s = 0.0;
  for (const auto& v : f.values()) s += std::pow(std::abs(v), q);
  return s * f.grid().volume_element();
}

}  // namespace xfel
