#include "xfel/scalings.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <string>
#include <numbers>

#include "xfel/error.hpp"
#include "xfel/fft.hpp"

namespace xfel {
namespace {

constexpr double pi = std::numbers::pi;
// Largest fraction of mass the interpolation may discard (aliased or cut off).
// Content displaced by less than one grid cell (in x or k) is not counted.
constexpr double max_lost_fraction = 1e-6;

using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Periodic trigonometric interpolation weights for samples of v at the grid
// points evaluated at lambda * x_i; rows for targets outside the box are zero.
CMat interpolation_matrix(const GridSpec& g, double lambda) {
  const int n = g.n_per_axis;
  const double L = g.half_length;
  CMat t = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double y = lambda * g.coord(i);
    if (y < -L || y > L) continue;
    for (int j = 0; j < n; ++j) {
      const double d = pi * (y - g.coord(j)) / L;
      double s = 1.0 + std::cos(0.5 * n * d);
      for (int m = 1; m < n / 2; ++m) s += 2.0 * std::cos(m * d);
      t(i, j) = s / n;
    }
  }
  return t;
}

double lost_fraction(const Field& u, double lambda) {
  const GridSpec& g = u.grid();
  const int n = g.n_per_axis;
  const double total = u.mass() / g.volume_element();
  if (total == 0.0) return 0.0;
  double lost = 0.0;
  if (lambda > 1.0) {
    std::vector<cplx> modes(u.values().begin(), u.values().end());
    fft::forward3(modes.data(), n);
    const double kcut = (pi / g.spacing() + pi / g.half_length) / lambda;
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k, ++idx)
          if (std::abs(g.wavenumber(i)) > kcut || std::abs(g.wavenumber(j)) > kcut ||
              std::abs(g.wavenumber(k)) > kcut)
            lost += std::norm(modes[idx]);
  } else {
    const double xcut = lambda * g.half_length + g.spacing();
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k, ++idx)
          if (std::abs(g.coord(i)) > xcut || std::abs(g.coord(j)) > xcut ||
              std::abs(g.coord(k)) > xcut)
            lost += std::norm(u[idx]);
  }
  return lost / total;
}

std::string fmt_lost(double lambda, double lost) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "rescale by %.6g loses mass fraction %.3e (limit %.1e)", lambda, lost,
                max_lost_fraction);
  return buf;
}

}  // namespace

double ScalingKind::amplitude_exponent() const {
  switch (tag_) {
    case Tag::mass_preserving: return 1.5;
    case Tag::cubed: return 3.0;
    case Tag::amplitude: return 1.0;
    case Tag::p_scaling: return 2.0 / p_;
    case Tag::p2_scaling: return 3.0 / (p_ + 2.0);
  }
  return 0.0;
}

const char* ScalingKind::name() const {
  switch (tag_) {
    case Tag::mass_preserving: return "mass_preserving";
    case Tag::cubed: return "cubed";
    case Tag::amplitude: return "amplitude";
    case Tag::p_scaling: return "p_scaling";
    case Tag::p2_scaling: return "p2_scaling";
  }
  return "?";
}

TermValues ScalingKind::term_exponents(double p) const {
  const double a = amplitude_exponent(), s = spatial_exponent();
  return {2 * a - 3 * s, 2 * a - s, 2 * a - 5 * s, 2 * a - 2 * s, 4 * a - 5 * s, a * (p + 2) - 3 * s};
}

Field rescale(const Field& u, const ScalingKind& kind, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("rescale needs lambda > 0");
  const double amp = std::pow(lambda, kind.amplitude_exponent());
  if (kind.spatial_exponent() == 0.0 || lambda == 1.0) {
    Field out = u;
    out *= amp;
    return out;
  }
  const double lost = lost_fraction(u, lambda);
  if (lost > max_lost_fraction)
    throw ResolutionError(fmt_lost(lambda, lost));

  const GridSpec& g = u.grid();
  const Eigen::Index n = g.n_per_axis;
  const CMat t = interpolation_matrix(g, lambda);
  Field out = u;
  // x3 (fastest): rows of an n^2 x n view
  {
    Eigen::Map<CMat> view(out.data(), n * n, n);
    CMat tmp = view * t.transpose();
    view = tmp;
  }
  // x2: each x1-slab is n x n
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Map<CMat> slab(out.data() + i * n * n, n, n);
    CMat tmp = t * slab;
    slab = tmp;
  }
  // x1 (slowest): n x n^2 view
  {
    Eigen::Map<CMat> view(out.data(), n, n * n);
    CMat tmp = t * view;
    view = tmp;
  }
  out *= amp;
  return out;
}

TermValues scaled_terms(const TermValues& t, const ScalingKind& kind, double lambda, double p) {
  const TermValues e = kind.term_exponents(p);
  return {t.mass * std::pow(lambda, e.mass),
          t.kinetic * std::pow(lambda, e.kinetic),
          t.harmonic_partial * std::pow(lambda, e.harmonic_partial),
          t.coulomb * std::pow(lambda, e.coulomb),
          t.hartree * std::pow(lambda, e.hartree),
          t.lp * std::pow(lambda, e.lp)};
}

double along_family(const TermCoefficients& c, const TermValues& t, const ScalingKind& kind,
                    double lambda, double p) {
  return c.apply(scaled_terms(t, kind, lambda, p));
}

double along_family_derivative(const TermCoefficients& c, const TermValues& t,
                               const ScalingKind& kind, double lambda, double p) {
  const TermValues e = kind.term_exponents(p);
  const TermValues s = scaled_terms(t, kind, lambda, p);
  return (c.mass * e.mass * s.mass + c.kinetic * e.kinetic * s.kinetic +
          c.harmonic_partial * e.harmonic_partial * s.harmonic_partial +
          c.coulomb * e.coulomb * s.coulomb + c.hartree * e.hartree * s.hartree +
          c.lp * e.lp * s.lp) /
         lambda;
}

double pohozaev_lambda(const TermValues& t, const PhysicsParams& pp) {
  pp.validate();
  if (t.mass == 0.0) throw InvalidArgument("project_pohozaev of the zero field");
  const TermCoefficients q = coeffs::Q(pp);
  if (pp.is_critical() && !(t.kinetic < 0.6 * pp.lambda3 * t.lp))
    throw NoMaximum("critical p needs kinetic < (3 lambda3 / 5) lp; got kinetic " +
                    std::to_string(t.kinetic) + ", bound " + std::to_string(0.6 * pp.lambda3 * t.lp));
  const ScalingKind kind = ScalingKind::mass_preserving();
  // Q(u_lambda) / lambda keeps the scan well scaled near lambda -> 0
  return first_root([&](double l) { return along_family(q, t, kind, l, pp.p) / l; });
}

Projection project_pohozaev(const Field& u, const TermValues& t, const PhysicsParams& pp) {
  const double l = pohozaev_lambda(t, pp);
  return {l, rescale(u, ScalingKind::mass_preserving(), l)};
}

Projection project_pohozaev(const Field& u, const PhysicsParams& pp, const KernelSet& kernels) {
  return project_pohozaev(u, compute_terms(u, pp.p, kernels), pp);
}

double k_lambda(const TermValues& t, const PhysicsParams& pp) {
  pp.validate();
  if (t.mass == 0.0) throw InvalidArgument("project_K of the zero field");
  const double w = pp.require_omega("project_K");
  if (!(w > 0.0) || pp.lambda2 < 0.0 || !(pp.lambda3 > 0.0) || pp.lambda1 != 0.0)
    throw InvalidArgument("project_K needs omega > 0, lambda1 = 0, lambda2 >= 0, lambda3 > 0");
  const TermCoefficients k = coeffs::K_b_omega(pp);
  const ScalingKind kind = ScalingKind::amplitude();
  return first_root([&](double l) { return along_family(k, t, kind, l, pp.p) / (l * l); });
}

Projection project_K(const Field& u, const TermValues& t, const PhysicsParams& pp) {
  const double l = k_lambda(t, pp);
  return {l, rescale(u, ScalingKind::amplitude(), l)};
}

Projection project_K(const Field& u, const PhysicsParams& pp, const KernelSet& kernels) {
  return project_K(u, compute_terms(u, pp.p, kernels), pp);
}

double cutoff_profile(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

Field apply_cutoff(const Field& u, double M) {
  if (!(M > 0.0)) throw InvalidArgument("apply_cutoff needs M > 0");
  const GridSpec& g = u.grid();
  const int n = g.n_per_axis;
  Field out = u;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double x = g.coord(i), y = g.coord(j), z = g.coord(k);
        out.at(i, j, k) *= cutoff_profile(std::sqrt(x * x + y * y + z * z) / M);
      }
  return out;
}

}  // namespace xfel
