#include "xfel/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "xfel/error.hpp"

namespace xfel {
namespace {

constexpr double nonlinear_exp = 7.0 / 3.0;

enum class Shot { undershoot, overshoot, reached_end };

struct Trajectory {
  std::vector<double> r, R, dR;
  Shot outcome = Shot::reached_end;
};

double rhs(double r, double R, double dR) {
  return -2.0 * dR / r + R - std::pow(std::max(R, 0.0), nonlinear_exp);
}

// RK4 from the Taylor start at r = dr; stops at the first sign change of R
// (overshoot) or of R' (undershoot).
Trajectory shoot(double r0_value, double dr, double r_end) {
  Trajectory tr;
  const double curv = (r0_value - std::pow(r0_value, nonlinear_exp)) / 3.0;
  tr.r.push_back(0.0);
  tr.R.push_back(r0_value);
  tr.dR.push_back(0.0);
  double r = dr, R = r0_value + 0.5 * curv * dr * dr, P = curv * dr;
  const auto steps = static_cast<std::size_t>(std::ceil(r_end / dr));
  for (std::size_t i = 1; i <= steps; ++i) {
    tr.r.push_back(r);
    tr.R.push_back(R);
    tr.dR.push_back(P);
    if (R <= 0.0) {
      tr.outcome = Shot::overshoot;
      return tr;
    }
    if (P > 0.0) {
      tr.outcome = Shot::undershoot;
      return tr;
    }
    const double k1R = P, k1P = rhs(r, R, P);
    const double k2R = P + 0.5 * dr * k1P, k2P = rhs(r + 0.5 * dr, R + 0.5 * dr * k1R, P + 0.5 * dr * k1P);
    const double k3R = P + 0.5 * dr * k2P, k3P = rhs(r + 0.5 * dr, R + 0.5 * dr * k2R, P + 0.5 * dr * k2P);
    const double k4R = P + dr * k3P, k4P = rhs(r + dr, R + dr * k3R, P + dr * k3P);
    R += dr / 6.0 * (k1R + 2 * k2R + 2 * k3R + k4R);
    P += dr / 6.0 * (k1P + 2 * k2P + 2 * k3P + k4P);
    r = dr * static_cast<double>(i + 1);
  }
  return tr;
}

}  // namespace

double radial_integral(const std::vector<double>& r, const std::vector<double>& f) {
  const std::size_t n = f.size();
  if (n < 3) return 0.0;
  const double h = r[1] - r[0];
  // Simpson needs an even number of intervals; the last one is handled by trapezoid
  const std::size_t last = (n - 1) % 2 == 0 ? n - 1 : n - 2;
  double s = 0.0;
  for (std::size_t i = 0; i + 2 <= last; i += 2) {
    s += f[i] * r[i] * r[i] + 4 * f[i + 1] * r[i + 1] * r[i + 1] + f[i + 2] * r[i + 2] * r[i + 2];
  }
  s *= h / 3.0;
  if (last != n - 1) s += 0.5 * h * (f[n - 2] * r[n - 2] * r[n - 2] + f[n - 1] * r[n - 1] * r[n - 1]);
  return 4.0 * std::numbers::pi * s;
}

RadialProfile solve_classical_R(double dr, double r_max) {
  if (!(dr > 0.0 && dr <= 0.01)) throw InvalidArgument("solve_classical_R needs 0 < dr <= 0.01");
  if (!(r_max >= 20.0)) throw InvalidArgument("solve_classical_R needs r_max >= 20");

  double lo = 1.0 + 1e-6, hi = 20.0;
  const Shot lo_shot = shoot(lo, dr, r_max).outcome;
  const Shot hi_shot = shoot(hi, dr, r_max).outcome;
  if (lo_shot != Shot::undershoot || hi_shot != Shot::overshoot) {
    std::ostringstream os;
    os << "shooting bracket [" << lo << ", " << hi << "] is not an undershoot/overshoot pair";
    throw ConvergenceError(os.str());
  }
  for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Shot s = shoot(mid, dr, r_max).outcome;
    if (s == Shot::reached_end) {
      lo = hi = mid;
      break;
    }
    (s == Shot::undershoot ? lo : hi) = mid;
  }

  Trajectory tr = shoot(lo, dr, r_max);
  // Keep the integrated branch while it is far above the shooting error, then
  // continue with the linearized tail R ~ c e^{-r} / r.
  const double match_level = 1e-6 * lo;
  std::size_t m = 1;
  while (m + 1 < tr.R.size() && tr.R[m] > match_level && tr.dR[m + 1] < 0.0) ++m;
  if (tr.R[m] > 1e-3 * lo) {
    std::ostringstream os;
    os << "shooting lost precision at r = " << tr.r[m] << " with bracket [" << lo << ", " << hi
       << "]";
    throw ConvergenceError(os.str());
  }
  const double rm = tr.r[m], Rm = tr.R[m];
  double r_end = r_max;
  // tail value below 1e-10 at the last node
  while (Rm * rm / r_end * std::exp(-(r_end - rm)) >= 1e-10) r_end += 1.0;
  const auto nodes = static_cast<std::size_t>(std::llround(r_end / dr)) + 1;

  RadialProfile prof;
  prof.r.resize(nodes);
  prof.values.resize(nodes);
  prof.derivative.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double r = dr * static_cast<double>(i);
    prof.r[i] = r;
    if (i <= m) {
      prof.values[i] = tr.R[i];
      prof.derivative[i] = tr.dR[i];
    } else {
      const double v = Rm * rm / r * std::exp(-(r - rm));
      prof.values[i] = v;
      prof.derivative[i] = -v * (1.0 + 1.0 / r);
    }
  }
  prof.central_value = lo;
  prof.shooting_bracket = hi - lo;

  std::vector<double> sq(nodes), dsq(nodes), l(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    sq[i] = prof.values[i] * prof.values[i];
    dsq[i] = prof.derivative[i] * prof.derivative[i];
    l[i] = std::pow(prof.values[i], 10.0 / 3.0);
  }
  prof.mass = radial_integral(prof.r, sq);
  prof.kinetic = radial_integral(prof.r, dsq);
  prof.l10_3 = radial_integral(prof.r, l);
  return prof;
}

double RadialProfile::operator()(double radius) const {
  if (radius >= r_max()) return 0.0;
  const double x = radius / dr();
  const auto i = static_cast<std::size_t>(x);
  const double t = x - static_cast<double>(i);
  return (1.0 - t) * values[i] + t * values[i + 1];
}

double RadialProfile::pohozaev_residual() const {
  return std::abs(0.5 * kinetic - 0.3 * l10_3) / (0.5 * kinetic);
}

double RadialProfile::nehari_residual() const {
  return std::abs(kinetic + mass - l10_3) / l10_3;
}

Field lift_radial(const RadialProfile& profile, const GridSpec& grid, double amplitude, double stretch) {
  if (profile.r_max() < stretch * grid.half_length * std::sqrt(3.0))
    throw InvalidArgument("profile r_max " + std::to_string(profile.r_max()) +
                          " is below the (stretched) grid diagonal");
  return Field::from_function(grid, [&](double x, double y, double z) {
    return cplx{amplitude * profile(stretch * std::sqrt(x * x + y * y + z * z)), 0.0};
  });
}

Field lift_radial(const RadialProfile& profile, const GridSpec& grid) {
  return lift_radial(profile, grid, 1.0, 1.0);
}

}  // namespace xfel
