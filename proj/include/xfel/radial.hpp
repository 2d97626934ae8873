#pragma once

#include <vector>

#include "xfel/field.hpp"
#include "xfel/grid.hpp"

namespace xfel {

// Samples of a positive radial profile on r_i = i * dr.
struct RadialProfile {
  std::vector<double> r;
  std::vector<double> values;
  std::vector<double> derivative;
  double mass = 0.0;            // 4 pi int R^2 r^2 dr
  double kinetic = 0.0;         // 4 pi int R'^2 r^2 dr
  double l10_3 = 0.0;           // 4 pi int R^{10/3} r^2 dr
  double central_value = 0.0;   // R(0)
  double shooting_bracket = 0.0;

  double dr() const { return r.size() > 1 ? r[1] - r[0] : 0.0; }
  double r_max() const { return r.empty() ? 0.0 : r.back(); }
  // Linear interpolation; zero beyond the last node.
  double operator()(double radius) const;
  // |A/2 - (3/10) B| / (A/2)
  double pohozaev_residual() const;
  // |A + M - B| / B
  double nehari_residual() const;
};

// Positive decaying solution of R'' + 2R'/r - R + R^{7/3} = 0 by shooting on R(0).
// The profile extends past r_max if needed so that the last value is below 1e-10.
RadialProfile solve_classical_R(double dr = 0.005, double r_max = 30.0);

// R(|x|) sampled on the grid.
Field lift_radial(const RadialProfile& profile, const GridSpec& grid);
// a * R(s |x|)
Field lift_radial(const RadialProfile& profile, const GridSpec& grid, double amplitude, double stretch);

// 4 pi int f(r) r^2 dr by composite Simpson on uniform samples.
double radial_integral(const std::vector<double>& r, const std::vector<double>& f);

}  // namespace xfel
