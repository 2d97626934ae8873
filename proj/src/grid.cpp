#include "xfel/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "xfel/error.hpp"

namespace xfel {

GridSpec GridSpec::make(int n, double half_length) {
  GridSpec g{n, half_length};
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (n_per_axis < 8)
    throw InvalidGrid("n_per_axis must be >= 8, got " + std::to_string(n_per_axis));
  if (n_per_axis % 2 != 0)
    throw InvalidGrid("n_per_axis must be even, got " + std::to_string(n_per_axis));
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw InvalidGrid("half_length must be positive and finite");
}

double GridSpec::wavenumber(int m) const {
  int signed_m = m < n_per_axis / 2 ? m : m - n_per_axis;
  return std::numbers::pi * signed_m / half_length;
}

}  // namespace xfel
