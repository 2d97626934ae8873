#pragma once

#include <cstddef>

namespace xfel {

// Uniform periodic box [-L, L)^3 with n points per axis.
struct GridSpec {
  int n_per_axis = 0;
  double half_length = 0.0;

  static GridSpec make(int n, double half_length);

  double spacing() const { return 2.0 * half_length / n_per_axis; }
  double volume_element() const {
    double h = spacing();
    return h * h * h;
  }
  std::size_t size() const {
    auto n = static_cast<std::size_t>(n_per_axis);
    return n * n * n;
  }
  double coord(int i) const { return -half_length + i * spacing(); }
  // Wavenumber of FFT index m (standard ordering, Nyquist mode negative).
  double wavenumber(int m) const;
  // Grid index of x -> -x.
  int mirror(int i) const { return (n_per_axis - i) % n_per_axis; }

  void validate() const;

  bool operator==(const GridSpec& o) const {
    return n_per_axis == o.n_per_axis && half_length == o.half_length;
  }
};

}  // namespace xfel
