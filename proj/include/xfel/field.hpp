#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "xfel/grid.hpp"

namespace xfel {

using cplx = std::complex<double>;

// Complex samples on a GridSpec, row-major with x1 slowest. Value semantics.
class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid);
  Field(const GridSpec& grid, std::vector<cplx> values);

  template <class F>
  static Field from_function(const GridSpec& grid, F&& f) {
    Field out(grid);
    int n = grid.n_per_axis;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          out.at(i, j, k) = f(grid.coord(i), grid.coord(j), grid.coord(k));
    return out;
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx* data() { return values_.data(); }
  const cplx* data() const { return values_.data(); }

  cplx& operator[](std::size_t idx) { return values_[idx]; }
  const cplx& operator[](std::size_t idx) const { return values_[idx]; }

  std::size_t index(int i, int j, int k) const {
    auto n = static_cast<std::size_t>(grid_.n_per_axis);
    return (static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n +
           static_cast<std::size_t>(k);
  }
  cplx& at(int i, int j, int k) { return values_[index(i, j, k)]; }
  const cplx& at(int i, int j, int k) const { return values_[index(i, j, k)]; }

  // h^3 * sum |f|^2
  double mass() const;
  double max_abs() const;
  bool all_finite() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  Field& operator*=(cplx s);
  // this += a * x
  Field& axpy(double a, const Field& x);

 private:
  GridSpec grid_{};
  std::vector<cplx> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

// Re <a, b>_{L^2} = h^3 * sum Re(conj(a) b)
double inner(const Field& a, const Field& b);
double l2_norm(const Field& f);
double max_abs_diff(const Field& a, const Field& b);

void require_same_grid(const GridSpec& a, const GridSpec& b);

// Average over the 48 symmetries of the cube (axis permutations and reflections
// about the origin grid point). Radial functions are fixed points.
Field symmetrize_cubic(const Field& f);

}  // namespace xfel
