#include "xfel/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "xfel/error.hpp"

namespace xfel {

Field::Field(const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  values_.assign(grid_.size(), cplx{0.0, 0.0});
}

Field::Field(const GridSpec& grid, std::vector<cplx> values) : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size())
    throw InvalidArgument("field has " + std::to_string(values_.size()) + " values, grid needs " +
                          std::to_string(grid_.size()));
}

double Field::mass() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return s * grid_.volume_element();
}

double Field::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field& Field::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field& Field::axpy(double a, const Field& x) {
  require_same_grid(grid_, x.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

double inner(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return s * a.grid().volume_element();
}

double l2_norm(const Field& f) { return std::sqrt(f.mass()); }

double max_abs_diff(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b))
    throw GridMismatch("grid mismatch: n=" + std::to_string(a.n_per_axis) + " L=" +
                       std::to_string(a.half_length) + " vs n=" + std::to_string(b.n_per_axis) +
                       " L=" + std::to_string(b.half_length));
}

Field symmetrize_cubic(const Field& f) {
  const GridSpec& g = f.grid();
  const int n = g.n_per_axis;
  Field out(g);
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const std::array<int, 3> idx{i, j, k};
        cplx acc{0.0, 0.0};
        for (const auto& p : perms)
          for (int s = 0; s < 8; ++s) {
            std::array<int, 3> t{};
            for (int a = 0; a < 3; ++a) {
              int v = idx[p[a]];
              t[a] = (s >> a) & 1 ? g.mirror(v) : v;
            }
            acc += f.at(t[0], t[1], t[2]);
          }
        out.at(i, j, k) = acc / 48.0;
      }
  return out;
}

}  // namespace xfel
