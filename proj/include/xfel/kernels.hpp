#pragma once

#include <vector>

#include "xfel/field.hpp"
#include "xfel/grid.hpp"

namespace xfel {

// Precomputed multipliers and potentials for one grid.
struct KernelSet {
  GridSpec grid;
  std::vector<double> laplacian_multiplier;   // -|k|^2, n^3, FFT ordering
  std::vector<double> coulomb_grid;           // regularized 1/|x|, n^3
  std::vector<double> harmonic_partial_grid;  // x1^2 + x2^2, n^3
  std::vector<double> radius_sq_grid;         // |x|^2, n^3
  // Truncated Coulomb kernel on the zero-padded (2n)^3 box, r2c layout
  // (2n) x (2n) x (n+1).
  std::vector<double> hartree_multiplier;
  double truncation_radius = 0.0;

  int padded_n() const { return 2 * grid.n_per_axis; }
};

KernelSet make_kernels(const GridSpec& grid);

// |x|^{-1} * |f|^2 as a real array on the grid.
std::vector<double> hartree_potential(const Field& f, const KernelSet& kernels);
// Same, packaged as a real-valued Field.
Field hartree_convolve(const Field& f, const KernelSet& kernels);
Field coulomb_apply(const Field& f, const KernelSet& kernels);

// -Delta f, spectrally.
Field neg_laplacian(const Field& f, const KernelSet& kernels);
// Multiply every Fourier mode by exp(i * dt * multiplier), i.e. exp(i dt Delta).
void kinetic_propagate(Field& f, double dt, const KernelSet& kernels);

// ||grad f||^2 via Parseval.
double gradient_norm_sq(const Field& f);
// h^3 sum |f|^q
double lp_norm_pow(const Field& f, double q);

// Cell average of 1/|x| over the cube of side h centred at the origin.
double origin_cell_average(double h);

}  // namespace xfel
