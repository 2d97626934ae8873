#pragma once

#include <complex>

namespace xfel::fft {

// Unitary-symmetric transforms (scaled by N^{-1/2} each way), in place.
void forward3(std::complex<double>* data, int n);
void inverse3(std::complex<double>* data, int n);
void forward2(std::complex<double>* data, int n);
void inverse2(std::complex<double>* data, int n);

// Unnormalized real transforms on an m^3 grid; `out` holds m*m*(m/2+1) modes.
void r2c3(double* in, std::complex<double>* out, int m);
// Destroys `in`.
void c2r3(std::complex<double>* in, double* out, int m);

// Worker threads used inside each transform; applies to plans created afterwards.
void set_threads(int n);
int threads();

}  // namespace xfel::fft
