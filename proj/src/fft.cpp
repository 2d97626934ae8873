#include "xfel/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace xfel::fft {
namespace {

enum class Kind { c2c_fwd3, c2c_inv3, c2c_fwd2, c2c_inv2, r2c3, c2r3 };

struct Cache {
  std::mutex mu;
  std::map<std::tuple<Kind, int, int>, fftw_plan> plans;
  int nthreads = 1;
  bool threads_ready = false;
};

Cache& cache() {
  static Cache c;
  return c;
}

// Plans are built on scratch arrays with FFTW_UNALIGNED so they can be executed
// on any caller buffer through the new-array interface.
fftw_plan get_plan(Kind kind, int n) {
  Cache& c = cache();
  std::lock_guard<std::mutex> lock(c.mu);
  auto key = std::make_tuple(kind, n, c.nthreads);
  if (auto it = c.plans.find(key); it != c.plans.end()) return it->second;

  if (!c.threads_ready) {
    fftw_init_threads();
    c.threads_ready = true;
  }
  fftw_plan_with_nthreads(c.nthreads);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = nullptr;
  const auto nn = static_cast<std::size_t>(n);
  switch (kind) {
    case Kind::c2c_fwd3:
    case Kind::c2c_inv3: {
      std::vector<std::complex<double>> buf(nn * nn * nn);
      auto* p = reinterpret_cast<fftw_complex*>(buf.data());
      plan = fftw_plan_dft_3d(n, n, n, p, p, kind == Kind::c2c_fwd3 ? FFTW_FORWARD : FFTW_BACKWARD,
                              flags);
      break;
    }
    case Kind::c2c_fwd2:
    case Kind::c2c_inv2: {
      std::vector<std::complex<double>> buf(nn * nn);
      auto* p = reinterpret_cast<fftw_complex*>(buf.data());
      plan = fftw_plan_dft_2d(n, n, p, p, kind == Kind::c2c_fwd2 ? FFTW_FORWARD : FFTW_BACKWARD,
                              flags);
      break;
    }
    case Kind::r2c3: {
      std::vector<double> in(nn * nn * nn);
      std::vector<std::complex<double>> out(nn * nn * (nn / 2 + 1));
      plan = fftw_plan_dft_r2c_3d(n, n, n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                  flags);
      break;
    }
    case Kind::c2r3: {
      std::vector<std::complex<double>> in(nn * nn * (nn / 2 + 1));
      std::vector<double> out(nn * nn * nn);
      plan = fftw_plan_dft_c2r_3d(n, n, n, reinterpret_cast<fftw_complex*>(in.data()), out.data(),
                                  flags);
      break;
    }
  }
  c.plans.emplace(key, plan);
  return plan;
}

void run_c2c(Kind kind, std::complex<double>* data, int n, std::size_t count) {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(get_plan(kind, n), p, p);
  const double s = 1.0 / std::sqrt(static_cast<double>(count));
  for (std::size_t i = 0; i < count; ++i) data[i] *= s;
}

}  // namespace

void forward3(std::complex<double>* data, int n) {
  auto nn = static_cast<std::size_t>(n);
  run_c2c(Kind::c2c_fwd3, data, n, nn * nn * nn);
}

void inverse3(std::complex<double>* data, int n) {
  auto nn = static_cast<std::size_t>(n);
  run_c2c(Kind::c2c_inv3, data, n, nn * nn * nn);
}

void forward2(std::complex<double>* data, int n) {
  auto nn = static_cast<std::size_t>(n);
  run_c2c(Kind::c2c_fwd2, data, n, nn * nn);
}

void inverse2(std::complex<double>* data, int n) {
  auto nn = static_cast<std::size_t>(n);
  run_c2c(Kind::c2c_inv2, data, n, nn * nn);
}

void r2c3(double* in, std::complex<double>* out, int m) {
  fftw_execute_dft_r2c(get_plan(Kind::r2c3, m), in, reinterpret_cast<fftw_complex*>(out));
}

void c2r3(std::complex<double>* in, double* out, int m) {
  fftw_execute_dft_c2r(get_plan(Kind::c2r3, m), reinterpret_cast<fftw_complex*>(in), out);
}

void set_threads(int n) {
  Cache& c = cache();
  std::lock_guard<std::mutex> lock(c.mu);
  c.nthreads = n < 1 ? 1 : n;
}

int threads() {
  Cache& c = cache();
  std::lock_guard<std::mutex> lock(c.mu);
  return c.nthreads;
}

}  // namespace xfel::fft
