#pragma once

#include <cmath>

#include "xfel/error.hpp"

namespace xfel {

template <class F>
double first_root(F&& f, double lo, double hi, int points) {
  const double step = std::log(hi / lo) / (points - 1);
  double a = lo;
  double fa = f(a);
  if (fa == 0.0) return a;
  for (int i = 1; i < points; ++i) {
    const double b = lo * std::exp(step * i);
    const double fb = f(b);
    if (fb == 0.0) return b;
    if ((fa < 0.0) != (fb < 0.0)) {
      double x = a, y = b, fx = fa;
      while (y / x - 1.0 > 1e-13) {
        const double mid = std::sqrt(x * y);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (fx < 0.0)) {
          x = mid;
          fx = fm;
        } else {
          y = mid;
        }
      }
      return std::sqrt(x * y);
    }
    a = b;
    fa = fb;
  }
  throw NoCrossing("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace xfel
