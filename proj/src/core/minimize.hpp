#pragma once

#include <cmath>
#include <utility>

// Derivative-free 1D minimization used for well refinement and duration
// scans: golden-section search on a bracketing interval.

namespace ionweave {

template <typename F>
double golden_section_min(F&& f, double a, double b, double xtol) {
  constexpr double invphi = 0.6180339887498949;  // 1/phi
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace ionweave
