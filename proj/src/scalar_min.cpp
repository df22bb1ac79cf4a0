#include "robloc/scalar_min.hpp"

#include <algorithm>
#include <cmath>

namespace robloc {

ScalarMinimum GridGoldenMinimize(const std::function<double(double)>& f, double lo, double hi,
                                 int grid_points, double tol) {
  const int n = std::max(grid_points, 3);
  const double step = (hi - lo) / (n - 1);
  int best = 0;
  double best_value = f(lo);
  for (int i = 1; i < n; ++i) {
    const double v = f(lo + i * step);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }

  double a = lo + std::max(best - 1, 0) * step;
  double b = lo + std::min(best + 1, n - 1) * step;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  ScalarMinimum out{0.5 * (a + b), 0.0};
  out.value = f(out.argmin);
  if (best_value < out.value) {
    out = {lo + best * step, best_value};
  }
  return out;
}

}  // namespace robloc
