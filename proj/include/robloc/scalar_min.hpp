#pragma once

#include <functional>

namespace robloc {

// Brute-force minimiser of a unimodal-ish scalar function on [lo, hi]: a dense
// grid locates the best cell, golden-section search refines inside the two
// neighbouring cells. Used as the reference for proximal computations.
struct ScalarMinimum {
  double argmin = 0.0;
  double value = 0.0;
};

ScalarMinimum GridGoldenMinimize(const std::function<double(double)>& f, double lo, double hi,
                                 int grid_points = 100000, double tol = 1e-12);

}  // namespace robloc
