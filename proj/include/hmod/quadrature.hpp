#pragma once

#include <vector>

namespace hmod {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1] (Newton on the Legendre recurrence).
const Rule1D& gauss_legendre(int n);

// Composite Gauss-Legendre on [lo, hi] split into equal panels of width <= max_panel.
Rule1D composite_gauss_legendre(double lo, double hi, int order, double max_panel);

}  // namespace hmod
