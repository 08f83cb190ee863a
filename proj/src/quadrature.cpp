#include "hmod/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "hmod/errors.hpp"
#include "hmod/lattice.hpp"

namespace hmod {

namespace {

Rule1D build_rule(int n) {
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1) throw InvalidInput("Gauss-Legendre order must be positive");
  static std::mutex mu;
  static std::map<int, Rule1D> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

Rule1D composite_gauss_legendre(double lo, double hi, int order, double max_panel) {
  if (!(hi > lo)) return {};
  const Rule1D& base = gauss_legendre(order);
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_panel - 1e-12)));
  const double h = (hi - lo) / panels;
  Rule1D r;
  r.nodes.reserve(static_cast<std::size_t>(panels) * order);
  r.weights.reserve(r.nodes.capacity());
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    for (int i = 0; i < order; ++i) {
      r.nodes.push_back(mid + 0.5 * h * base.nodes[i]);
      r.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return r;
}

}  // namespace hmod
