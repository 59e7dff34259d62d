#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace lipc {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
template <typename F>
double composite_gauss_legendre(F&& f, double a, double b, int panels, const GaussLegendreRule& rule) {
  const double width = (b - a) / panels;
  const double half = 0.5 * width;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * width;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) panel += rule.weights[i] * f(mid + half * rule.nodes[i]);
    total += half * panel;
  }
  return total;
}

// Adaptive Simpson with Richardson correction; absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50);

}  // namespace lipc
