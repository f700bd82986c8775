#pragma once

#include <span>
#include <vector>

namespace muskat::numerics {

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points, cached per n. Thread-safe.
const QuadratureRule& gauss_legendre(int n);

/// Integral of fn over [lo, hi] split into `panels` equal Gauss-Legendre panels.
template <class Fn>
double integrate(Fn&& fn, double lo, double hi, int panels, int order = 16) {
  const auto& rule = gauss_legendre(order);
  const double width = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    double s = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * fn(mid + 0.5 * width * rule.nodes[k]);
    total += 0.5 * width * s;
  }
  return total;
}

/// First derivative: 4th-order centered in the interior, 2nd-order centered
/// one node in from each end, 2nd-order one-sided at the two end nodes.
std::vector<double> first_derivative(std::span<const double> f, double h);

/// Second derivative: 2nd-order centered, 2nd-order one-sided at the ends.
std::vector<double> second_derivative(std::span<const double> f, double h);

/// Third derivative: 2nd-order centered five-point stencil; the two nodes at
/// each end reuse the nearest interior value.
std::vector<double> third_derivative(std::span<const double> f, double h);

/// Trapezoid rule on uniformly spaced samples.
double trapezoid(std::span<const double> f, double h);

}  // namespace muskat::numerics
