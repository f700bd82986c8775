#include "muskat/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "muskat/core.hpp"

namespace muskat::numerics {

namespace {

QuadratureRule build_gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

std::vector<double> first_derivative(std::span<const double> f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 4) throw Error("derivative stencils need at least four samples");
  std::vector<double> d(f.size());
  auto F = [&](int i) { return f[static_cast<std::size_t>(i)]; };
  for (int i = 2; i < n - 2; ++i) {
    d[static_cast<std::size_t>(i)] = (F(i - 2) - 8.0 * F(i - 1) + 8.0 * F(i + 1) - F(i + 2)) / (12.0 * h);
  }
  d[1] = (F(2) - F(0)) / (2.0 * h);
  d[static_cast<std::size_t>(n - 2)] = (F(n - 1) - F(n - 3)) / (2.0 * h);
  d[0] = (-3.0 * F(0) + 4.0 * F(1) - F(2)) / (2.0 * h);
  d[static_cast<std::size_t>(n - 1)] = (3.0 * F(n - 1) - 4.0 * F(n - 2) + F(n - 3)) / (2.0 * h);
  return d;
}

std::vector<double> second_derivative(std::span<const double> f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 4) throw Error("derivative stencils need at least four samples");
  std::vector<double> d(f.size());
  auto F = [&](int i) { return f[static_cast<std::size_t>(i)]; };
  const double h2 = h * h;
  for (int i = 1; i < n - 1; ++i) d[static_cast<std::size_t>(i)] = (F(i - 1) - 2.0 * F(i) + F(i + 1)) / h2;
  d[0] = (2.0 * F(0) - 5.0 * F(1) + 4.0 * F(2) - F(3)) / h2;
  d[static_cast<std::size_t>(n - 1)] = (2.0 * F(n - 1) - 5.0 * F(n - 2) + 4.0 * F(n - 3) - F(n - 4)) / h2;
  return d;
}

std::vector<double> third_derivative(std::span<const double> f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 5) throw Error("third-derivative stencil needs at least five samples");
  std::vector<double> d(f.size());
  auto F = [&](int i) { return f[static_cast<std::size_t>(i)]; };
  const double h3 = 2.0 * h * h * h;
  for (int i = 2; i < n - 2; ++i) {
    d[static_cast<std::size_t>(i)] = (-F(i - 2) + 2.0 * F(i - 1) - 2.0 * F(i + 1) + F(i + 2)) / h3;
  }
  d[0] = d[1] = d[2];
  d[static_cast<std::size_t>(n - 1)] = d[static_cast<std::size_t>(n - 2)] = d[static_cast<std::size_t>(n - 3)];
  return d;
}

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

}  // namespace muskat::numerics
