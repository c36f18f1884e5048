#pragma once

// Gauss-Legendre rules on the reference segment [-1,1] and their tensor
// products on the reference square [-1,1]^2.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace acoufem {

struct Quadrature1D {
  std::vector<double> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
  // Exact for polynomials up to this degree.
  int exactness() const { return 2 * size() - 1; }
};

// n-point Gauss-Legendre rule, nodes found by Newton iteration on P_n.
inline Quadrature1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1 points");
  Quadrature1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence for P_n(x) and P_n'(x).
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.points[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

struct Quadrature2D {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
};

inline Quadrature2D tensor_rule(const Quadrature1D& rule1d) {
  Quadrature2D rule;
  const int n = rule1d.size();
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      rule.points.push_back({rule1d.points[i], rule1d.points[j]});
      rule.weights.push_back(rule1d.weights[i] * rule1d.weights[j]);
    }
  return rule;
}

}  // namespace acoufem
