#pragma once

// Tensor-product Lagrange Q_k bases (k = 1..3) on the reference square
// [-1,1]^2, with equispaced nodes. Local node ordering is lexicographic,
// x-fastest: node a = ix + (k+1)*iy.

#include <array>
#include <cassert>
#include <stdexcept>

namespace acoufem {

class QkBasis {
 public:
  static constexpr int max_order = 3;
  static constexpr int max_size = (max_order + 1) * (max_order + 1);

  QkBasis() : QkBasis(1) {}

  explicit QkBasis(int order) : order_(order) {
    if (order < 1 || order > max_order)
      throw std::invalid_argument("QkBasis: order must be in {1, 2, 3}");
  }

  int order() const { return order_; }
  int nodes_per_dim() const { return order_ + 1; }
  int size() const { return nodes_per_dim() * nodes_per_dim(); }

  double node1d(int i) const { return -1.0 + 2.0 * i / order_; }

  std::array<double, 2> ref_node(int a) const {
    return {node1d(a % nodes_per_dim()), node1d(a / nodes_per_dim())};
  }

  double lagrange(int i, double x) const {
    double v = 1.0;
    const double xi = node1d(i);
    for (int m = 0; m <= order_; ++m) {
      if (m == i) continue;
      const double xm = node1d(m);
      v *= (x - xm) / (xi - xm);
    }
    return v;
  }

  double lagrange_deriv(int i, double x) const {
    const double xi = node1d(i);
    double sum = 0.0;
    for (int j = 0; j <= order_; ++j) {
      if (j == i) continue;
      double term = 1.0 / (xi - node1d(j));
      for (int m = 0; m <= order_; ++m) {
        if (m == i || m == j) continue;
        const double xm = node1d(m);
        term *= (x - xm) / (xi - xm);
      }
      sum += term;
    }
    return sum;
  }

  // Shape values and reference gradients at (xi, eta). Out-of-range points
  // are a contract violation; only checked in debug builds.
  void eval(double xi, double eta, std::array<double, max_size>& values,
            std::array<std::array<double, 2>, max_size>& grads) const {
    assert(xi >= -1.0 - 1e-9 && xi <= 1.0 + 1e-9);
    assert(eta >= -1.0 - 1e-9 && eta <= 1.0 + 1e-9);
    const int n = nodes_per_dim();
    std::array<double, max_order + 1> lx, ly, dx, dy;
    for (int i = 0; i < n; ++i) {
      lx[i] = lagrange(i, xi);
      ly[i] = lagrange(i, eta);
      dx[i] = lagrange_deriv(i, xi);
      dy[i] = lagrange_deriv(i, eta);
    }
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int a = i + n * j;
        values[a] = lx[i] * ly[j];
        grads[a] = {dx[i] * ly[j], lx[i] * dy[j]};
      }
  }

 private:
  int order_;
};

}  // namespace acoufem
