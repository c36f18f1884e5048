#pragma once

// Direct sparse solve of the assembled complex symmetric system and the
// resulting discrete field, evaluable anywhere with one-sided traces on
// the interface.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <array>
#include <complex>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "acoufem/assembly.hpp"
#include "acoufem/discretization.hpp"

namespace acoufem {

class DiscreteField {
 public:
  DiscreteField() = default;
  DiscreteField(Discretization disc, VectorC coeffs)
      : disc_(std::move(disc)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != disc_.dofs.total())
      throw std::invalid_argument("DiscreteField: coefficient count does not match DOF map");
  }

  const Discretization& disc() const { return disc_; }
  const VectorC& coeffs() const { return coeffs_; }

  // Value at (x, y) in the closure of the hinted subdomain; on the
  // interface this is the hinted side's one-sided trace.
  Complex value(double x, double y, int side_hint) const {
    Complex grad[2];
    return value_and_gradient(x, y, side_hint, grad);
  }

  Complex value_and_gradient(double x, double y, int side_hint, Complex grad[2]) const {
    const FeSpace& sp = disc_.space(side_hint);
    if (!sp.contains(x, y, 1e-10))
      throw std::invalid_argument("DiscreteField: point outside the hinted subdomain");
    int ex = 0, ey = 0;
    double xi = 0.0, eta = 0.0;
    sp.locate(x, y, ex, ey, xi, eta);
    std::array<int, QkBasis::max_size> dofs;
    std::array<double, QkBasis::max_size> values;
    std::array<std::array<double, 2>, QkBasis::max_size> grads;
    sp.element_dofs(ex, ey, dofs);
    sp.basis().eval(xi, eta, values, grads);
    const auto gs = sp.gradient_scale();
    const int off = disc_.dofs.offset(side_hint);
    Complex v = 0.0;
    grad[0] = grad[1] = 0.0;
    for (int a = 0; a < sp.basis().size(); ++a) {
      const Complex c = coeffs_[off + dofs[a]];
      v += c * values[a];
      grad[0] += c * (gs[0] * grads[a][0]);
      grad[1] += c * (gs[1] * grads[a][1]);
    }
    return v;
  }

  // One-sided jump [[p]] = p1 - p2 at a point on the interface, t being
  // the running interface coordinate.
  Complex interface_jump(double t) const {
    const auto p = disc_.pairing.point(t);
    return value(p[0], p[1], 1) - value(p[0], p[1], 2);
  }

 private:
  Discretization disc_;
  VectorC coeffs_;
};

struct SolveOptions {
  double residual_tol = 1e-10;
};

inline DiscreteField solve(const ComplexSparseSystem& sys, const Discretization& disc,
                           const SolveOptions& opts = {}) {
  if (sys.A.rows() != sys.A.cols() || sys.A.rows() != sys.b.size())
    throw std::invalid_argument("solve: system dimensions do not match");
  if (sys.b.norm() == 0.0) return DiscreteField(disc, VectorC::Zero(sys.b.size()));

  Eigen::SparseLU<SparseMatrixC> lu;
  lu.analyzePattern(sys.A);
  lu.factorize(sys.A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve: factorization failed (singular to working precision): " +
                             lu.lastErrorMessage());
  const VectorC x = lu.solve(sys.b);
  const double rel_res = (sys.A * x - sys.b).norm() / sys.b.norm();
  if (!(rel_res <= opts.residual_tol))
    throw std::runtime_error("solve: residual check failed, achieved relative residual " +
                             std::to_string(rel_res));
  return DiscreteField(disc, x);
}

// Field dump: CSV columns (x, y, side, Re p, Im p, |p|) on a uniform
// sampling grid per subdomain.
inline void write_field_csv(const DiscreteField& field, int samples_x, int samples_y,
                            std::ostream& os) {
  os << "x,y,side,re_p,im_p,abs_p\n";
  os.precision(12);
  for (int side = 1; side <= 2; ++side) {
    const auto& d = field.disc().space(side).mesh().domain;
    for (int j = 0; j <= samples_y; ++j)
      for (int i = 0; i <= samples_x; ++i) {
        const double x = d.x_min + d.width() * i / samples_x;
        const double y = d.y_min + d.height() * j / samples_y;
        const Complex v = field.value(x, y, side);
        os << x << ',' << y << ',' << side << ',' << v.real() << ',' << v.imag() << ','
           << std::abs(v) << '\n';
      }
  }
}

// Legacy-ASCII VTK structured grid of one subdomain, sampled at the nodal
// resolution of the space.
inline void write_field_vtk(const DiscreteField& field, int side, std::ostream& os) {
  const FeSpace& sp = field.disc().space(side);
  const auto& d = sp.mesh().domain;
  const int nx = sp.ndx();
  const int ny = sp.ndy();
  os << "# vtk DataFile Version 3.0\nacoustic pressure\nASCII\n";
  os << "DATASET STRUCTURED_GRID\nDIMENSIONS " << nx << ' ' << ny << " 1\n";
  os << "POINTS " << nx * ny << " double\n";
  os.precision(12);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      os << d.x_min + d.width() * i / (nx - 1) << ' ' << d.y_min + d.height() * j / (ny - 1)
         << " 0\n";
  os << "POINT_DATA " << nx * ny << "\n";
  const char* names[3] = {"re_p", "im_p", "abs_p"};
  for (int comp = 0; comp < 3; ++comp) {
    os << "SCALARS " << names[comp] << " double 1\nLOOKUP_TABLE default\n";
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double x = d.x_min + d.width() * i / (nx - 1);
        const double y = d.y_min + d.height() * j / (ny - 1);
        const Complex v = field.value(x, y, side);
        os << (comp == 0 ? v.real() : comp == 1 ? v.imag() : std::abs(v)) << '\n';
      }
  }
}

}  // namespace acoufem
