#pragma once

// Nodal Q_k space on one structured mesh: global DOF numbering on the
// refined nodal grid, reference<->physical maps, and trace evaluation on
// boundary edges. The two subdomain spaces never share DOFs.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "acoufem/basis.hpp"
#include "acoufem/mesh.hpp"

namespace acoufem {

class FeSpace {
 public:
  FeSpace() = default;

  FeSpace(const StructuredQuadMesh& mesh, int order) : mesh_(mesh), basis_(order) {}

  const StructuredQuadMesh& mesh() const { return mesh_; }
  const QkBasis& basis() const { return basis_; }
  int order() const { return basis_.order(); }

  // Nodal grid: (k*nx + 1) x (k*ny + 1) points, lexicographic x-fastest.
  int ndx() const { return basis_.order() * mesh_.nx + 1; }
  int ndy() const { return basis_.order() * mesh_.ny + 1; }
  int num_dofs() const { return ndx() * ndy(); }

  int dof_index(int i, int j) const { return j * ndx() + i; }

  std::array<double, 2> dof_point(int d) const {
    const int i = d % ndx();
    const int j = d / ndx();
    const int k = basis_.order();
    return {mesh_.domain.x_min + i * (mesh_.hx() / k),
            mesh_.domain.y_min + j * (mesh_.hy() / k)};
  }

  void element_dofs(int ex, int ey, std::array<int, QkBasis::max_size>& out) const {
    const int k = basis_.order();
    const int n = k + 1;
    for (int jy = 0; jy < n; ++jy)
      for (int jx = 0; jx < n; ++jx)
        out[jx + n * jy] = dof_index(k * ex + jx, k * ey + jy);
  }

  std::array<double, 2> element_origin(int ex, int ey) const {
    return {mesh_.domain.x_min + ex * mesh_.hx(), mesh_.domain.y_min + ey * mesh_.hy()};
  }

  std::array<double, 2> to_physical(int ex, int ey, double xi, double eta) const {
    const auto o = element_origin(ex, ey);
    return {o[0] + 0.5 * (xi + 1.0) * mesh_.hx(), o[1] + 0.5 * (eta + 1.0) * mesh_.hy()};
  }

  // Constant diagonal gradient transform of the affine map.
  std::array<double, 2> gradient_scale() const {
    return {2.0 / mesh_.hx(), 2.0 / mesh_.hy()};
  }

  double jacobian() const { return 0.25 * mesh_.hx() * mesh_.hy(); }

  bool contains(double x, double y, double tol = 1e-12) const {
    const auto& d = mesh_.domain;
    const double sx = tol * std::max(1.0, d.width());
    const double sy = tol * std::max(1.0, d.height());
    return x >= d.x_min - sx && x <= d.x_max + sx && y >= d.y_min - sy && y <= d.y_max + sy;
  }

  // Locate the element containing (x, y); points on inter-element lines go
  // to the element on the +x/+y side except at the domain boundary.
  void locate(double x, double y, int& ex, int& ey, double& xi, double& eta) const {
    if (!contains(x, y, 1e-10))
      throw std::invalid_argument("FeSpace::locate: point outside subdomain");
    const auto& d = mesh_.domain;
    ex = std::clamp(static_cast<int>(std::floor((x - d.x_min) / mesh_.hx())), 0, mesh_.nx - 1);
    ey = std::clamp(static_cast<int>(std::floor((y - d.y_min) / mesh_.hy())), 0, mesh_.ny - 1);
    const auto o = element_origin(ex, ey);
    xi = std::clamp(2.0 * (x - o[0]) / mesh_.hx() - 1.0, -1.0, 1.0);
    eta = std::clamp(2.0 * (y - o[1]) / mesh_.hy() - 1.0, -1.0, 1.0);
  }

 private:
  StructuredQuadMesh mesh_;
  QkBasis basis_;
};

// Global DOF layout over the two subdomain spaces: side 1 first, side 2
// appended; no DOF is shared.
struct DofMap {
  int n1 = 0;
  int n2 = 0;

  int total() const { return n1 + n2; }
  int offset(int side) const { return side == 1 ? 0 : n1; }
};

// Trace data of one element's shape functions at a point on a boundary
// edge: global DOFs, shape values, and the derivative along a given unit
// normal (the caller fixes the normal; it need not be outward).
struct EdgeTrace {
  std::array<int, QkBasis::max_size> dofs{};
  std::array<double, QkBasis::max_size> value{};
  std::array<double, QkBasis::max_size> dnormal{};
  int count = 0;
};

// Evaluate traces at running coordinate t along the given boundary edge
// (t is y on left/right edges, x on bottom/top edges).
inline EdgeTrace edge_trace(const FeSpace& sp, Edge edge, double t,
                            const std::array<double, 2>& normal) {
  const auto& mesh = sp.mesh();
  const auto& d = mesh.domain;
  const bool vert = (edge == Edge::left || edge == Edge::right);
  const double lo = vert ? d.y_min : d.x_min;
  const double h = vert ? mesh.hy() : mesh.hx();
  const int nf = vert ? mesh.ny : mesh.nx;
  if (t < lo - 1e-10 || t > lo + nf * h + 1e-10)
    throw std::invalid_argument("edge_trace: point not on the requested edge");
  const int f = std::clamp(static_cast<int>(std::floor((t - lo) / h)), 0, nf - 1);
  const double s = std::clamp(2.0 * (t - lo - f * h) / h - 1.0, -1.0, 1.0);

  int ex = 0, ey = 0;
  double xi = 0.0, eta = 0.0;
  switch (edge) {
    case Edge::left: ex = 0; ey = f; xi = -1.0; eta = s; break;
    case Edge::right: ex = mesh.nx - 1; ey = f; xi = 1.0; eta = s; break;
    case Edge::bottom: ex = f; ey = 0; xi = s; eta = -1.0; break;
    case Edge::top: ex = f; ey = mesh.ny - 1; xi = s; eta = 1.0; break;
  }

  EdgeTrace tr;
  tr.count = sp.basis().size();
  sp.element_dofs(ex, ey, tr.dofs);
  std::array<double, QkBasis::max_size> values;
  std::array<std::array<double, 2>, QkBasis::max_size> grads;
  sp.basis().eval(xi, eta, values, grads);
  const auto gs = sp.gradient_scale();
  for (int a = 0; a < tr.count; ++a) {
    tr.value[a] = values[a];
    tr.dnormal[a] = gs[0] * grads[a][0] * normal[0] + gs[1] * grads[a][1] * normal[1];
  }
  return tr;
}

// Trace on the interface edge of a side's mesh, with the pairing's fixed
// normal used for the normal derivative on both sides.
inline EdgeTrace interface_trace(const FeSpace& sp, double t,
                                 const std::array<double, 2>& pairing_normal) {
  return edge_trace(sp, sp.mesh().interface_edge(), t, pairing_normal);
}

}  // namespace acoufem
