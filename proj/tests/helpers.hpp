#pragma once

// Shared fixtures for the test suite: the plane-wave waveguide (two strips
// joined by a vertical interface) and the stacked-strip geometry with a
// horizontal interface.

#include <map>

#include "acoufem/acoufem.hpp"

namespace testutil {

using namespace acoufem;

inline StructuredQuadMesh strip_mesh(double x0, double x1, double y0, double y1, int nx, int ny,
                                     Edge iface, FacetTag left = FacetTag::io,
                                     FacetTag right = FacetTag::io) {
  RectDomain d;
  d.x_min = x0;
  d.x_max = x1;
  d.y_min = y0;
  d.y_max = y1;
  std::map<Edge, FacetTag> tags{{Edge::left, left},
                                {Edge::right, right},
                                {Edge::bottom, FacetTag::sound_hard},
                                {Edge::top, FacetTag::sound_hard}};
  tags[iface] = FacetTag::interface_tag;
  return build_mesh(d, nx, ny, tags);
}

// [-1,0] x [0,0.1] and [0,1] x [0,0.1]; inflow from the left, absorbing on
// the right; matches the closed-form plane-wave solution.
inline Discretization waveguide(int nx1, int ny1, int order, int nx2 = -1, int ny2 = -1) {
  if (nx2 < 0) nx2 = nx1;
  if (ny2 < 0) ny2 = ny1;
  const auto m1 = strip_mesh(-1.0, 0.0, 0.0, 0.1, nx1, ny1, Edge::right);
  const auto m2 = strip_mesh(0.0, 1.0, 0.0, 0.1, nx2, ny2, Edge::left);
  return make_discretization(m1, m2, order);
}

inline ProblemSpec waveguide_spec(double kappa, Complex zeta, double gamma,
                                  Method method = Method::nitsche, int order = 1) {
  ProblemSpec spec;
  spec.kappa = kappa;
  spec.gamma = gamma;
  spec.order = order;
  spec.method = method;
  spec.zeta = ImpedanceField::constant(zeta);
  spec.inflow[{1, Edge::left}] = Complex(1.0, 0.0);
  return spec;
}

// Two strips stacked in y with a horizontal interface at y = 0.05;
// asymmetric inflow from the left excites interface-guided waves.
inline Discretization stacked(int nx, int ny, int order, double length = 0.9) {
  const auto m1 = strip_mesh(0.0, length, 0.0, 0.05, nx, ny, Edge::top);
  const auto m2 = strip_mesh(0.0, length, 0.05, 0.1, nx, ny, Edge::bottom);
  return make_discretization(m1, m2, order);
}

}  // namespace testutil
