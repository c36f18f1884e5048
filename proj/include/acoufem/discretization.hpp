#pragma once

// Bundle of the two subdomain spaces, the interface pairing, and the
// global DOF layout. Cheap value type; immutable after construction.

#include "acoufem/fespace.hpp"
#include "acoufem/mesh.hpp"

namespace acoufem {

struct Discretization {
  FeSpace space1;
  FeSpace space2;
  InterfacePairing pairing;
  DofMap dofs;

  const FeSpace& space(int side) const { return side == 1 ? space1 : space2; }
};

inline Discretization make_discretization(const StructuredQuadMesh& mesh1,
                                          const StructuredQuadMesh& mesh2, int order) {
  Discretization d;
  d.space1 = FeSpace(mesh1, order);
  d.space2 = FeSpace(mesh2, order);
  d.pairing = build_interface_pairing(mesh1, mesh2);
  d.dofs = DofMap{d.space1.num_dofs(), d.space2.num_dofs()};
  return d;
}

// Uniformly refine both sides `times` times (element counts doubled).
inline Discretization refine(const Discretization& d, int times = 1) {
  StructuredQuadMesh m1 = d.space1.mesh();
  StructuredQuadMesh m2 = d.space2.mesh();
  const int f = 1 << times;
  m1.nx *= f;
  m1.ny *= f;
  m2.nx *= f;
  m2.ny *= f;
  return make_discretization(m1, m2, d.space1.order());
}

}  // namespace acoufem
