#pragma once

// Structured quadrilateral meshes for two rectangular subdomains joined
// along a straight interface, plus the merged 1D interface pairing used
// for non-matching grids.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace acoufem {

enum class Edge : int { left = 0, right = 1, bottom = 2, top = 3 };

enum class FacetTag : int { io = 0, sound_hard = 1, interface_tag = 2 };

inline const char* to_string(Edge e) {
  switch (e) {
    case Edge::left: return "left";
    case Edge::right: return "right";
    case Edge::bottom: return "bottom";
    case Edge::top: return "top";
  }
  return "?";
}

inline const char* to_string(FacetTag t) {
  switch (t) {
    case FacetTag::io: return "io";
    case FacetTag::sound_hard: return "s";
    case FacetTag::interface_tag: return "interface";
  }
  return "?";
}

struct RectDomain {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  int side_id = 1;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }

  void validate() const {
    if (!(x_min < x_max) || !(y_min < y_max))
      throw std::invalid_argument("RectDomain: empty or inverted extents");
    if (side_id != 1 && side_id != 2)
      throw std::invalid_argument("RectDomain: side_id must be 1 or 2");
  }
};

// Axis-aligned tensor grid of nx*ny rectangular elements. Node coordinates
// and connectivity are implied by the grid and computed on demand, so a
// mesh is a small value type.
struct StructuredQuadMesh {
  RectDomain domain;
  int nx = 0;
  int ny = 0;
  std::array<FacetTag, 4> edge_tags{};  // indexed by Edge

  double hx() const { return domain.width() / nx; }
  double hy() const { return domain.height() / ny; }

  int num_nodes() const { return (nx + 1) * (ny + 1); }
  int num_elements() const { return nx * ny; }
  int num_boundary_facets() const { return 2 * (nx + ny); }

  std::array<double, 2> node(int id) const {
    const int i = id % (nx + 1);
    const int j = id / (nx + 1);
    return {domain.x_min + i * hx(), domain.y_min + j * hy()};
  }

  // Corner nodes of element e, counterclockwise from the lower-left.
  std::array<int, 4> element_nodes(int e) const {
    const int ex = e % nx;
    const int ey = e / nx;
    const int base = ey * (nx + 1) + ex;
    return {base, base + 1, base + (nx + 1) + 1, base + (nx + 1)};
  }

  FacetTag edge_tag(Edge e) const { return edge_tags[static_cast<int>(e)]; }

  Edge interface_edge() const {
    for (int e = 0; e < 4; ++e)
      if (edge_tags[e] == FacetTag::interface_tag) return static_cast<Edge>(e);
    throw std::logic_error("mesh has no interface-tagged edge");
  }

  bool interface_vertical() const {
    const Edge e = interface_edge();
    return e == Edge::left || e == Edge::right;
  }

  // Coordinate of the interface line: x for a vertical interface, y for a
  // horizontal one.
  double interface_line() const {
    switch (interface_edge()) {
      case Edge::left: return domain.x_min;
      case Edge::right: return domain.x_max;
      case Edge::bottom: return domain.y_min;
      case Edge::top: return domain.y_max;
    }
    return 0.0;
  }

  double interface_lo() const {
    return interface_vertical() ? domain.y_min : domain.x_min;
  }
  double interface_hi() const {
    return interface_vertical() ? domain.y_max : domain.x_max;
  }
  int interface_facet_count() const { return interface_vertical() ? ny : nx; }
  double interface_facet_length() const {
    return interface_vertical() ? hy() : hx();
  }
};

inline StructuredQuadMesh build_mesh(const RectDomain& domain, int nx, int ny,
                                     const std::map<Edge, FacetTag>& tag_rules) {
  domain.validate();
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("build_mesh: element counts must be >= 1");
  StructuredQuadMesh mesh;
  mesh.domain = domain;
  mesh.nx = nx;
  mesh.ny = ny;
  int n_interface_edges = 0;
  for (int e = 0; e < 4; ++e) {
    const auto it = tag_rules.find(static_cast<Edge>(e));
    if (it == tag_rules.end())
      throw std::invalid_argument(std::string("build_mesh: tag_rules missing edge '") +
                                  to_string(static_cast<Edge>(e)) + "'");
    mesh.edge_tags[e] = it->second;
    if (it->second == FacetTag::interface_tag) ++n_interface_edges;
  }
  if (n_interface_edges != 1)
    throw std::invalid_argument("build_mesh: exactly one edge must be tagged 'interface'");
  return mesh;
}

// One piece of the merged interface partition. [lo, hi] is measured in the
// running coordinate along the interface (y for a vertical interface, x for
// a horizontal one). facet1/facet2 index the owning interface facet on each
// side, h1/h2 are the owning facet lengths.
struct InterfaceSubsegment {
  double lo = 0.0;
  double hi = 0.0;
  int facet1 = -1;
  int facet2 = -1;
  double h1 = 0.0;
  double h2 = 0.0;

  double length() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

// Overlay of the two sides' 1D interface facet partitions. The normal is
// fixed to point from side 1 into side 2, so the jump of a field is
// (side-1 trace) - (side-2 trace).
struct InterfacePairing {
  bool vertical = true;
  double line = 0.0;  // x (vertical) or y (horizontal) of the interface
  double lo = 0.0;
  double hi = 0.0;
  std::array<double, 2> normal{1.0, 0.0};
  std::vector<InterfaceSubsegment> segments;

  double length() const { return hi - lo; }

  std::array<double, 2> point(double t) const {
    return vertical ? std::array<double, 2>{line, t}
                    : std::array<double, 2>{t, line};
  }
};

inline InterfacePairing build_interface_pairing(const StructuredQuadMesh& mesh1,
                                                const StructuredQuadMesh& mesh2) {
  const Edge e1 = mesh1.interface_edge();
  const Edge e2 = mesh2.interface_edge();
  if (mesh1.interface_vertical() != mesh2.interface_vertical())
    throw std::invalid_argument("interface pairing: inconsistent interface orientation");

  constexpr double geom_tol = 1e-12;
  if (std::abs(mesh1.interface_line() - mesh2.interface_line()) > geom_tol ||
      std::abs(mesh1.interface_lo() - mesh2.interface_lo()) > geom_tol ||
      std::abs(mesh1.interface_hi() - mesh2.interface_hi()) > geom_tol)
    throw std::invalid_argument("interface pairing: interface edges are not geometrically coincident");

  InterfacePairing pairing;
  pairing.vertical = mesh1.interface_vertical();
  pairing.line = mesh1.interface_line();
  pairing.lo = mesh1.interface_lo();
  pairing.hi = mesh1.interface_hi();

  // Normal from side 1 into side 2.
  if (pairing.vertical) {
    if (e1 == Edge::right && e2 == Edge::left)
      pairing.normal = {1.0, 0.0};
    else if (e1 == Edge::left && e2 == Edge::right)
      pairing.normal = {-1.0, 0.0};
    else
      throw std::invalid_argument("interface pairing: subdomains must face each other across the interface");
  } else {
    if (e1 == Edge::top && e2 == Edge::bottom)
      pairing.normal = {0.0, 1.0};
    else if (e1 == Edge::bottom && e2 == Edge::top)
      pairing.normal = {0.0, -1.0};
    else
      throw std::invalid_argument("interface pairing: subdomains must face each other across the interface");
  }

  const int n1 = mesh1.interface_facet_count();
  const int n2 = mesh2.interface_facet_count();
  const double h1 = mesh1.interface_facet_length();
  const double h2 = mesh2.interface_facet_length();

  std::vector<double> breaks;
  breaks.reserve(n1 + n2 + 2);
  for (int i = 0; i <= n1; ++i) breaks.push_back(pairing.lo + i * h1);
  for (int i = 0; i <= n2; ++i) breaks.push_back(pairing.lo + i * h2);
  std::sort(breaks.begin(), breaks.end());

  const double merge_tol = 1e-12 * pairing.length();
  std::vector<double> merged;
  for (double b : breaks)
    if (merged.empty() || b - merged.back() > merge_tol) merged.push_back(b);
  merged.back() = pairing.hi;  // exact endpoint

  auto owner = [&](double mid, int n, double h) {
    int f = static_cast<int>(std::floor((mid - pairing.lo) / h));
    return std::clamp(f, 0, n - 1);
  };

  for (std::size_t s = 0; s + 1 < merged.size(); ++s) {
    InterfaceSubsegment seg;
    seg.lo = merged[s];
    seg.hi = merged[s + 1];
    seg.facet1 = owner(seg.midpoint(), n1, h1);
    seg.facet2 = owner(seg.midpoint(), n2, h2);
    seg.h1 = h1;
    seg.h2 = h2;
    pairing.segments.push_back(seg);
  }
  return pairing;
}

// CSV dump of the node, element, and boundary facet tables.
inline void write_mesh_csv(const StructuredQuadMesh& mesh, std::ostream& nodes,
                           std::ostream& elements, std::ostream& facets) {
  nodes << "id,x,y\n";
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const auto p = mesh.node(i);
    nodes << i << ',' << p[0] << ',' << p[1] << '\n';
  }
  elements << "id,n0,n1,n2,n3\n";
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto n = mesh.element_nodes(e);
    elements << e << ',' << n[0] << ',' << n[1] << ',' << n[2] << ',' << n[3] << '\n';
  }
  facets << "edge,index,tag,n0,n1\n";
  for (int e = 0; e < 4; ++e) {
    const Edge edge = static_cast<Edge>(e);
    const bool vert = (edge == Edge::left || edge == Edge::right);
    const int count = vert ? mesh.ny : mesh.nx;
    for (int f = 0; f < count; ++f) {
      int a = 0, b = 0;
      switch (edge) {
        case Edge::left:
          a = f * (mesh.nx + 1);
          b = (f + 1) * (mesh.nx + 1);
          break;
        case Edge::right:
          a = f * (mesh.nx + 1) + mesh.nx;
          b = (f + 1) * (mesh.nx + 1) + mesh.nx;
          break;
        case Edge::bottom:
          a = f;
          b = f + 1;
          break;
        case Edge::top:
          a = mesh.ny * (mesh.nx + 1) + f;
          b = mesh.ny * (mesh.nx + 1) + f + 1;
          break;
      }
      facets << to_string(edge) << ',' << f << ',' << to_string(mesh.edge_tag(edge))
             << ',' << a << ',' << b << '\n';
    }
  }
}

}  // namespace acoufem
