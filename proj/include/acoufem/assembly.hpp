#pragma once

// Assembly of the complex symmetric (non-Hermitian) linear system for the
// impedance-interface Helmholtz problem, in either the Nitsche-type form
// with the interface weight lambda = (h/gamma + zeta/(i*kappa))^-1 or the
// standard form with interface term (i*kappa/zeta) [[p]][[q]].

#include <Eigen/Sparse>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "acoufem/discretization.hpp"
#include "acoufem/problem.hpp"
#include "acoufem/quadrature.hpp"

namespace acoufem {

using SparseMatrixC = Eigen::SparseMatrix<Complex>;
using SparseMatrixD = Eigen::SparseMatrix<double>;
using VectorC = Eigen::VectorXcd;

struct ComplexSparseSystem {
  SparseMatrixC A;
  VectorC b;
  DofMap dofs;
};

// lambda = (h/gamma + zeta/(i*kappa))^-1. The resolution condition
// h*Im(zeta) >= -(gamma/(4*kappa))*|zeta|^2 guarantees a nonzero
// denominator; it is enforced by check_resolution, not re-checked here.
inline Complex compute_lambda(Complex zeta, double kappa, double h, double gamma) {
  const Complex denom = h / gamma + zeta / Complex(0.0, kappa);
  if (std::abs(denom) == 0.0)
    throw std::runtime_error("compute_lambda: degenerate weight, h/gamma + zeta/(i*kappa) = 0");
  return 1.0 / denom;
}

// Per-subsegment interface data shared by assembly and the mesh-dependent
// norms: the local h (mean of the two owning facet lengths), the midpoint
// impedance, and the resulting lambda.
struct SegmentCoefficients {
  std::vector<double> h;
  std::vector<Complex> zeta;
  std::vector<Complex> lambda;
};

inline SegmentCoefficients segment_coefficients(const ProblemSpec& spec,
                                                const InterfacePairing& pairing) {
  SegmentCoefficients c;
  const int n = static_cast<int>(pairing.segments.size());
  c.h.resize(n);
  c.zeta.resize(n);
  c.lambda.resize(n);
  for (int s = 0; s < n; ++s) {
    const auto& seg = pairing.segments[s];
    c.h[s] = 0.5 * (seg.h1 + seg.h2);
    c.zeta[s] = spec.zeta.at_segment(s);
    c.lambda[s] = compute_lambda(c.zeta[s], spec.kappa, c.h[s], spec.gamma);
  }
  return c;
}

struct ResolutionReport {
  bool ok = false;
  double h0 = 0.0;            // +inf when Im(zeta) >= 0 everywhere
  double delta_zeta_minus = 0.0;
  std::vector<int> violations;  // subsegments with max(h1, h2) > h0
};

// Mesh-size ceiling h0 = gamma*delta_zeta^- / (4*kappa) for the surface
// wave layer; trivially satisfied when Im(zeta) >= 0 a.e.
inline ResolutionReport check_resolution(const ProblemSpec& spec,
                                         const InterfacePairing& pairing) {
  ResolutionReport rep;
  const int n = static_cast<int>(pairing.segments.size());
  if (!spec.zeta.has_negative_imag(n)) {
    rep.ok = true;
    rep.h0 = std::numeric_limits<double>::infinity();
    rep.delta_zeta_minus = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.delta_zeta_minus = spec.zeta.delta_zeta_minus(n);
  if (rep.delta_zeta_minus <= 0.0)
    throw std::invalid_argument(
        "check_resolution: |zeta| vanishes where Im(zeta) < 0; method hypothesis violated");
  rep.h0 = spec.gamma * rep.delta_zeta_minus / (4.0 * spec.kappa);
  for (int s = 0; s < n; ++s) {
    const auto& seg = pairing.segments[s];
    if (std::max(seg.h1, seg.h2) > rep.h0) rep.violations.push_back(s);
  }
  rep.ok = rep.violations.empty();
  return rep;
}

namespace detail {

using TripletC = Eigen::Triplet<Complex>;

// Element stiffness and mass on the (identical) elements of one space.
struct ElementMatrices {
  std::vector<double> K;  // row-major size^2
  std::vector<double> M;
};

inline ElementMatrices element_matrices(const FeSpace& sp) {
  const int n = sp.basis().size();
  ElementMatrices em;
  em.K.assign(n * n, 0.0);
  em.M.assign(n * n, 0.0);
  const auto rule = tensor_rule(gauss_legendre(sp.order() + 2));
  const auto gs = sp.gradient_scale();
  const double jac = sp.jacobian();
  std::array<double, QkBasis::max_size> values;
  std::array<std::array<double, 2>, QkBasis::max_size> grads;
  for (int q = 0; q < rule.size(); ++q) {
    sp.basis().eval(rule.points[q][0], rule.points[q][1], values, grads);
    const double w = rule.weights[q] * jac;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        em.K[a * n + b] += w * (gs[0] * gs[0] * grads[a][0] * grads[b][0] +
                                gs[1] * gs[1] * grads[a][1] * grads[b][1]);
        em.M[a * n + b] += w * values[a] * values[b];
      }
  }
  return em;
}

template <class Scalar>
inline void add_volume_terms(const FeSpace& sp, int offset, Scalar k_coeff, Scalar m_coeff,
                             std::vector<Eigen::Triplet<Scalar>>& trips) {
  const auto em = element_matrices(sp);
  const int n = sp.basis().size();
  std::array<int, QkBasis::max_size> dofs;
  for (int ey = 0; ey < sp.mesh().ny; ++ey)
    for (int ex = 0; ex < sp.mesh().nx; ++ex) {
      sp.element_dofs(ex, ey, dofs);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const Scalar v = k_coeff * em.K[a * n + b] + m_coeff * em.M[a * n + b];
          if (v != Scalar(0)) trips.emplace_back(offset + dofs[a], offset + dofs[b], v);
        }
    }
}

// i*kappa * <p, q> on io-tagged edges and the load 2*i*kappa * <g, q>.
inline void add_io_boundary(const FeSpace& sp, int side, int offset, const ProblemSpec& spec,
                            std::vector<TripletC>& trips, VectorC& b) {
  const auto& mesh = sp.mesh();
  const Quadrature1D rule = gauss_legendre(sp.order() + 2);
  const Complex ik(0.0, spec.kappa);
  for (int e = 0; e < 4; ++e) {
    const Edge edge = static_cast<Edge>(e);
    if (mesh.edge_tag(edge) != FacetTag::io) continue;
    const bool vert = (edge == Edge::left || edge == Edge::right);
    const double lo = vert ? mesh.domain.y_min : mesh.domain.x_min;
    const double h = vert ? mesh.hy() : mesh.hx();
    const int nf = vert ? mesh.ny : mesh.nx;
    const Complex g = spec.inflow_on(side, edge);
    for (int f = 0; f < nf; ++f)
      for (int q = 0; q < rule.size(); ++q) {
        const double t = lo + (f + 0.5 * (rule.points[q] + 1.0)) * h;
        const double w = 0.5 * h * rule.weights[q];
        const EdgeTrace tr = edge_trace(sp, edge, t, {0.0, 0.0});
        for (int a = 0; a < tr.count; ++a) {
          if (tr.value[a] == 0.0) continue;
          b[offset + tr.dofs[a]] += 2.0 * ik * g * w * tr.value[a];
          for (int c = 0; c < tr.count; ++c)
            if (tr.value[c] != 0.0)
              trips.emplace_back(offset + tr.dofs[a], offset + tr.dofs[c],
                                 ik * w * tr.value[a] * tr.value[c]);
        }
      }
  }
}

// Jump and average operators of the combined two-sided trace at one
// interface quadrature point, in global DOF indexing.
struct PairedTrace {
  std::vector<int> dofs;
  std::vector<double> jump;  // [[.]] = side-1 trace minus side-2 trace
  std::vector<double> avg;   // {d./dn} with the pairing's fixed normal
};

inline PairedTrace paired_trace(const Discretization& disc, double t) {
  const EdgeTrace t1 = interface_trace(disc.space1, t, disc.pairing.normal);
  const EdgeTrace t2 = interface_trace(disc.space2, t, disc.pairing.normal);
  PairedTrace p;
  p.dofs.reserve(t1.count + t2.count);
  p.jump.reserve(t1.count + t2.count);
  p.avg.reserve(t1.count + t2.count);
  for (int a = 0; a < t1.count; ++a) {
    p.dofs.push_back(t1.dofs[a]);
    p.jump.push_back(t1.value[a]);
    p.avg.push_back(0.5 * t1.dnormal[a]);
  }
  const int off2 = disc.dofs.offset(2);
  for (int a = 0; a < t2.count; ++a) {
    p.dofs.push_back(off2 + t2.dofs[a]);
    p.jump.push_back(-t2.value[a]);
    p.avg.push_back(0.5 * t2.dnormal[a]);
  }
  return p;
}

inline void check_finite(const ComplexSparseSystem& sys) {
  for (int k = 0; k < sys.A.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(sys.A, k); it; ++it)
      if (!std::isfinite(it.value().real()) || !std::isfinite(it.value().imag()))
        throw std::runtime_error("assembly: non-finite matrix coefficient");
  if (!sys.b.allFinite()) throw std::runtime_error("assembly: non-finite load coefficient");
}

inline ComplexSparseSystem assemble_common(const ProblemSpec& spec, const Discretization& disc,
                                           std::vector<TripletC>& trips) {
  spec.validate();
  ComplexSparseSystem sys;
  sys.dofs = disc.dofs;
  const int n = disc.dofs.total();
  sys.b = VectorC::Zero(n);
  const Complex one(1.0, 0.0);
  const Complex mk2(-spec.kappa * spec.kappa, 0.0);
  add_volume_terms<Complex>(disc.space1, disc.dofs.offset(1), one, mk2, trips);
  add_volume_terms<Complex>(disc.space2, disc.dofs.offset(2), one, mk2, trips);
  add_io_boundary(disc.space1, 1, disc.dofs.offset(1), spec, trips, sys.b);
  add_io_boundary(disc.space2, 2, disc.dofs.offset(2), spec, trips, sys.b);
  return sys;
}

}  // namespace detail

inline ComplexSparseSystem assemble_nitsche(const ProblemSpec& spec,
                                            const Discretization& disc) {
  const ResolutionReport res = check_resolution(spec, disc.pairing);
  if (!res.ok) {
    std::ostringstream msg;
    msg << "assemble_nitsche: resolution condition violated (h0 = " << res.h0
        << "); offending subsegments:";
    for (int s : res.violations) msg << ' ' << s;
    throw std::invalid_argument(msg.str());
  }

  std::vector<detail::TripletC> trips;
  ComplexSparseSystem sys = detail::assemble_common(spec, disc, trips);

  const SegmentCoefficients coef = segment_coefficients(spec, disc.pairing);
  const Quadrature1D rule = gauss_legendre(spec.order + 2);
  const Complex ik(0.0, spec.kappa);
  for (std::size_t s = 0; s < disc.pairing.segments.size(); ++s) {
    const auto& seg = disc.pairing.segments[s];
    const Complex lambda = coef.lambda[s];
    const Complex zik = coef.zeta[s] / ik;
    const Complex c1 = 1.0 - lambda * zik;  // equals (h/gamma)*lambda
    for (int q = 0; q < rule.size(); ++q) {
      const double t = seg.midpoint() + 0.5 * seg.length() * rule.points[q];
      const double w = 0.5 * seg.length() * rule.weights[q];
      const detail::PairedTrace tr = detail::paired_trace(disc, t);
      const int m = static_cast<int>(tr.dofs.size());
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          const Complex v = w * (-c1 * (tr.jump[a] * tr.avg[b] + tr.avg[a] * tr.jump[b]) -
                                 zik * c1 * tr.avg[a] * tr.avg[b] +
                                 lambda * tr.jump[a] * tr.jump[b]);
          if (v != Complex(0.0)) trips.emplace_back(tr.dofs[a], tr.dofs[b], v);
        }
    }
  }

  sys.A.resize(disc.dofs.total(), disc.dofs.total());
  sys.A.setFromTriplets(trips.begin(), trips.end());
  detail::check_finite(sys);
  return sys;
}

inline ComplexSparseSystem assemble_standard(const ProblemSpec& spec,
                                             const Discretization& disc) {
  const int nseg = static_cast<int>(disc.pairing.segments.size());
  for (int s = 0; s < nseg; ++s)
    if (std::abs(spec.zeta.at_segment(s)) < 1e-12)
      throw std::invalid_argument(
          "assemble_standard: |zeta| vanishes on the interface; the standard form "
          "requires |zeta| >= delta > 0, use method=nitsche instead");

  std::vector<detail::TripletC> trips;
  ComplexSparseSystem sys = detail::assemble_common(spec, disc, trips);

  const Quadrature1D rule = gauss_legendre(spec.order + 2);
  const Complex ik(0.0, spec.kappa);
  for (int s = 0; s < nseg; ++s) {
    const auto& seg = disc.pairing.segments[s];
    const Complex coeff = ik / spec.zeta.at_segment(s);
    for (int q = 0; q < rule.size(); ++q) {
      const double t = seg.midpoint() + 0.5 * seg.length() * rule.points[q];
      const double w = 0.5 * seg.length() * rule.weights[q];
      const detail::PairedTrace tr = detail::paired_trace(disc, t);
      const int m = static_cast<int>(tr.dofs.size());
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          const Complex v = w * coeff * tr.jump[a] * tr.jump[b];
          if (v != Complex(0.0)) trips.emplace_back(tr.dofs[a], tr.dofs[b], v);
        }
    }
  }

  sys.A.resize(disc.dofs.total(), disc.dofs.total());
  sys.A.setFromTriplets(trips.begin(), trips.end());
  detail::check_finite(sys);
  return sys;
}

inline ComplexSparseSystem assemble(const ProblemSpec& spec, const Discretization& disc) {
  return spec.method == Method::standard ? assemble_standard(spec, disc)
                                         : assemble_nitsche(spec, disc);
}

// ---- Component matrices for norms and diagnostics ----------------------

// Broken stiffness over both subdomains.
inline SparseMatrixD stiffness_matrix(const Discretization& disc) {
  std::vector<Eigen::Triplet<double>> trips;
  detail::add_volume_terms<double>(disc.space1, disc.dofs.offset(1), 1.0, 0.0, trips);
  detail::add_volume_terms<double>(disc.space2, disc.dofs.offset(2), 1.0, 0.0, trips);
  SparseMatrixD K(disc.dofs.total(), disc.dofs.total());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

// Broken mass over both subdomains.
inline SparseMatrixD mass_matrix(const Discretization& disc) {
  std::vector<Eigen::Triplet<double>> trips;
  detail::add_volume_terms<double>(disc.space1, disc.dofs.offset(1), 0.0, 1.0, trips);
  detail::add_volume_terms<double>(disc.space2, disc.dofs.offset(2), 0.0, 1.0, trips);
  SparseMatrixD M(disc.dofs.total(), disc.dofs.total());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

// Interface quadratic form sum_s w_s * \int_s op(p) op(q) with a scalar
// weight per subsegment; op is the jump or the normal-flux average.
template <class Scalar>
inline Eigen::SparseMatrix<Scalar> interface_form_matrix(const Discretization& disc,
                                                         const std::vector<Scalar>& seg_weight,
                                                         bool use_jump) {
  if (seg_weight.size() != disc.pairing.segments.size())
    throw std::invalid_argument("interface_form_matrix: weight table size mismatch");
  std::vector<Eigen::Triplet<Scalar>> trips;
  const Quadrature1D rule = gauss_legendre(disc.space1.order() + 2);
  for (std::size_t s = 0; s < disc.pairing.segments.size(); ++s) {
    if (seg_weight[s] == Scalar(0)) continue;
    const auto& seg = disc.pairing.segments[s];
    for (int q = 0; q < rule.size(); ++q) {
      const double t = seg.midpoint() + 0.5 * seg.length() * rule.points[q];
      const double w = 0.5 * seg.length() * rule.weights[q];
      const detail::PairedTrace tr = detail::paired_trace(disc, t);
      const auto& op = use_jump ? tr.jump : tr.avg;
      const int m = static_cast<int>(tr.dofs.size());
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          const Scalar v = seg_weight[s] * Scalar(w * op[a] * op[b]);
          if (v != Scalar(0)) trips.emplace_back(tr.dofs[a], tr.dofs[b], v);
        }
    }
  }
  Eigen::SparseMatrix<Scalar> J(disc.dofs.total(), disc.dofs.total());
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

inline SparseMatrixD interface_jump_mass(const Discretization& disc,
                                         const std::vector<double>& seg_weight) {
  return interface_form_matrix<double>(disc, seg_weight, true);
}

inline SparseMatrixD interface_flux_mass(const Discretization& disc,
                                         const std::vector<double>& seg_weight) {
  return interface_form_matrix<double>(disc, seg_weight, false);
}

// Matrix Market coordinate export, complex general, 1-based indices.
inline void write_matrix_market(const SparseMatrixC& A, std::ostream& os) {
  os << "%%MatrixMarket matrix coordinate complex general\n";
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  os.precision(16);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(A, k); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value().real() << ' '
         << it.value().imag() << '\n';
}

}  // namespace acoufem
