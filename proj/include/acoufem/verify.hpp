#pragma once

// Verification toolbox: interpolation, error norms (broken L2 and the
// mesh/wave-number dependent energy norm), energy balance, inverse-constant
// estimation, the stability (Garding-type) check, weak flux continuity,
// convergence studies, and surface-wave metrics.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "acoufem/assembly.hpp"
#include "acoufem/exact.hpp"
#include "acoufem/linsolve.hpp"

namespace acoufem {

// Nodal interpolation of f(x, y, side) onto the discrete space.
template <class F>
inline DiscreteField interpolate(const Discretization& disc, F&& f) {
  VectorC coeffs(disc.dofs.total());
  for (int side = 1; side <= 2; ++side) {
    const FeSpace& sp = disc.space(side);
    const int off = disc.dofs.offset(side);
    for (int d = 0; d < sp.num_dofs(); ++d) {
      const auto p = sp.dof_point(d);
      coeffs[off + d] = f(p[0], p[1], side);
    }
  }
  return DiscreteField(disc, std::move(coeffs));
}

struct ErrorReport {
  double err_l2 = 0.0;
  double err_triple = 0.0;
  double balance_residual = 0.0;
  double h = 0.0;
  int dofs = 0;
};

inline double mesh_size(const Discretization& disc) {
  const auto& m1 = disc.space1.mesh();
  const auto& m2 = disc.space2.mesh();
  return std::max(std::hypot(m1.hx(), m1.hy()), std::hypot(m2.hx(), m2.hy()));
}

namespace detail {

// Broken L2 and H1-seminorm parts of the error against the exact
// waveguide solution, integrated with a rule exact well past the basis
// order.
inline void volume_error(const DiscreteField& field, const WaveguideExact& exact,
                         double& l2_sq, double& h1_sq) {
  l2_sq = 0.0;
  h1_sq = 0.0;
  const auto& coeffs = field.coeffs();
  for (int side = 1; side <= 2; ++side) {
    const FeSpace& sp = field.disc().space(side);
    const int off = field.disc().dofs.offset(side);
    const auto rule = tensor_rule(gauss_legendre(sp.order() + 3));
    const auto gs = sp.gradient_scale();
    const double jac = sp.jacobian();
    std::array<int, QkBasis::max_size> dofs;
    std::array<double, QkBasis::max_size> values;
    std::array<std::array<double, 2>, QkBasis::max_size> grads;
    for (int ey = 0; ey < sp.mesh().ny; ++ey)
      for (int ex = 0; ex < sp.mesh().nx; ++ex) {
        sp.element_dofs(ex, ey, dofs);
        for (int q = 0; q < rule.size(); ++q) {
          sp.basis().eval(rule.points[q][0], rule.points[q][1], values, grads);
          const auto p = sp.to_physical(ex, ey, rule.points[q][0], rule.points[q][1]);
          Complex v = 0.0, gx = 0.0, gy = 0.0;
          for (int a = 0; a < sp.basis().size(); ++a) {
            const Complex c = coeffs[off + dofs[a]];
            v += c * values[a];
            gx += c * gs[0] * grads[a][0];
            gy += c * gs[1] * grads[a][1];
          }
          const Complex ev = v - exact.value(p[0], side);
          const Complex egx = gx - exact.dvalue(p[0], side);
          const Complex egy = gy;  // exact solution is x1-dependent only
          const double w = rule.weights[q] * jac;
          l2_sq += w * std::norm(ev);
          h1_sq += w * (std::norm(egx) + std::norm(egy));
        }
      }
  }
}

// Re( x^H S x ) for a real sparse form and complex coefficients.
inline double real_quadratic_form(const SparseMatrixD& S, const VectorC& x) {
  double acc = 0.0;
  for (int k = 0; k < S.outerSize(); ++k)
    for (SparseMatrixD::InnerIterator it(S, k); it; ++it)
      acc += it.value() * std::real(std::conj(x[it.row()]) * x[it.col()]);
  return acc;
}

// Bilinear (transpose, no conjugation) pairing u^T S v.
template <class Scalar>
inline Complex bilinear_form(const Eigen::SparseMatrix<Scalar>& S, const VectorC& u,
                             const VectorC& v) {
  Complex acc = 0.0;
  for (int k = 0; k < S.outerSize(); ++k)
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(S, k); it; ++it)
      acc += u[it.row()] * Complex(it.value()) * v[it.col()];
  return acc;
}

struct LsqFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LsqFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  LsqFit fit;
  const double den = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ymean = sy / n;
  for (int i = 0; i < n; ++i) {
    const double pred = fit.slope * x[i] + fit.intercept;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ymean) * (y[i] - ymean);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace detail

// Residual of the energy balance law: power in through the io boundary
// equals power out plus interface losses. Absolute value of LHS - RHS.
inline double balance_residual(const DiscreteField& field, const ProblemSpec& spec) {
  const Discretization& disc = field.disc();
  double lhs = 0.0, rhs = 0.0;
  const Quadrature1D rule = gauss_legendre(spec.order + 3);
  for (int side = 1; side <= 2; ++side) {
    const FeSpace& sp = disc.space(side);
    const auto& mesh = sp.mesh();
    for (int e = 0; e < 4; ++e) {
      const Edge edge = static_cast<Edge>(e);
      if (mesh.edge_tag(edge) != FacetTag::io) continue;
      const bool vert = (edge == Edge::left || edge == Edge::right);
      const double lo = vert ? mesh.domain.y_min : mesh.domain.x_min;
      const double len = vert ? mesh.domain.height() : mesh.domain.width();
      const Complex g = spec.inflow_on(side, edge);
      lhs += std::norm(g) * len;
      const double hf = vert ? mesh.hy() : mesh.hx();
      const int nf = vert ? mesh.ny : mesh.nx;
      for (int f = 0; f < nf; ++f)
        for (int q = 0; q < rule.size(); ++q) {
          const double t = lo + (f + 0.5 * (rule.points[q] + 1.0)) * hf;
          const double w = 0.5 * hf * rule.weights[q];
          const auto p = vert ? std::array<double, 2>{edge == Edge::left ? mesh.domain.x_min
                                                                         : mesh.domain.x_max,
                                                      t}
                              : std::array<double, 2>{t, edge == Edge::bottom
                                                             ? mesh.domain.y_min
                                                             : mesh.domain.y_max};
          rhs += w * std::norm(field.value(p[0], p[1], side) - g);
        }
    }
  }
  // Interface losses; the term vanishes where zeta = 0 (vanished interface).
  for (std::size_t s = 0; s < disc.pairing.segments.size(); ++s) {
    const Complex z = spec.zeta.at_segment(static_cast<int>(s));
    if (std::abs(z) < 1e-14) continue;
    const double re_inv = (1.0 / z).real();
    const auto& seg = disc.pairing.segments[s];
    for (int q = 0; q < rule.size(); ++q) {
      const double t = seg.midpoint() + 0.5 * seg.length() * rule.points[q];
      rhs += 0.5 * seg.length() * rule.weights[q] * re_inv * std::norm(field.interface_jump(t));
    }
  }
  return std::abs(lhs - rhs);
}

// Broken L2 error and the energy-norm error
//   |||e|||^2 = |e|_{H1}^2 + kappa^2 ||e||^2
//             + (1/gamma) int_Gamma h |{de/dn}|^2 + int_Gamma |lambda| |[[e]]|^2,
// using the same per-subsegment h and lambda as the assembled form.
inline ErrorReport error_norms(const DiscreteField& field, const WaveguideExact& exact,
                               const ProblemSpec& spec) {
  const Discretization& disc = field.disc();
  ErrorReport rep;
  rep.dofs = disc.dofs.total();
  rep.h = mesh_size(disc);

  double l2_sq = 0.0, h1_sq = 0.0;
  detail::volume_error(field, exact, l2_sq, h1_sq);
  rep.err_l2 = std::sqrt(l2_sq);

  const SegmentCoefficients coef = segment_coefficients(spec, disc.pairing);
  const Quadrature1D rule = gauss_legendre(spec.order + 3);
  double flux_term = 0.0, jump_term = 0.0;
  const auto n = disc.pairing.normal;
  for (std::size_t s = 0; s < disc.pairing.segments.size(); ++s) {
    const auto& seg = disc.pairing.segments[s];
    for (int q = 0; q < rule.size(); ++q) {
      const double t = seg.midpoint() + 0.5 * seg.length() * rule.points[q];
      const double w = 0.5 * seg.length() * rule.weights[q];
      const auto pt = disc.pairing.point(t);
      Complex g1[2], g2[2];
      const Complex v1 = field.value_and_gradient(pt[0], pt[1], 1, g1);
      const Complex v2 = field.value_and_gradient(pt[0], pt[1], 2, g2);
      const Complex jump_h = v1 - v2;
      const Complex avg_h = 0.5 * ((g1[0] + g2[0]) * n[0] + (g1[1] + g2[1]) * n[1]);
      const Complex jump_x = exact.value(pt[0], 1) - exact.value(pt[0], 2);
      const Complex avg_x =
          0.5 * (exact.dvalue(pt[0], 1) + exact.dvalue(pt[0], 2)) * n[0];
      flux_term += w * coef.h[s] * std::norm(avg_h - avg_x);
      jump_term += w * std::abs(coef.lambda[s]) * std::norm(jump_h - jump_x);
    }
  }
  rep.err_triple =
      std::sqrt(h1_sq + spec.kappa * spec.kappa * l2_sq + flux_term / spec.gamma + jump_term);
  rep.balance_residual = balance_residual(field, spec);
  return rep;
}

// L2 norm of the difference of two fields on the same discretization.
inline double l2_distance(const DiscreteField& a, const DiscreteField& b) {
  if (a.coeffs().size() != b.coeffs().size())
    throw std::invalid_argument("l2_distance: fields live on different discretizations");
  const SparseMatrixD M = mass_matrix(a.disc());
  const VectorC d = a.coeffs() - b.coeffs();
  return std::sqrt(detail::real_quadratic_form(M, d));
}

// Largest generalized eigenvalue of the h-weighted average-flux form
// against the broken stiffness, restricted to the complement of the
// gradient kernel (the per-subdomain constants). Requires a small mesh.
inline double estimate_inverse_constant(const Discretization& disc) {
  const int n = disc.dofs.total();
  if (n > 4000)
    throw std::invalid_argument("estimate_inverse_constant: mesh too large for a dense eigensolve");
  std::vector<double> hseg(disc.pairing.segments.size());
  for (std::size_t s = 0; s < hseg.size(); ++s)
    hseg[s] = 0.5 * (disc.pairing.segments[s].h1 + disc.pairing.segments[s].h2);

  const Eigen::MatrixXd K = Eigen::MatrixXd(stiffness_matrix(disc));
  const Eigen::MatrixXd B = Eigen::MatrixXd(interface_flux_mass(disc, hseg));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> kes(K);
  if (kes.info() != Eigen::Success)
    throw std::runtime_error("estimate_inverse_constant: stiffness eigensolve failed");
  const double kmax = kes.eigenvalues().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (kes.eigenvalues()[i] > 1e-10 * kmax) keep.push_back(i);
  Eigen::MatrixXd V(n, static_cast<int>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) V.col(static_cast<int>(c)) = kes.eigenvectors().col(keep[c]);

  const Eigen::MatrixXd Kp = V.transpose() * K * V;
  const Eigen::MatrixXd Bp = V.transpose() * B * V;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Bp, Kp);
  if (ges.info() != Eigen::Success)
    throw std::runtime_error("estimate_inverse_constant: generalized eigensolve failed");
  const double ci = ges.eigenvalues().maxCoeff();
  if (!(ci > 0.0)) throw std::runtime_error("estimate_inverse_constant: nonpositive estimate");
  return ci;
}

// Penalty 16 * C_I * 1.25, with C_I estimated on a coarsened copy of the
// discretization (uniform coarsening keeps the element aspect ratio).
inline double calibrate_gamma(const Discretization& disc) {
  StructuredQuadMesh m1 = disc.space1.mesh();
  StructuredQuadMesh m2 = disc.space2.mesh();
  const int order = disc.space1.order();
  auto dofs = [&]() {
    return (order * m1.nx + 1) * (order * m1.ny + 1) + (order * m2.nx + 1) * (order * m2.ny + 1);
  };
  while (dofs() > 1500 && (m1.nx > 1 || m1.ny > 1 || m2.nx > 1 || m2.ny > 1)) {
    m1.nx = std::max(1, m1.nx / 2);
    m1.ny = std::max(1, m1.ny / 2);
    m2.nx = std::max(1, m2.nx / 2);
    m2.ny = std::max(1, m2.ny / 2);
  }
  return 16.0 * 1.25 * estimate_inverse_constant(make_discretization(m1, m2, order));
}

struct GardingReport {
  bool ok = false;
  double min_ratio = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t failing_seed = 0;  // meaningful when !ok
};

// Randomized check of |a(p, conj p)| + 2*kappa*||Jp||_U^2 >= (1/4)|||p|||^2.
inline GardingReport garding_check(const ProblemSpec& spec, const Discretization& disc,
                                   int n_samples, std::uint64_t seed) {
  ProblemSpec nspec = spec;
  nspec.method = Method::nitsche;
  const ComplexSparseSystem sys = assemble_nitsche(nspec, disc);
  const SegmentCoefficients coef = segment_coefficients(nspec, disc.pairing);
  const int nseg = static_cast<int>(disc.pairing.segments.size());

  const SparseMatrixD K = stiffness_matrix(disc);
  const SparseMatrixD M = mass_matrix(disc);
  std::vector<double> habs(nseg), labs(nseg), wminus(nseg, 0.0);
  const double delta = spec.zeta.delta_zeta_minus(nseg);
  for (int s = 0; s < nseg; ++s) {
    habs[s] = coef.h[s];
    labs[s] = std::abs(coef.lambda[s]);
    if (coef.zeta[s].imag() < 0.0) wminus[s] = 1.0 / delta;
  }
  const SparseMatrixD Bh = interface_flux_mass(disc, habs);
  const SparseMatrixD Jl = interface_jump_mass(disc, labs);
  const bool has_minus = spec.zeta.has_negative_imag(nseg);
  const SparseMatrixD Jm = has_minus ? interface_jump_mass(disc, wminus) : SparseMatrixD();

  GardingReport rep;
  rep.seed = seed;
  rep.samples = n_samples;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.ok = true;
  const double kappa = spec.kappa;
  const int n = disc.dofs.total();
  for (int k = 0; k < n_samples; ++k) {
    const std::uint64_t sample_seed = seed + static_cast<std::uint64_t>(k);
    std::mt19937_64 rng(sample_seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    VectorC x(n);
    for (int i = 0; i < n; ++i) x[i] = Complex(dist(rng), dist(rng));

    // a(p, conj p) in the bilinear convention equals x^H A x.
    const Complex quad_a = (x.adjoint() * (sys.A * x))(0);
    const double m_form = detail::real_quadratic_form(M, x);
    double u_norm_sq = kappa * m_form;
    if (has_minus) u_norm_sq += detail::real_quadratic_form(Jm, x);
    const double lhs = std::abs(quad_a) + 2.0 * kappa * u_norm_sq;

    const double triple_sq = detail::real_quadratic_form(K, x) + kappa * kappa * m_form +
                             detail::real_quadratic_form(Bh, x) / spec.gamma +
                             detail::real_quadratic_form(Jl, x);
    const double rhs = 0.25 * triple_sq;
    const double ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
    if (ratio < rep.min_ratio) rep.min_ratio = ratio;
    if (ratio < 1.0 && rep.ok) {
      rep.ok = false;
      rep.failing_seed = sample_seed;
    }
  }
  return rep;
}

// Scaled max-residual of the assembled equations against a candidate
// coefficient vector (used with the interpolated exact solution).
inline double consistency_residual(const ComplexSparseSystem& sys, const VectorC& coeffs) {
  const VectorC r = sys.b - sys.A * coeffs;
  double col_scale = 0.0;
  for (int k = 0; k < sys.A.outerSize(); ++k) {
    double c = 0.0;
    for (SparseMatrixC::InnerIterator it(sys.A, k); it; ++it) c += std::norm(it.value());
    col_scale = std::max(col_scale, std::sqrt(c));
  }
  return r.cwiseAbs().maxCoeff() / col_scale;
}

// Max over probes of the weak flux-continuity functional
//   |(grad p, grad w) - kappa^2 (p, w) + i*kappa <(1/zeta)[[p]], [[w]]>| / ||w||_H1.
// Probes must be continuous across the interface and vanish on the outer
// boundary; they are injected by nodal interpolation.
inline double weak_flux_residual(const DiscreteField& field, const ProblemSpec& spec,
                                 const std::vector<std::function<double(double, double)>>& probes) {
  const Discretization& disc = field.disc();
  const SparseMatrixD K = stiffness_matrix(disc);
  const SparseMatrixD M = mass_matrix(disc);
  const int nseg = static_cast<int>(disc.pairing.segments.size());
  std::vector<Complex> zw(nseg, Complex(0.0));
  for (int s = 0; s < nseg; ++s) {
    const Complex z = spec.zeta.at_segment(s);
    if (std::abs(z) >= 1e-12) zw[s] = Complex(0.0, spec.kappa) / z;
  }
  const SparseMatrixC Jz = interface_form_matrix<Complex>(disc, zw, true);

  double worst = 0.0;
  for (const auto& probe : probes) {
    VectorC w(disc.dofs.total());
    for (int side = 1; side <= 2; ++side) {
      const FeSpace& sp = disc.space(side);
      const int off = disc.dofs.offset(side);
      for (int d = 0; d < sp.num_dofs(); ++d) {
        const auto p = sp.dof_point(d);
        w[off + d] = probe(p[0], p[1]);
      }
    }
    // Probe admissibility: vanishing trace on every outer (non-interface)
    // boundary DOF.
    for (int side = 1; side <= 2; ++side) {
      const FeSpace& sp = disc.space(side);
      const int off = disc.dofs.offset(side);
      const Edge iface = sp.mesh().interface_edge();
      for (int j = 0; j < sp.ndy(); ++j)
        for (int i = 0; i < sp.ndx(); ++i) {
          const bool on_left = (i == 0), on_right = (i == sp.ndx() - 1);
          const bool on_bottom = (j == 0), on_top = (j == sp.ndy() - 1);
          const bool outer = (on_left && iface != Edge::left) ||
                             (on_right && iface != Edge::right) ||
                             (on_bottom && iface != Edge::bottom) ||
                             (on_top && iface != Edge::top);
          if (outer && std::abs(w[off + sp.dof_index(i, j)]) > 1e-12)
            throw std::invalid_argument("weak_flux_residual: probe does not vanish on the outer boundary");
        }
    }
    const double h1 = std::sqrt(detail::real_quadratic_form(K, w) + detail::real_quadratic_form(M, w));
    const Complex val = detail::bilinear_form(K, w, field.coeffs()) -
                        spec.kappa * spec.kappa * detail::bilinear_form(M, w, field.coeffs()) +
                        detail::bilinear_form(Jz, w, field.coeffs());
    worst = std::max(worst, std::abs(val) / h1);
  }
  return worst;
}

// ---- Interface weight property suite -------------------------------------

struct LambdaPropertyReport {
  int samples = 0;
  int identity_violations = 0;
  int bound_violations = 0;          // any of the four bound families
  int sharper_minus_violations = 0;  // informational: |lambda| <= sqrt(2)*kappa/delta
  double max_identity_err = 0.0;
  bool ok() const { return identity_violations == 0 && bound_violations == 0; }
};

// Randomized admissible (zeta, kappa, h, gamma) samples: checks the
// identity 1 - lambda*zeta/(i*kappa) = (h/gamma)*lambda and the bounds
//   0 < |lambda| <= gamma/h,
//   |zeta/(i*kappa) * (1 - lambda*zeta/(i*kappa))| <= 2h/gamma,
//   |lambda| <= 2*kappa/delta  where Im(zeta) < 0 (delta = |zeta|),
//   Re(lambda) + Im(lambda) - |lambda|/2 >= |lambda|/2   (Im(zeta) >= 0)
//                                        >= -3*kappa/delta (Im(zeta) < 0).
// The identity error is measured relative to the largest term of the
// identity, which keeps the check meaningful when one side is dominated
// by cancellation.
inline LambdaPropertyReport lambda_property_suite(int n_samples, std::uint64_t seed) {
  LambdaPropertyReport rep;
  rep.samples = n_samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double slack = 1e-12;  // roundoff slack on mathematically strict bounds
  for (int k = 0; k < n_samples; ++k) {
    const double kappa = 0.5 + 99.5 * unit(rng);
    const double gamma = 1.0 + 63.0 * unit(rng);
    const double re_z = 5.0 * unit(rng);
    const double im_z = -5.0 + 10.0 * unit(rng);
    const Complex zeta(re_z, im_z);
    double h_max = 0.5;
    if (im_z < 0.0) {
      const double az = std::abs(zeta);
      if (az == 0.0) continue;  // inadmissible, resample
      h_max = std::min(h_max, gamma * az / (4.0 * kappa));
    }
    const double h = h_max * (1e-3 + (1.0 - 1e-3) * unit(rng));

    const Complex lambda = compute_lambda(zeta, kappa, h, gamma);
    const Complex zik = zeta / Complex(0.0, kappa);
    const Complex lhs = 1.0 - lambda * zik;
    const Complex rhs = (h / gamma) * lambda;
    const double scale = std::max(1.0, std::abs(lambda) * (h / gamma + std::abs(zeta) / kappa));
    const double ident_err = std::abs(lhs - rhs) / scale;
    rep.max_identity_err = std::max(rep.max_identity_err, ident_err);
    if (ident_err > 1e-14) ++rep.identity_violations;

    bool bound_bad = false;
    const double al = std::abs(lambda);
    if (!(al > 0.0) || al > gamma / h * (1.0 + slack)) bound_bad = true;
    if (std::abs(zik * lhs) > 2.0 * h / gamma * (1.0 + slack)) bound_bad = true;
    const double split = lambda.real() + lambda.imag() - 0.5 * al;
    if (im_z >= 0.0) {
      if (split < 0.5 * al * (1.0 - slack) - 1e-300) bound_bad = true;
    } else {
      const double delta = std::abs(zeta);
      if (al > 2.0 * kappa / delta * (1.0 + slack)) bound_bad = true;
      if (split < -3.0 * kappa / delta * (1.0 + slack)) bound_bad = true;
      if (al > std::sqrt(2.0) * kappa / delta * (1.0 + slack)) ++rep.sharper_minus_violations;
    }
    if (bound_bad) ++rep.bound_violations;
  }
  return rep;
}

// ---- Convergence studies ------------------------------------------------

struct ConvergenceLevel {
  int level = 0;
  double h = 0.0;
  int dofs = 0;
  double err_l2 = 0.0;
  double err_triple = 0.0;
  double balance = 0.0;
  double rate_l2 = 0.0;      // log2 ratio against the previous level
  double rate_triple = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceLevel> levels;
  double slope_l2 = 0.0;      // least-squares log-log slope, last 3 levels
  double slope_triple = 0.0;
};

struct StudySetup {
  Discretization base;
  ProblemSpec spec;   // gamma resolved by the caller
  int levels = 4;
};

inline ConvergenceTable convergence_study(const StudySetup& setup) {
  if (setup.levels < 4)
    throw std::invalid_argument("convergence_study: at least 4 refinement levels are required");
  const WaveguideExact exact(setup.spec.kappa, setup.spec.zeta.at_segment(0));
  ConvergenceTable table;
  for (int lvl = 0; lvl < setup.levels; ++lvl) {
    const Discretization disc = lvl == 0 ? setup.base : refine(setup.base, lvl);
    const ComplexSparseSystem sys = assemble(setup.spec, disc);
    const DiscreteField field = solve(sys, disc);
    const ErrorReport rep = error_norms(field, exact, setup.spec);
    ConvergenceLevel row;
    row.level = lvl;
    row.h = rep.h;
    row.dofs = rep.dofs;
    row.err_l2 = rep.err_l2;
    row.err_triple = rep.err_triple;
    row.balance = rep.balance_residual;
    if (lvl > 0) {
      row.rate_l2 = std::log2(table.levels.back().err_l2 / row.err_l2);
      row.rate_triple = std::log2(table.levels.back().err_triple / row.err_triple);
    }
    table.levels.push_back(row);
  }
  std::vector<double> lh, ll2, ltr;
  for (std::size_t i = table.levels.size() - 3; i < table.levels.size(); ++i) {
    lh.push_back(std::log(table.levels[i].h));
    ll2.push_back(std::log(table.levels[i].err_l2));
    ltr.push_back(std::log(table.levels[i].err_triple));
  }
  table.slope_l2 = detail::least_squares(lh, ll2).slope;
  table.slope_triple = detail::least_squares(lh, ltr).slope;
  return table;
}

inline void write_convergence_csv(const ConvergenceTable& table, std::ostream& os) {
  os << "level,h,dofs,err_L2,err_triple,rate_L2,rate_triple,balance_residual\n";
  os.precision(12);
  for (const auto& row : table.levels)
    os << row.level << ',' << row.h << ',' << row.dofs << ',' << row.err_l2 << ','
       << row.err_triple << ',' << row.rate_l2 << ',' << row.rate_triple << ','
       << row.balance << '\n';
}

// ---- Surface-wave metrics ----------------------------------------------

struct SurfaceWaveMetrics {
  bool decay_fit_ok = false;
  double decay_length = std::numeric_limits<double>::quiet_NaN();
  double fit_r2 = 0.0;
  bool wavelength_defined = false;
  double wavelength = std::numeric_limits<double>::quiet_NaN();
  int zero_crossings = 0;
};

// Fits the decay of max over interface-parallel lines of the antisymmetric
// component (half the difference of the field mirrored across the
// interface) to an exponential, and measures the interface wavelength as
// twice the mean zero-crossing spacing of Re [[p]]. Working with the jump
// and the antisymmetric part isolates the interface-guided wave from the
// continuous duct field, which would otherwise dominate the traces.
inline SurfaceWaveMetrics surface_wave_metrics(const DiscreteField& field) {
  const Discretization& disc = field.disc();
  const InterfacePairing& pairing = disc.pairing;
  SurfaceWaveMetrics met;

  const int n_t = 1600;
  const double t0 = pairing.lo + 1e-9 * pairing.length();
  const double dt = (pairing.length() - 2e-9 * pairing.length()) / (n_t - 1);

  // Zero crossings of Re [[p]] along the interface.
  {
    std::vector<double> crossings;
    double prev_t = t0;
    double prev_v = std::real(field.interface_jump(t0));
    for (int i = 1; i < n_t; ++i) {
      const double t = t0 + i * dt;
      const double v = std::real(field.interface_jump(t));
      if ((prev_v < 0.0 && v >= 0.0) || (prev_v > 0.0 && v <= 0.0)) {
        const double frac = prev_v / (prev_v - v);
        crossings.push_back(prev_t + frac * (t - prev_t));
      }
      prev_t = t;
      prev_v = v;
    }
    met.zero_crossings = static_cast<int>(crossings.size());
    if (crossings.size() >= 4) {
      met.wavelength_defined = true;
      met.wavelength = 2.0 * (crossings.back() - crossings.front()) / (crossings.size() - 1);
    }
  }

  // Decay profile of the antisymmetric component, limited to the depth
  // available on both sides.
  {
    const auto& dom1 = disc.space1.mesh().domain;
    const auto& dom2 = disc.space2.mesh().domain;
    const double depth1 = pairing.vertical ? dom1.width() : dom1.height();
    const double depth2 = pairing.vertical ? dom2.width() : dom2.height();
    const double dmax = 0.9 * std::min(depth1, depth2);
    const int n_d = 80;
    std::vector<double> dist(n_d), profile(n_d);
    for (int j = 0; j < n_d; ++j) {
      const double d = dmax * j / (n_d - 1);
      double mx = 0.0;
      for (int i = 0; i < n_t; ++i) {
        const double t = t0 + i * dt;
        const auto p0 = pairing.point(t);
        const Complex below = field.value(p0[0] - d * pairing.normal[0],
                                          p0[1] - d * pairing.normal[1], 1);
        const Complex above = field.value(p0[0] + d * pairing.normal[0],
                                          p0[1] + d * pairing.normal[1], 2);
        mx = std::max(mx, 0.5 * std::abs(below - above));
      }
      dist[j] = d;
      profile[j] = mx;
    }
    const double m0 = profile[0];
    const double floor_level =
        *std::min_element(profile.begin(), profile.end());
    // Fit over the initial stretch where the profile is still clearly
    // above both the e^-2 level and the background floor.
    const double cutoff = std::max(m0 * std::exp(-2.0), 2.0 * floor_level);
    int jc = n_d;
    for (int j = 0; j < n_d; ++j)
      if (profile[j] < cutoff) {
        jc = j;
        break;
      }
    if (jc >= 4 && m0 > 0.0) {
      std::vector<double> xs, ys;
      for (int j = 0; j < jc; ++j) {
        xs.push_back(dist[j]);
        ys.push_back(std::log(profile[j]));
      }
      const detail::LsqFit fit = detail::least_squares(xs, ys);
      met.fit_r2 = fit.r2;
      if (fit.slope < 0.0 && fit.r2 >= 0.97) {
        met.decay_fit_ok = true;
        met.decay_length = -1.0 / fit.slope;
      }
    }
  }
  return met;
}

}  // namespace acoufem
