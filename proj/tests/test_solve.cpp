#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "helpers.hpp"

using namespace acoufem;
using Catch::Approx;

TEST_CASE("zero load solves to the zero field") {
  const auto disc = testutil::waveguide(4, 2, 2);
  ProblemSpec spec = testutil::waveguide_spec(5.0, Complex(1.0, 1.0), 16.0);
  spec.order = 2;
  spec.inflow.clear();
  const DiscreteField f = solve(assemble(spec, disc), disc);
  CHECK(f.coeffs().norm() == 0.0);
}

TEST_CASE("solver residual meets the advertised tolerance") {
  const auto disc = testutil::waveguide(8, 2, 2, 12, 3);
  const ProblemSpec spec = testutil::waveguide_spec(10.0, Complex(0.21, 0.10), 40.0,
                                                    Method::nitsche, 2);
  const ComplexSparseSystem sys = assemble(spec, disc);
  const DiscreteField f = solve(sys, disc);
  const double rel = (sys.b - sys.A * f.coeffs()).norm() / sys.b.norm();
  CHECK(rel <= 1e-10);
}

TEST_CASE("sparse solution matches a dense full-pivot factorization") {
  const auto disc = testutil::waveguide(8, 1, 1);
  for (Method m : {Method::nitsche, Method::standard}) {
    const ProblemSpec spec = testutil::waveguide_spec(5.0, Complex(0.5, 0.2), 16.0, m);
    const ComplexSparseSystem sys = assemble(spec, disc);
    const DiscreteField f = solve(sys, disc);
    const Eigen::MatrixXcd Ad = Eigen::MatrixXcd(sys.A);
    const Eigen::VectorXcd xd = Ad.fullPivLu().solve(sys.b);
    CHECK((f.coeffs() - xd).norm() <= 1e-12 * xd.norm());
  }
}

TEST_CASE("field evaluation reproduces nodal coefficients and constants") {
  const auto disc = testutil::waveguide(5, 2, 3);
  // Constant function: exactly representable for every order.
  const DiscreteField one = interpolate(disc, [](double, double, int) { return Complex(1.0, -2.0); });
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.0, 0.1);
  for (int t = 0; t < 100; ++t) {
    const double x = ux(rng), y = uy(rng);
    const int side = x <= 0.0 ? 1 : 2;
    const Complex v = one.value(x, y, side);
    CHECK(v.real() == Approx(1.0).epsilon(1e-12));
    CHECK(v.imag() == Approx(-2.0).epsilon(1e-12));
  }

  // Nodal evaluation returns the coefficient itself.
  const FeSpace& sp = disc.space2;
  const int off = disc.dofs.offset(2);
  VectorC coeffs = VectorC::Zero(disc.dofs.total());
  std::uniform_real_distribution<double> uc(-1.0, 1.0);
  for (int d = 0; d < disc.dofs.total(); ++d) coeffs[d] = Complex(uc(rng), uc(rng));
  const DiscreteField f(disc, coeffs);
  for (int d = 0; d < sp.num_dofs(); d += 17) {
    const auto p = sp.dof_point(d);
    // Interior nodal points only: on inter-element lines evaluation picks
    // one element, which is fine since the space is continuous per side.
    const Complex v = f.value(p[0], p[1], 2);
    CHECK(std::abs(v - coeffs[off + d]) <= 1e-11);
  }

  CHECK_THROWS_AS(f.value(-0.5, 0.05, 2), std::invalid_argument);
}

TEST_CASE("interface points have two one-sided traces") {
  const auto disc = testutil::waveguide(4, 2, 1);
  const DiscreteField f = interpolate(disc, [](double x, double, int side) {
    return side == 1 ? Complex(2.0 + x, 0.0) : Complex(-1.0 + x, 0.0);
  });
  const double t = 0.033;
  CHECK(f.value(0.0, t, 1).real() == Approx(2.0).margin(1e-12));
  CHECK(f.value(0.0, t, 2).real() == Approx(-1.0).margin(1e-12));
  CHECK(f.interface_jump(t).real() == Approx(3.0).margin(1e-12));
}

TEST_CASE("gradients of an interpolated polynomial are exact") {
  const auto disc = testutil::waveguide(3, 2, 2);
  const DiscreteField f = interpolate(disc, [](double x, double y, int) {
    return Complex(x * x + 2.0 * x * y, 3.0 * y * y);
  });
  Complex grad[2];
  const Complex v = f.value_and_gradient(-0.37, 0.06, 1, grad);
  CHECK(v.real() == Approx(-0.37 * -0.37 + 2.0 * -0.37 * 0.06).margin(1e-12));
  CHECK(grad[0].real() == Approx(2.0 * -0.37 + 2.0 * 0.06).margin(1e-10));
  CHECK(grad[1].real() == Approx(2.0 * -0.37).margin(1e-10));
  CHECK(grad[1].imag() == Approx(6.0 * 0.06).margin(1e-10));
}
