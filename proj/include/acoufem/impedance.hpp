#pragma once

// Normalized transmission impedance zeta on the interface: a complex
// constant, a per-subsegment table, or a mass-spring-damper surface model
// zeta = (d + i(m*omega - k/omega)) / (rho*c).

#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "acoufem/mesh.hpp"

namespace acoufem {

using Complex = std::complex<double>;

class ImpedanceField {
 public:
  enum class Kind { constant, piecewise, mass_spring_damper };

  ImpedanceField() : kind_(Kind::constant), value_(0.0) {}

  static ImpedanceField constant(Complex z) {
    if (z.real() < 0.0)
      throw std::invalid_argument("impedance: Re(zeta) must be >= 0 (passive surface)");
    ImpedanceField f;
    f.kind_ = Kind::constant;
    f.value_ = z;
    return f;
  }

  static ImpedanceField piecewise(std::vector<Complex> per_segment) {
    if (per_segment.empty())
      throw std::invalid_argument("impedance: empty per-segment table");
    for (const auto& z : per_segment)
      if (z.real() < 0.0)
        throw std::invalid_argument("impedance: Re(zeta) must be >= 0 (passive surface)");
    ImpedanceField f;
    f.kind_ = Kind::piecewise;
    f.table_ = std::move(per_segment);
    return f;
  }

  static ImpedanceField mass_spring_damper(double mass, double damping, double spring,
                                           double rho, double c, double omega) {
    if (damping < 0.0)
      throw std::invalid_argument("impedance: damping must be >= 0 (passive surface)");
    if (rho <= 0.0 || c <= 0.0 || omega <= 0.0)
      throw std::invalid_argument("impedance: rho, c, omega must be positive");
    ImpedanceField f;
    f.kind_ = Kind::mass_spring_damper;
    f.value_ = Complex(damping, mass * omega - spring / omega) / (rho * c);
    return f;
  }

  Kind kind() const { return kind_; }

  // Value on subsegment `seg` (evaluated at its midpoint; constant per
  // subsegment by construction).
  Complex at_segment(int seg) const {
    if (kind_ == Kind::piecewise) {
      if (seg < 0 || seg >= static_cast<int>(table_.size()))
        throw std::out_of_range("impedance: segment index outside table");
      return table_[seg];
    }
    return value_;
  }

  int table_size() const { return static_cast<int>(table_.size()); }

  // ess-inf |zeta| over the subsegments where Im(zeta) < 0; +inf if that
  // set is empty.
  double delta_zeta_minus(int num_segments) const {
    double d = std::numeric_limits<double>::infinity();
    for (int s = 0; s < num_segments; ++s) {
      const Complex z = at_segment(s);
      if (z.imag() < 0.0) d = std::min(d, std::abs(z));
    }
    return d;
  }

  bool has_negative_imag(int num_segments) const {
    for (int s = 0; s < num_segments; ++s)
      if (at_segment(s).imag() < 0.0) return true;
    return false;
  }

  double min_abs(int num_segments) const {
    double m = std::numeric_limits<double>::infinity();
    for (int s = 0; s < num_segments; ++s) m = std::min(m, std::abs(at_segment(s)));
    return m;
  }

 private:
  Kind kind_;
  Complex value_{};
  std::vector<Complex> table_;
};

}  // namespace acoufem
