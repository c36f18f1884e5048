#pragma once

// Closed-form solution for the plane-wave waveguide with a vertical
// impedance interface at x1 = 0: an incoming unit wave from the left, a
// partially reflected wave, and a transmitted wave with transmission
// coefficient 2/(2 + zeta).

#include <complex>
#include <stdexcept>

#include "acoufem/impedance.hpp"

namespace acoufem {

class WaveguideExact {
 public:
  WaveguideExact(double kappa, Complex zeta) : kappa_(kappa), zeta_(zeta) {
    if (!(kappa > 0.0)) throw std::invalid_argument("WaveguideExact: kappa must be > 0");
    if (std::abs(zeta + 2.0) < 1e-14)
      throw std::invalid_argument("WaveguideExact: zeta = -2 is a pole of the transmission coefficient");
  }

  double kappa() const { return kappa_; }
  Complex zeta() const { return zeta_; }

  // side 1: x1 in [-1, 0]; side 2: x1 in [0, 1]. The value depends on x1
  // only (plane wave across the strip).
  Complex value(double x1, int side) const {
    const Complex i(0.0, 1.0);
    if (side == 1)
      return std::exp(-i * kappa_ * (x1 + 1.0)) +
             zeta_ / (2.0 + zeta_) * std::exp(i * kappa_ * (x1 - 1.0));
    return 2.0 / (2.0 + zeta_) * std::exp(-i * kappa_ * (x1 + 1.0));
  }

  // d/dx1 of the branch value.
  Complex dvalue(double x1, int side) const {
    const Complex i(0.0, 1.0);
    if (side == 1)
      return -i * kappa_ * std::exp(-i * kappa_ * (x1 + 1.0)) +
             i * kappa_ * zeta_ / (2.0 + zeta_) * std::exp(i * kappa_ * (x1 - 1.0));
    return -i * kappa_ * 2.0 / (2.0 + zeta_) * std::exp(-i * kappa_ * (x1 + 1.0));
  }

  Complex jump_at_interface() const { return value(0.0, 1) - value(0.0, 2); }

  // Residual of the transmission condition (i*kappa/zeta)[[p]] + {dp/dn}
  // at the interface; identically zero for zeta != 0.
  Complex transmission_residual() const {
    if (std::abs(zeta_) == 0.0) return jump_at_interface();  // reduces to [[p]] = 0
    const Complex i(0.0, 1.0);
    const Complex avg_flux = 0.5 * (dvalue(0.0, 1) + dvalue(0.0, 2));
    return i * kappa_ / zeta_ * jump_at_interface() + avg_flux;
  }

 private:
  double kappa_;
  Complex zeta_;
};

}  // namespace acoufem
