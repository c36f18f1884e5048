#pragma once

// Problem description: wave number, Nitsche penalty, inflow data on the
// io boundary parts, interface impedance, method selector, element order.

#include <complex>
#include <map>
#include <stdexcept>
#include <utility>

#include "acoufem/impedance.hpp"
#include "acoufem/mesh.hpp"

namespace acoufem {

enum class Method { nitsche, standard };

inline const char* to_string(Method m) {
  return m == Method::nitsche ? "nitsche" : "standard";
}

struct ProblemSpec {
  double kappa = 1.0;
  double gamma = 0.0;  // must be set (> 0) before assembly
  int order = 1;
  Method method = Method::nitsche;
  ImpedanceField zeta;
  // Inflow data g per io-tagged edge, keyed by (side_id, Edge).
  std::map<std::pair<int, Edge>, Complex> inflow;

  Complex inflow_on(int side, Edge edge) const {
    const auto it = inflow.find({side, edge});
    return it == inflow.end() ? Complex(0.0) : it->second;
  }

  void validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("ProblemSpec: kappa must be > 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("ProblemSpec: gamma must be > 0");
    if (order < 1 || order > 3)
      throw std::invalid_argument("ProblemSpec: order must be in {1, 2, 3}");
  }
};

}  // namespace acoufem
