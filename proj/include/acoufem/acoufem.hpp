#pragma once

// Umbrella header for the acoufem library: a 2D finite element solver for
// the Helmholtz equation with an acoustically permeable interface.

#include "acoufem/assembly.hpp"
#include "acoufem/basis.hpp"
#include "acoufem/discretization.hpp"
#include "acoufem/exact.hpp"
#include "acoufem/fespace.hpp"
#include "acoufem/impedance.hpp"
#include "acoufem/linsolve.hpp"
#include "acoufem/mesh.hpp"
#include "acoufem/problem.hpp"
#include "acoufem/quadrature.hpp"
#include "acoufem/verify.hpp"
