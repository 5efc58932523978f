#pragma once

// hillwave: characteristic exponents of Hill's equation in the Mathieu case,
//   psi'' + (a - 2 q cos 2z) psi = 0,
// through the infinite tridiagonal (Hill) determinant.  The library computes
// the determinant three independent ways (direct finite sections, a
// third-order stepping recursion with O(1) cost per index, and an explicit
// closed-form solver for general three-term-history recursions), converts it
// to the exponent through sin^2(pi nu / 2) = Delta * sin^2(pi sqrt(a) / 2),
// and cross-checks everything against a direct Floquet ODE oracle.

#include "coefficients.hpp"
#include "errors.hpp"
#include "floquet.hpp"
#include "fourier.hpp"
#include "hill_determinant.hpp"
#include "params.hpp"
#include "recursion.hpp"
#include "tridiagonal.hpp"
#include "verify.hpp"
#include "whittaker_hill.hpp"
