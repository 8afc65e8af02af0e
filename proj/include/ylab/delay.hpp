#pragma once

#include "ylab/operator_model.hpp"

namespace ylab {

/// Uniform grid t_j = -1 + j / n, j = 0..n.
Vector delay_grid(int grid_size);

/// Fourth-order differentiation of sampled phi on [-1,0): rows 0..n-1 hold
/// phi'(t_j); the last row holds a * phi(-1).
Matrix delay_generator_matrix(double a, int grid_size);

/// ((lambda I - A_a)^{-1} psi)(t_j) from the explicit resolvent formula.
///
/// The formula is rearranged so that every exponential has a non-positive
/// exponent:
///
///   x(t) = int_t^0 e^{-lambda (s-t)} psi(s) ds
///        + e^{lambda t} (a J + psi(0)) / (lambda - a e^{-lambda}),
///   J    = int_{-1}^0 e^{-lambda (1+s)} psi(s) ds,
///
/// and the integrals are evaluated exactly for the local cubic interpolant
/// of psi (four nearest nodes per cell). Cubic polynomials are therefore
/// reproduced to rounding error for any lambda > 0.
Vector delay_resolvent(double a, double lambda, const Vector& psi);
VectorState delay_resolvent(double a, double lambda, const VectorState& psi);

/// Column-by-column materialization of delay_resolvent.
Matrix delay_resolvent_matrix(double a, double lambda, int grid_size);

}  // namespace ylab
