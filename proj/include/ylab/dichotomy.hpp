#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ylab/operator_model.hpp"

namespace ylab {

/// Projection onto the stable part of a hyperbolic time-1 map together with
/// the dichotomy constants. N and beta are fitted from powers T(1)^k, k <= 8.
struct DichotomySplit {
  Matrix projection;      // P, onto the span of eigenvectors with |z| < 1
  double N = 1;           // dichotomy prefactor (empirical)
  double beta = 0;        // dichotomy rate (empirical)
  double inner_radius = 0;  // largest stable modulus
  double outer_radius = std::numeric_limits<double>::infinity();  // smallest unstable modulus
  int stable_dim = 0;
  Matrix stable_basis;    // orthonormal columns spanning Im(P)
  Matrix unstable_basis;  // orthonormal columns spanning Ker(P)
  double condition = 1;   // ||P||
};

/// Complex Schur form A = U T U^* with the selected eigenvalues leading the
/// diagonal of T.
struct OrderedSchur {
  ComplexMatrix T;
  ComplexMatrix U;
  int selected = 0;
};

OrderedSchur ordered_schur(const Matrix& a, const std::function<bool(const Complex&)>& select);

/// True iff every eigenvalue modulus differs from 1 by more than gap_tol.
bool check_hyperbolic(const OperatorModel& t1, double gap_tol = 1e-6);

/// Riesz projection and dichotomy constants of a hyperbolic time-1 map.
DichotomySplit spectral_split(const OperatorModel& t1, double gap_tol = 1e-6);

/// (1 / 2 pi i) \oint_{|z| = radius} (z - T)^{-1} dz by the trapezoid rule.
Matrix riesz_projection_contour(const Matrix& t1, double radius, int nodes = 64);

struct RoughnessRow {
  double eps = 0;
  double d_yosida = 0;
  bool hyperbolic = false;
  double gap_inner = 0;
  double gap_outer = std::numeric_limits<double>::infinity();
  int stable_dim = 0;
};

struct RoughnessReport {
  std::vector<RoughnessRow> rows;  // in eps_list order
  int persistent_prefix = 0;       // number of leading hyperbolic rows
  double eps_star = 0;             // eps of the last row in that prefix
  bool persistent = false;         // the prefix is nonempty
};

/// B = A + eps * direction for each eps: records d_Y(A, B), hyperbolicity and
/// the spectral gap of B's time-1 map.
RoughnessReport roughness_sweep(const OperatorModel& a, const OperatorModel& direction,
                                const std::vector<double>& eps_list, double gap_tol = 1e-6);

std::string roughness_csv(const RoughnessReport& report);

}  // namespace ylab
