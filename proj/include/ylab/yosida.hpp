#pragma once

#include <cstdint>
#include <vector>

#include "ylab/operator_model.hpp"

namespace ylab {

/// Grid-based estimate of limsup_{mu -> inf} ||A_mu - B_mu||.
struct YosidaEstimate {
  std::vector<double> mu_grid;
  std::vector<double> norm_values;
  double estimate = 0;   // extrapolated limit, or tail_sup when extrapolation is unusable
  double tail_sup = 0;   // max over the last quartile of the grid
  bool plateau_detected = false;
};

/// mu_k = mu0 * factor^k, k = 0..count-1. Defaults: 16 * 2^k, 20 points.
std::vector<double> geometric_grid(double mu0 = 16.0, double factor = 2.0, int count = 20);

/// A_mu = mu^2 R(mu, A) - mu I as a dense model (sup norm for delay models).
/// Bounded models use the equivalent mu A R(mu, A), which avoids the
/// cancellation of the two O(mu) terms.
OperatorModel yosida_approx(const OperatorModel& op, double mu);

/// A_mu - B_mu. Two delay models are differenced through their resolvents,
/// mu^2 (R(mu,A) - R(mu,B)), so A itself is never formed.
Matrix yosida_difference(const OperatorModel& a, const OperatorModel& b, double mu);

YosidaEstimate yosida_distance(const OperatorModel& a, const OperatorModel& b,
                               const std::vector<double>& grid = geometric_grid());

/// Tail statistics and extrapolation for a precomputed mu-grid of norms.
YosidaEstimate summarize_yosida_grid(std::vector<double> grid, std::vector<double> values);

/// The same limsup through implicit resolvents J_lambda = (I - lambda A)^{-1}:
/// values are (1/lambda) ||J^A_lambda - J^B_lambda|| at lambda = 1/mu.
YosidaEstimate resolvent_form_distance(const OperatorModel& a, const OperatorModel& b,
                                       const std::vector<double>& grid = geometric_grid());

/// J_lambda = (I - lambda A)^{-1} for a linear model.
Matrix implicit_resolvent_matrix(const OperatorModel& op, double lambda);

/// ||A - B|| for bounded A, B: the exact Yosida distance of bounded operators.
double bounded_oracle_distance(const OperatorModel& a, const OperatorModel& b);

struct BoundCheckReport {
  double d_estimate = 0;
  double bound = 0;
  bool pass = false;
  double margin = 0;  // bound - d_estimate
  double M = 1;
  double omega = 0;
  double K = 0;  // only for the relative bound
};

/// d_Y(A, A + C) <= M^2 ||C||, with M from the growth envelope of A on [0, t_max].
BoundCheckReport bounded_perturbation_bound_check(const OperatorModel& a, const OperatorModel& c,
                                                  double t_max = 1.0);

/// d_Y(A, A + C) <= coef_a K M + coef_c M^2 for C = coef_a A D + coef_c D, D a
/// diagonal contraction. K = sup over the grid of mu ||A R(mu, A)||.
BoundCheckReport relative_bound_check(const OperatorModel& a, double coef_a, double coef_c,
                                      const Vector& contraction, double t_max = 1.0);

/// Same with D drawn uniformly from [-1, 1]^n using the seed.
BoundCheckReport relative_bound_check(const OperatorModel& a, double coef_a, double coef_c,
                                      std::uint64_t seed, double t_max = 1.0);

}  // namespace ylab
