#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ylab/operator_model.hpp"

namespace ylab {

enum class Scheme { matrix_exponential, yosida_limit, crandall_liggett };

std::string to_string(Scheme scheme, int steps = 0);

/// T(t) as a matrix in the model's norm, tagged with the scheme that produced it.
struct Propagator {
  Matrix matrix;
  Scheme scheme = Scheme::matrix_exponential;
  NormKind norm_kind = NormKind::euclidean;
};

/// Yosida levels used for unbounded generators.
inline constexpr double kYosidaLevels[3] = {256.0, 512.0, 1024.0};

/// Bounded models: e^{tA}. Delay models: e^{tA_mu} at mu = 2^8, 2^9, 2^10
/// extrapolated to mu = infinity (error expansion in 1/mu, ratio 1/2 per level).
Propagator propagator(const OperatorModel& op, double t);

/// T(k h) for k = 0..count-1, sharing one exponential per Yosida level.
std::vector<Propagator> propagator_series(const OperatorModel& op, double h, int count);

/// e^{t A_mu} for a single level.
Matrix yosida_semigroup(const OperatorModel& op, double t, double mu);

/// T(t) x. Throws NonConvergentYosidaLimit when the last two Yosida levels
/// differ by more than 1e-3 in sup norm.
VectorState evolve_linear(const OperatorModel& op, double t, const VectorState& x);

/// T(1) as a dense model.
OperatorModel time_one_map(const OperatorModel& op);

struct GrowthEnvelope {
  double M = 1;
  double omega = 0;
  std::vector<double> t_samples;
  std::vector<double> norms;  // ||T(t)|| at t_samples
  double sup_residual = 0;    // max_t ||T(t)|| - M e^{omega t}  (<= 0)
};

/// ||T(t)|| <= M e^{omega t} on [0, t_max]. omega is max(0, spectral abscissa)
/// of the (Yosida-approximated) generator; M is the smallest multiple of 1e-2
/// dominating the samples.
GrowthEnvelope growth_envelope(const OperatorModel& op, double t_max, int samples = 64);

/// Largest value of ||T(t)|| / (M e^{omega t}) on a fresh grid of `samples` points.
double envelope_violation(const OperatorModel& op, const GrowthEnvelope& env, double t_max, int samples = 128);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<VectorState> states;
  Scheme scheme = Scheme::matrix_exponential;
  int steps = 0;
  double doubling_error = 0;  // crandall_liggett only: ||S_n(t)x - S_2n(t)x||
};

struct ClosenessReport {
  double lhs = 0;
  double rhs = 0;
  bool pass = false;
  double M = 1;
  double omega = 0;
  double d_yosida = 0;
  double t = 0;
};

/// ||T(t) - S(t)|| <= t M^2 e^{4 omega t} d_Y(A, B) with the pointwise-max
/// envelope of both semigroups on [0, t].
ClosenessReport closeness_bound_check(const OperatorModel& a, const OperatorModel& b, double t);

using MatrixPath = std::function<Matrix(double)>;

struct NonautonomousReport {
  double deviation = 0;
  double bound = 0;
  bool pass = false;
  double M = 1;
  double omega = 0;
  double sup_difference = 0;
  double richardson_error = 0;
};

/// Integrates x' = A(t) x and y' = B(t) y from w over [0, 1] with RK4 and
/// compares max_t ||x - y|| with M e^{2 omega} sup ||A - B|| ||w||.
/// M = 1 and omega = max(0, sup logarithmic norm) bound both propagators.
NonautonomousReport nonautonomous_compare(const MatrixPath& a_path, const MatrixPath& b_path, const Vector& w,
                                          double step = 1e-4);

}  // namespace ylab
