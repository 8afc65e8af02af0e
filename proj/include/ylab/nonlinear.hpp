#pragma once

#include <cstdint>
#include <vector>

#include "ylab/operator_model.hpp"
#include "ylab/semigroup.hpp"
#include "ylab/yosida.hpp"

namespace ylab {

/// A(x) = L x + F(x) with bounded L, read from a semilinear or bounded model.
struct SemilinearSystem {
  Matrix linear;
  NonlinearMap nonlinearity;

  static SemilinearSystem from(const OperatorModel& op);

  Eigen::Index dimension() const { return linear.rows(); }
  Vector operator()(const Vector& x) const { return linear * x + nonlinearity(x); }
  Matrix jacobian(const Vector& x) const { return linear + nonlinearity.jacobian(x); }
};

struct ResolventSolve {
  Vector x;
  double residual = 0;
  int iterations = 0;
  bool converged = false;
};

/// Solves x - lambda A(x) = y by damped Newton (residual <= 1e-12 (1 + ||y||),
/// at most 50 iterations, step halving on the residual norm). Never throws on
/// divergence; the best iterate is returned with converged = false.
ResolventSolve solve_nonlinear_resolvent(const SemilinearSystem& sys, double lambda, const Vector& y);

/// J_lambda y = (I - lambda A)^{-1} y. Throws NewtonDiverged / JacobianSingular.
Vector nonlinear_resolvent(const SemilinearSystem& sys, double lambda, const Vector& y);
VectorState nonlinear_resolvent(const OperatorModel& a, double lambda, const VectorState& y);

struct AccretivityCertificate {
  double omega = 0;
  std::vector<double> lambda_grid;
  int sample_pairs = 0;
  double worst_ratio = 0;                // max ||J x - J y|| / ||x - y|| over all lambda and pairs
  std::vector<double> worst_by_lambda;   // the same per grid lambda
  int failures = 0;                      // Newton failures and bound violations
  bool pass = false;
};

/// Sampled evidence that ||J_lambda x - J_lambda y|| <= ||x - y|| / (1 - lambda omega).
AccretivityCertificate accretivity_certificate(const OperatorModel& a, double omega, int n_samples, double radius,
                                               std::uint64_t seed,
                                               std::vector<double> lambda_grid = {0.01, 0.05, 0.1, 0.2});

/// Value and derivative of x -> (J_{t/n})^n x.
struct FlowEvaluation {
  Vector value;
  Matrix jacobian;  // empty unless requested
};

FlowEvaluation crandall_liggett_flow(const SemilinearSystem& sys, double t, int n, const Vector& x,
                                     bool with_jacobian = false);

/// (J_{t/n})^n x with every intermediate state and the doubling estimate
/// ||S_n(t) x - S_{2n}(t) x||.
TrajectoryRecord crandall_liggett_evolve(const OperatorModel& a, double t, int n, const VectorState& x);

/// F0(x) = F(x) on ||x|| <= r0 and F(r0 x / ||x||) outside.
NonlinearMap radial_truncation(const NonlinearMap& f, double r0);

struct ProtoDerivativeRecord {
  VectorState base_point;
  OperatorModel linearization;  // L + F'(x)
  YosidaEstimate dY_to_origin;  // against L + F'(0)
};

ProtoDerivativeRecord semilinear_proto_derivative(const OperatorModel& l, const NonlinearMap& f, const VectorState& x);

/// Distances between difference-quotient graphs and the graph of F'(x) on
/// probe directions, one value per quotient step (1e-2, 1e-3, 1e-4, 1e-5).
std::vector<double> proto_graph_convergence(const NonlinearMap& f, const Vector& x, int probes = 8,
                                            std::uint64_t seed = 1);

/// Sampled sup of d_Y(dA(x), dA(0)) over ||x|| <= r. Points lie on a fixed
/// polar lattice (seeded directions, radii on a quarter-octave ladder anchored
/// at the truncation radius or 1), so the sample set for r contains the one
/// for every smaller r and the result is nondecreasing in r.
double proto_continuity_modulus(const OperatorModel& system, double r, int n_samples, std::uint64_t seed);

/// phi(t) x = S(t) x - T(t) x, both sides by the n-step Crandall-Liggett scheme
/// (T from the linearization at 0).
VectorState phi_difference(const OperatorModel& system, double t, const VectorState& x, int n = 1024);

struct LipPhiReport {
  double lip_hat = 0;
  double modulus = 0;
  double bound = 0;  // e^{3 omega} * modulus(e^{omega} r)
  double omega = 0;
  bool pass = false;
  int pairs = 0;
};

/// Lipschitz constant of phi(t) on B_r against e^{3 omega} sup_{||z|| <= e^omega r} d_Y(dA(z), dA(0)),
/// with 5% slack for the discretization of S.
LipPhiReport lip_phi_estimate(const OperatorModel& system, double omega, double t, double r, int n_pairs,
                              std::uint64_t seed, int n = 1024, int modulus_samples = 16);

}  // namespace ylab
