#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ylab/dichotomy.hpp"
#include "ylab/nonlinear.hpp"

namespace ylab {

/// Which subspace the graph is parametrized over: Ker P (unstable manifold)
/// or Im P (stable manifold).
enum class GraphBase { unstable, stable };

std::string_view to_string(GraphBase base);

/// A Lipschitz graph over a box [-h, h]^d of base coordinates, d <= 2,
/// stored at a uniform anchor grid and interpolated (bi)linearly, clamped to
/// the box. Coordinates are taken in the orthonormal bases of the split:
/// x = V_base xi + V_fiber values(xi).
struct ManifoldGraph {
  GraphBase base = GraphBase::unstable;
  int base_dim = 1;
  int fiber_dim = 0;
  int anchors_per_dim = 33;
  double half_width = 0;  // r0 / 2
  Matrix anchor_grid;     // one anchor per row
  Matrix values;          // one fiber coordinate vector per row

  double lip_estimate = 0;
  double invariance_residual = 0;
  double last_change = 0;  // sup distance between the last two iterates
  int iterations = 0;
  bool converged = false;
  int invalid_anchors = 0;

  // Diagnostics of the construction.
  double lip_phi = 0;        // sampled Lip of S(1) - T(1) on B_{r0}
  double gap_threshold = 0;  // (1 - e^{-beta}) / (4 N)
  bool precondition_met = false;
  std::optional<bool> stable_membership;  // stable graphs only

  static ManifoldGraph zero(GraphBase base, int base_dim, int fiber_dim, double half_width, int anchors_per_dim = 33);

  Eigen::Index anchor_count() const { return anchor_grid.rows(); }
  Eigen::Index origin_index() const;
  Vector evaluate(const Vector& xi) const;
  /// Derivative of the interpolant in the cell containing xi (zero along clamped coordinates).
  Matrix slope(const Vector& xi) const;
  /// max over anchor pairs of ||values_i - values_j|| / ||xi_i - xi_j||.
  double lipschitz_constant(double within_radius = std::numeric_limits<double>::infinity()) const;
};

/// x -> (value, Jacobian) of a time-1 map.
using TimeOneFlow = std::function<FlowEvaluation(const Vector&, bool)>;

/// Crandall-Liggett time-1 map of a semilinear system with n steps.
TimeOneFlow crandall_liggett_time_one(const SemilinearSystem& sys, int n = 1024);

/// One pass of the graph transform. Anchors where the Newton solve fails keep
/// their value and are counted; more than 10% of them aborts with NewtonDiverged.
ManifoldGraph graph_transform_step(const ManifoldGraph& graph, const DichotomySplit& split, const TimeOneFlow& flow);

/// Sup distance between two graphs on the same grid.
double graph_distance(const ManifoldGraph& a, const ManifoldGraph& b);

/// Max over anchors of the fiber distance between the image of a graph point
/// and the graph, measured the way the transform measures it.
double invariance_residual(const ManifoldGraph& graph, const DichotomySplit& split, const TimeOneFlow& flow);

struct ManifoldOptions {
  int anchors_per_dim = 33;
  int cl_steps = 1024;
  int max_iterations = 500;
  /// Throw GapTooSmall when Lip(phi(1)) misses the contraction threshold
  /// instead of only reporting it.
  bool strict_gap = false;
  std::optional<Matrix> initial_values;
  int phi_pairs = 16;
  std::uint64_t seed = 1;
};

/// Truncates the nonlinearity at r0, splits the linearization at 0 and
/// iterates the graph transform from the zero graph (or options.initial_values)
/// until the sup change is <= tol. Throws NotConverged only if iteration
/// produces non-finite values; otherwise converged reports the outcome.
ManifoldGraph compute_unstable_manifold(const OperatorModel& system, double r0, double tol = 1e-10,
                                        const ManifoldOptions& options = {});

/// As above over Im P. Additionally checks ||S(k) x|| <= 2 N e^{-beta k / 2} ||x||,
/// k <= 6, on 8 sampled graph points.
ManifoldGraph compute_stable_manifold(const OperatorModel& system, double r0, double tol = 1e-10,
                                      const ManifoldOptions& options = {});

/// Graph of |w . xi| u scaled to Lipschitz constant lip, with seeded unit w, u.
Matrix random_lipschitz_values(const ManifoldGraph& shape, double lip, std::uint64_t seed);

/// The truncated system used by the manifold solvers.
OperatorModel truncated_system(const OperatorModel& system, double r0);

struct LipShrinkRow {
  double r0 = 0;
  double lip_phi = 0;
  double lip_Phi = 0;
  bool converged = false;
};

struct LipShrinkReport {
  std::vector<LipShrinkRow> rows;  // descending r0
  bool nonincreasing = false;      // within 10% slack
  bool final_small = false;        // last lip_Phi <= 0.1 first
  bool pass = false;
};

LipShrinkReport lip_shrink_study(const OperatorModel& system, std::vector<double> r0_list, double tol = 1e-10,
                                 const ManifoldOptions& options = {});

/// Columns xi_1..xi_d, phi_1..phi_m with a header row.
std::string manifold_csv(const ManifoldGraph& graph);

}  // namespace ylab
