#include <gtest/gtest.h>

#include <cmath>

#include "ylab/manifolds.hpp"
#include "ylab/semigroup.hpp"

using namespace ylab;

namespace {

OperatorModel dense_diag(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  std::copy(d.begin(), d.end(), v.data());
  return OperatorModel::dense(v.asDiagonal().toDenseMatrix());
}

// x' = x, y' = -y + x^2. Invariant curves: y = x^2/3 (unstable), x = 0 (stable).
OperatorModel saddle() {
  const NonlinearMap f(
      2, [](const Vector& x) { return Vector(Vector::Unit(2, 1) * (x(0) * x(0))); },
      [](const Vector& x) {
        Matrix j = Matrix::Zero(2, 2);
        j(1, 0) = 2 * x(0);
        return j;
      });
  return OperatorModel::semilinear(dense_diag({1, -1}), f);
}

// x' = -x + z^2, y' = -2y + xz, z' = z. Unstable curve x = z^2/3, y = z^3/15;
// the plane z = 0 is the stable manifold with Psi = 0.
OperatorModel coupled() {
  const NonlinearMap f(
      3,
      [](const Vector& x) {
        Vector v(3);
        v << x(2) * x(2), x(0) * x(2), 0.0;
        return v;
      },
      [](const Vector& x) {
        Matrix j = Matrix::Zero(3, 3);
        j(0, 2) = 2 * x(2);
        j(1, 0) = x(2);
        j(1, 2) = x(0);
        return j;
      });
  return OperatorModel::semilinear(dense_diag({-1, -2, 1}), f);
}

DichotomySplit split_at_origin(const OperatorModel& system) {
  const SemilinearSystem sys = SemilinearSystem::from(system);
  return spectral_split(time_one_map(OperatorModel::dense(sys.jacobian(Vector::Zero(sys.dimension())))));
}

// Sign of the basis vectors is a convention of the split; read fiber values in
// the standard coordinates of the planar saddle.
double saddle_fiber(const ManifoldGraph& g, const DichotomySplit& s, Eigen::Index a) {
  const Vector point = s.unstable_basis * g.anchor_grid.row(a).transpose() + s.stable_basis * g.values.row(a).transpose();
  return point(1);
}

double saddle_base(const ManifoldGraph& g, const DichotomySplit& s, Eigen::Index a) {
  return (s.unstable_basis * g.anchor_grid.row(a).transpose())(0);
}

}  // namespace

TEST(ManifoldGraph, ZeroGraphLayout) {
  const ManifoldGraph g = ManifoldGraph::zero(GraphBase::unstable, 1, 1, 0.25);
  EXPECT_EQ(g.anchor_count(), 33);
  EXPECT_EQ(g.origin_index(), 16);
  EXPECT_DOUBLE_EQ(g.anchor_grid(0, 0), -0.25);
  EXPECT_DOUBLE_EQ(g.anchor_grid(32, 0), 0.25);
  EXPECT_EQ(g.anchor_grid(16, 0), 0.0);
  EXPECT_EQ(g.values.norm(), 0.0);

  const ManifoldGraph g2 = ManifoldGraph::zero(GraphBase::stable, 2, 1, 1.0, 5);
  EXPECT_EQ(g2.anchor_count(), 25);
  EXPECT_EQ(g2.anchor_grid.row(g2.origin_index()).norm(), 0.0);

  EXPECT_THROW(ManifoldGraph::zero(GraphBase::unstable, 3, 0, 1.0), Error);
  EXPECT_THROW(ManifoldGraph::zero(GraphBase::unstable, 1, 1, 1.0, 4), Error);
  EXPECT_THROW(ManifoldGraph::zero(GraphBase::unstable, 1, 1, 0.0), Error);
}

TEST(ManifoldGraph, InterpolationReproducesAffineDataAndClamps) {
  ManifoldGraph g = ManifoldGraph::zero(GraphBase::stable, 2, 2, 1.0, 5);
  for (Eigen::Index a = 0; a < g.anchor_count(); ++a) {
    const double u = g.anchor_grid(a, 0), v = g.anchor_grid(a, 1);
    g.values(a, 0) = 2 * u - v + 0.5;
    g.values(a, 1) = -u + 3 * v;
  }
  Vector xi(2);
  xi << 0.3, -0.7;
  const Vector val = g.evaluate(xi);
  EXPECT_NEAR(val(0), 2 * 0.3 + 0.7 + 0.5, 1e-14);
  EXPECT_NEAR(val(1), -0.3 - 2.1, 1e-14);
  const Matrix d = g.slope(xi);
  EXPECT_NEAR(d(0, 0), 2, 1e-12);
  EXPECT_NEAR(d(0, 1), -1, 1e-12);
  EXPECT_NEAR(d(1, 1), 3, 1e-12);
  // Outside the box the graph is frozen at the boundary.
  xi << 5.0, 0.0;
  EXPECT_NEAR(g.evaluate(xi)(0), 2.5, 1e-14);
  EXPECT_EQ(g.slope(xi)(0, 0), 0.0);
  // Lipschitz constant of an affine map over a grid: the operator norm along grid chords.
  EXPECT_GT(g.lipschitz_constant(), 3.0);
  EXPECT_LE(g.lipschitz_constant(), Matrix((Matrix(2, 2) << 2, -1, -1, 3).finished()).norm() + 1e-12);
}

TEST(GraphTransform, LinearFlowFixesZeroGraph) {
  const OperatorModel lin = dense_diag({1, -1});
  const DichotomySplit s = split_at_origin(lin);
  const TimeOneFlow flow = crandall_liggett_time_one(SemilinearSystem::from(lin), 256);
  for (GraphBase base : {GraphBase::unstable, GraphBase::stable}) {
    const ManifoldGraph g = ManifoldGraph::zero(base, 1, 1, 0.25);
    const ManifoldGraph next = graph_transform_step(g, s, flow);
    EXPECT_LE(next.values.cwiseAbs().maxCoeff(), 1e-15) << to_string(base);
    EXPECT_EQ(next.invalid_anchors, 0);
  }
}

TEST(GraphTransform, SaddleFirstStepHasSignOfParabola) {
  const OperatorModel sys = truncated_system(saddle(), 0.5);
  const DichotomySplit s = split_at_origin(sys);
  const TimeOneFlow flow = crandall_liggett_time_one(SemilinearSystem::from(sys), 256);
  const ManifoldGraph next = graph_transform_step(ManifoldGraph::zero(GraphBase::unstable, 1, 1, 0.25), s, flow);
  double largest = 0;
  for (Eigen::Index a = 0; a < next.anchor_count(); ++a) {
    const double y = saddle_fiber(next, s, a);
    EXPECT_GE(y, -1e-15);
    largest = std::max(largest, y);
  }
  EXPECT_GT(largest, 1e-3);
  EXPECT_LE(std::abs(saddle_fiber(next, s, next.origin_index())), 1e-15);
}

TEST(GraphTransform, SuccessiveChangesContract) {
  const OperatorModel sys = truncated_system(saddle(), 0.5);
  const DichotomySplit s = split_at_origin(sys);
  const TimeOneFlow flow = crandall_liggett_time_one(SemilinearSystem::from(sys), 256);
  ManifoldGraph g = ManifoldGraph::zero(GraphBase::unstable, 1, 1, 0.25);
  g.values = random_lipschitz_values(g, 0.1, 5);
  std::vector<double> changes, lips{g.lipschitz_constant()};
  for (int k = 0; k < 8; ++k) {
    g = graph_transform_step(g, s, flow);
    changes.push_back(g.last_change);
    lips.push_back(g.lip_estimate);
  }
  for (size_t k = 1; k < changes.size(); ++k) EXPECT_LT(changes[k], 0.5 * changes[k - 1]) << k;
  // Lip_{k+1} <= kappa Lip_k + c with a measured kappa < 1.
  const double kappa = (lips[2] - lips[1]) / (lips[1] - lips[0]);
  EXPECT_LT(std::abs(kappa), 1.0);
  for (double l : lips) EXPECT_TRUE(std::isfinite(l));
}

TEST(GraphTransform, ShapeMismatchIsRejected) {
  const OperatorModel lin = dense_diag({1, -1, -2});
  const DichotomySplit s = split_at_origin(lin);
  const TimeOneFlow flow = crandall_liggett_time_one(SemilinearSystem::from(lin), 16);
  try {
    graph_transform_step(ManifoldGraph::zero(GraphBase::unstable, 1, 1, 0.25), s, flow);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(UnstableManifold, LinearSystemIsFlatAfterOneIteration) {
  const ManifoldGraph g = compute_unstable_manifold(dense_diag({1, -1}), 0.5);
  EXPECT_TRUE(g.converged);
  EXPECT_EQ(g.iterations, 1);
  EXPECT_EQ(g.values.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(g.lip_estimate, 0.0);
  EXPECT_EQ(g.lip_phi, 0.0);
  EXPECT_TRUE(g.precondition_met);
}

TEST(UnstableManifold, SaddleMatchesInvariantParabola) {
  const double tol = 1e-10;
  const ManifoldGraph g = compute_unstable_manifold(saddle(), 0.5, tol);
  const DichotomySplit s = split_at_origin(saddle());
  ASSERT_TRUE(g.converged);
  EXPECT_LE(g.last_change, tol);
  double continuous = 0, discrete = 0;
  const double c_discrete = 1.0 / (3.0 - 1.0 / 1024);
  for (Eigen::Index a = 0; a < g.anchor_count(); ++a) {
    const double x = saddle_base(g, s, a), y = saddle_fiber(g, s, a);
    continuous = std::max(continuous, std::abs(y - x * x / 3));
    discrete = std::max(discrete, std::abs(y - c_discrete * x * x));
  }
  EXPECT_LE(continuous, 1e-3);
  // What is left against the discrete curve is interpolation error, O(dx^2).
  EXPECT_LE(discrete, 1e-4);
  EXPECT_LE(std::abs(g.values(g.origin_index(), 0)), 1e-8);
  EXPECT_LE(g.invariance_residual, 10 * tol * (1 + g.lip_estimate));
  EXPECT_LE(g.invariance_residual, 1e-6);
  EXPECT_EQ(g.invalid_anchors, 0);
  // Tangency: the graph flattens toward the origin.
  EXPECT_LE(g.lipschitz_constant(g.half_width / 4), g.lip_estimate);
  EXPECT_LT(g.lipschitz_constant(g.half_width / 4), 0.3 * g.lip_estimate);

  // Fixed point: one more step hardly moves it.
  const OperatorModel sys = truncated_system(saddle(), 0.5);
  const ManifoldGraph again = graph_transform_step(g, s, crandall_liggett_time_one(SemilinearSystem::from(sys)));
  EXPECT_LE(graph_distance(g, again), 10 * tol);
}

TEST(UnstableManifold, InitialGraphDoesNotMatter) {
  const double tol = 1e-10;
  const ManifoldGraph from_zero = compute_unstable_manifold(saddle(), 0.5, tol);
  for (std::uint64_t seed : {3u, 4u}) {
    ManifoldOptions opt;
    opt.initial_values = random_lipschitz_values(from_zero, 0.1, seed);
    ASSERT_GT(opt.initial_values->norm(), 0.0);
    const ManifoldGraph other = compute_unstable_manifold(saddle(), 0.5, tol, opt);
    ASSERT_TRUE(other.converged);
    EXPECT_GT(other.iterations, 1);
    EXPECT_LE(graph_distance(from_zero, other), std::min(1e-8, 100 * tol));
  }
}

TEST(UnstableManifold, CoupledSystemOverOneDimensionalBase) {
  const double tol = 1e-10;
  const ManifoldGraph g = compute_unstable_manifold(coupled(), 0.3, tol);
  const DichotomySplit s = split_at_origin(coupled());
  ASSERT_TRUE(g.converged);
  EXPECT_EQ(g.base_dim, 1);
  EXPECT_EQ(g.fiber_dim, 2);
  EXPECT_LE(g.invariance_residual, 1e-6);
  double err = 0;
  for (Eigen::Index a = 0; a < g.anchor_count(); ++a) {
    const Vector p = s.unstable_basis * g.anchor_grid.row(a).transpose() + s.stable_basis * g.values.row(a).transpose();
    const double z = p(2);
    err = std::max({err, std::abs(p(0) - z * z / 3), std::abs(p(1) - z * z * z / 15)});
  }
  EXPECT_LE(err, 1e-3);
}

TEST(UnstableManifold, NonHyperbolicLinearizationIsRejected) {
  try {
    compute_unstable_manifold(dense_diag({1, 0}), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHyperbolic);
  }
}

TEST(UnstableManifold, StrictGapRejectsLargeNonlinearity) {
  ManifoldOptions strict;
  strict.strict_gap = true;
  // Large ball: Lip(phi) is of order r0 and exceeds (1 - e^{-1}) / 4.
  try {
    compute_unstable_manifold(saddle(), 4.0, 1e-10, strict);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GapTooSmall);
  }
  const ManifoldGraph loose = compute_unstable_manifold(saddle(), 4.0, 1e-8, ManifoldOptions{});
  EXPECT_FALSE(loose.precondition_met);
  EXPECT_GE(loose.lip_phi, loose.gap_threshold);

  const ManifoldGraph small = compute_unstable_manifold(saddle(), 0.02, 1e-10, strict);
  EXPECT_TRUE(small.precondition_met);
  EXPECT_LT(small.lip_phi, small.gap_threshold);
  EXPECT_NEAR(small.gap_threshold, (1 - std::exp(-1.0)) / 4, 1e-6);
}

TEST(StableManifold, SaddleStableManifoldIsTheAxis) {
  const ManifoldGraph g = compute_stable_manifold(saddle(), 0.5);
  ASSERT_TRUE(g.converged);
  EXPECT_EQ(g.base, GraphBase::stable);
  EXPECT_LE(g.values.cwiseAbs().maxCoeff(), 1e-6);
  ASSERT_TRUE(g.stable_membership.has_value());
  EXPECT_TRUE(*g.stable_membership);
  EXPECT_LE(g.invariance_residual, 1e-9);
}

TEST(StableManifold, LinearSystemIsFlat) {
  const ManifoldGraph g = compute_stable_manifold(dense_diag({2, -1}), 0.5);
  EXPECT_TRUE(g.converged);
  EXPECT_EQ(g.values.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(g.stable_membership.value_or(false));
}

TEST(StableManifold, TwoDimensionalBase) {
  ManifoldOptions opt;
  opt.anchors_per_dim = 9;
  opt.cl_steps = 256;
  const ManifoldGraph g = compute_stable_manifold(coupled(), 0.3, 1e-10, opt);
  ASSERT_TRUE(g.converged);
  EXPECT_EQ(g.base_dim, 2);
  EXPECT_EQ(g.anchor_count(), 81);
  EXPECT_LE(g.values.cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_TRUE(g.stable_membership.value_or(false));
}

TEST(StableManifold, OffGraphPointDoesNotDecay) {
  const double r0 = 0.5;
  const OperatorModel sys = truncated_system(saddle(), r0);
  const TimeOneFlow flow = crandall_liggett_time_one(SemilinearSystem::from(sys));
  for (double y0 : {-0.2, 0.1, 0.2}) {
    Vector x(2);
    x << 0.05, y0;  // 0.05 off the axis in the unstable direction
    const double start = x.norm();
    double smallest = start;
    for (int k = 1; k <= 6; ++k) {
      x = flow(x, false).value;
      smallest = std::min(smallest, x.norm());
    }
    EXPECT_GT(smallest, 0.5 * start) << y0;
  }
}

TEST(LipShrink, SaddleSlopesShrinkWithRadius) {
  const LipShrinkReport r = lip_shrink_study(saddle(), {0.05, 0.5, 0.1, 0.25});
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.rows.front().r0, 0.5);
  EXPECT_EQ(r.rows.back().r0, 0.05);
  for (const LipShrinkRow& row : r.rows) {
    EXPECT_TRUE(row.converged);
    // Largest chord slope of x^2/3 on [-r0/2, r0/2] is at the edge: (2/3)(r0/2).
    EXPECT_NEAR(row.lip_Phi / (row.r0 / 3), 1.0, 0.05) << row.r0;
  }
  EXPECT_TRUE(r.nonincreasing);
  EXPECT_TRUE(r.final_small);
  EXPECT_TRUE(r.pass);
  for (size_t i = 1; i < r.rows.size(); ++i) EXPECT_LE(r.rows[i].lip_phi, r.rows[i - 1].lip_phi * 1.1);
}

TEST(LipShrink, LinearSystemRowsAreZero) {
  const LipShrinkReport r = lip_shrink_study(dense_diag({1, -1}), {0.5, 0.25});
  for (const LipShrinkRow& row : r.rows) EXPECT_EQ(row.lip_Phi, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(ManifoldCsv, HeaderAndRows) {
  ManifoldGraph g = ManifoldGraph::zero(GraphBase::unstable, 1, 2, 0.5, 3);
  g.values(2, 1) = 0.125;
  EXPECT_EQ(manifold_csv(g), "xi_1,phi_1,phi_2\n-0.5,0,0\n0,0,0\n0.5,0,0.125\n");
}
