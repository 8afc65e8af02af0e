#include "ylab/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ylab/parallel.hpp"
#include "ylab/random.hpp"
#include "ylab/serialize.hpp"

namespace ylab {

std::string_view to_string(GraphBase base) { return base == GraphBase::unstable ? "unstable" : "stable"; }

ManifoldGraph ManifoldGraph::zero(GraphBase base, int base_dim, int fiber_dim, double half_width,
                                  int anchors_per_dim) {
  require(base_dim == 1 || base_dim == 2, ErrorCode::InvalidArgument, "graph base dimension must be 1 or 2");
  require(fiber_dim >= 0, ErrorCode::InvalidArgument, "negative fiber dimension");
  require(anchors_per_dim >= 3 && anchors_per_dim % 2 == 1, ErrorCode::InvalidArgument,
          "anchors per dimension must be odd and >= 3");
  require(half_width > 0, ErrorCode::InvalidArgument, "graph box must have positive width");
  ManifoldGraph g;
  g.base = base;
  g.base_dim = base_dim;
  g.fiber_dim = fiber_dim;
  g.anchors_per_dim = anchors_per_dim;
  g.half_width = half_width;
  const int k = anchors_per_dim;
  const int centre = (k - 1) / 2;
  const double dx = half_width / centre;
  const Eigen::Index count = base_dim == 1 ? k : k * k;
  g.anchor_grid.resize(count, base_dim);
  for (Eigen::Index a = 0; a < count; ++a) {
    g.anchor_grid(a, 0) = (static_cast<int>(a % k) - centre) * dx;
    if (base_dim == 2) g.anchor_grid(a, 1) = (static_cast<int>(a / k) - centre) * dx;
  }
  g.values = Matrix::Zero(count, fiber_dim);
  return g;
}

Eigen::Index ManifoldGraph::origin_index() const {
  const Eigen::Index centre = (anchors_per_dim - 1) / 2;
  return base_dim == 1 ? centre : centre + centre * anchors_per_dim;
}

namespace {

// Cell index and local coordinate along one axis, with a clamp flag.
struct AxisCell {
  Eigen::Index cell;
  double s;
  bool clamped;
};

AxisCell locate(const ManifoldGraph& g, double x) {
  const double dx = 2 * g.half_width / (g.anchors_per_dim - 1);
  const bool clamped = x <= -g.half_width || x >= g.half_width;
  x = std::clamp(x, -g.half_width, g.half_width);
  const double u = (x + g.half_width) / dx;
  const Eigen::Index cell = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(u)), 0, g.anchors_per_dim - 2);
  return {cell, u - static_cast<double>(cell), clamped};
}

}  // namespace

Vector ManifoldGraph::evaluate(const Vector& xi) const {
  require(xi.size() == base_dim, ErrorCode::DimensionMismatch, "graph argument dimension");
  const AxisCell c0 = locate(*this, xi(0));
  if (base_dim == 1) {
    return (1 - c0.s) * values.row(c0.cell).transpose() + c0.s * values.row(c0.cell + 1).transpose();
  }
  const AxisCell c1 = locate(*this, xi(1));
  const Eigen::Index k = anchors_per_dim;
  const Eigen::Index i00 = c0.cell + k * c1.cell;
  return (1 - c0.s) * (1 - c1.s) * values.row(i00).transpose() + c0.s * (1 - c1.s) * values.row(i00 + 1).transpose() +
         (1 - c0.s) * c1.s * values.row(i00 + k).transpose() + c0.s * c1.s * values.row(i00 + k + 1).transpose();
}

Matrix ManifoldGraph::slope(const Vector& xi) const {
  require(xi.size() == base_dim, ErrorCode::DimensionMismatch, "graph argument dimension");
  const double dx = 2 * half_width / (anchors_per_dim - 1);
  Matrix d = Matrix::Zero(fiber_dim, base_dim);
  const AxisCell c0 = locate(*this, xi(0));
  if (base_dim == 1) {
    if (!c0.clamped) d.col(0) = (values.row(c0.cell + 1) - values.row(c0.cell)).transpose() / dx;
    return d;
  }
  const AxisCell c1 = locate(*this, xi(1));
  const Eigen::Index k = anchors_per_dim;
  const Eigen::Index i00 = c0.cell + k * c1.cell;
  const Vector v00 = values.row(i00).transpose(), v10 = values.row(i00 + 1).transpose();
  const Vector v01 = values.row(i00 + k).transpose(), v11 = values.row(i00 + k + 1).transpose();
  if (!c0.clamped) d.col(0) = ((1 - c1.s) * (v10 - v00) + c1.s * (v11 - v01)) / dx;
  if (!c1.clamped) d.col(1) = ((1 - c0.s) * (v01 - v00) + c0.s * (v11 - v10)) / dx;
  return d;
}

double ManifoldGraph::lipschitz_constant(double within_radius) const {
  double lip = 0;
  const Eigen::Index n = anchor_count();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (anchor_grid.row(i).norm() > within_radius) continue;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (anchor_grid.row(j).norm() > within_radius) continue;
      const double gap = (anchor_grid.row(i) - anchor_grid.row(j)).norm();
      lip = std::max(lip, (values.row(i) - values.row(j)).norm() / gap);
    }
  }
  return lip;
}

TimeOneFlow crandall_liggett_time_one(const SemilinearSystem& sys, int n) {
  return [sys, n](const Vector& x, bool with_jacobian) { return crandall_liggett_flow(sys, 1.0, n, x, with_jacobian); };
}

namespace {

// Base and fiber bases plus coordinate projections for one graph orientation.
struct Frame {
  Matrix v_base, v_fiber;  // n x d, n x m
  Matrix q_base, q_fiber;  // d x n, m x n
};

Frame frame_for(GraphBase base, const DichotomySplit& split) {
  const Eigen::Index n = split.projection.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix qs = split.stable_basis.transpose() * split.projection;
  const Matrix qu = split.unstable_basis.transpose() * (id - split.projection);
  if (base == GraphBase::unstable) return {split.unstable_basis, split.stable_basis, qu, qs};
  return {split.stable_basis, split.unstable_basis, qs, qu};
}

struct NewtonOutcome {
  Vector u;
  bool ok = false;
};

// Damped Newton for r(u) = 0 where eval returns (r, dr/du).
template <typename Eval>
NewtonOutcome newton(Vector u, double scale, Eval&& eval) {
  auto [r, jac] = eval(u);
  double rn = r.norm();
  const double tol = 1e-13 * (1 + scale);
  for (int it = 0; it < 50 && rn > tol; ++it) {
    Eigen::FullPivLU<Matrix> lu(jac);
    if (!lu.isInvertible()) return {u, false};
    const Vector du = lu.solve(-r);
    double step = 1.0;
    bool moved = false;
    for (int h = 0; h < 30; ++h, step *= 0.5) {
      const Vector trial = u + step * du;
      auto [rt, jt] = eval(trial);
      const double rtn = rt.norm();
      if (std::isfinite(rtn) && rtn < rn) {
        u = trial;
        r = rt;
        jac = jt;
        rn = rtn;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  // Stagnation just above the target is rounding in the flow, not failure.
  return {u, rn <= 1e3 * tol};
}

Vector unstable_preimage(const ManifoldGraph& g, const Frame& f, const TimeOneFlow& flow, const Matrix& g_base_inv,
                         const Vector& xi, bool& ok, Vector& image) {
  auto eval = [&](const Vector& eta) {
    const Vector z = f.v_base * eta + f.v_fiber * g.evaluate(eta);
    const FlowEvaluation fe = flow(z, true);
    const Matrix dz = f.v_base + f.v_fiber * g.slope(eta);
    return std::pair<Vector, Matrix>(f.q_base * fe.value - xi, f.q_base * fe.jacobian * dz);
  };
  NewtonOutcome out = newton(g_base_inv * xi, xi.norm(), eval);
  ok = out.ok;
  image = flow(f.v_base * out.u + f.v_fiber * g.evaluate(out.u), false).value;
  return out.u;
}

Vector stable_fiber(const ManifoldGraph& g, const Frame& f, const TimeOneFlow& flow, const Vector& xi, bool& ok) {
  auto eval = [&](const Vector& v) {
    const FlowEvaluation fe = flow(f.v_base * xi + f.v_fiber * v, true);
    const Vector base_image = f.q_base * fe.value;
    const Matrix lhs = f.q_fiber - g.slope(base_image) * f.q_base;
    return std::pair<Vector, Matrix>(f.q_fiber * fe.value - g.evaluate(base_image), lhs * fe.jacobian * f.v_fiber);
  };
  NewtonOutcome out = newton(g.evaluate(xi), xi.norm(), eval);
  ok = out.ok;
  return out.u;
}

void check_frame(const ManifoldGraph& g, const DichotomySplit& split) {
  const int stable = split.stable_dim;
  const int unstable = static_cast<int>(split.projection.rows()) - stable;
  const int want_base = g.base == GraphBase::unstable ? unstable : stable;
  require(g.base_dim == want_base && g.fiber_dim == static_cast<int>(split.projection.rows()) - want_base,
          ErrorCode::DimensionMismatch, "graph does not match the split dimensions");
}

}  // namespace

ManifoldGraph graph_transform_step(const ManifoldGraph& graph, const DichotomySplit& split, const TimeOneFlow& flow) {
  check_frame(graph, split);
  const Frame f = frame_for(graph.base, split);
  ManifoldGraph next = graph;
  const Eigen::Index count = graph.anchor_count();
  std::vector<char> ok(count, 1);

  Matrix g_base_inv;
  if (graph.base == GraphBase::unstable) {
    const Matrix d0 = flow(Vector::Zero(split.projection.rows()), true).jacobian;
    g_base_inv = (f.q_base * d0 * f.v_base).inverse();
  }
  parallel_for(static_cast<size_t>(count), [&](size_t a) {
    const Vector xi = graph.anchor_grid.row(a).transpose();
    bool good = false;
    try {
      if (graph.base == GraphBase::unstable) {
        Vector image;
        unstable_preimage(graph, f, flow, g_base_inv, xi, good, image);
        if (good) next.values.row(a) = (f.q_fiber * image).transpose();
      } else {
        const Vector v = stable_fiber(graph, f, flow, xi, good);
        if (good) next.values.row(a) = v.transpose();
      }
    } catch (const Error&) {
      good = false;
    }
    ok[a] = good ? 1 : 0;
  });
  next.invalid_anchors = static_cast<int>(std::count(ok.begin(), ok.end(), 0));
  if (next.invalid_anchors * 10 > count) {
    throw Error(ErrorCode::NewtonDiverged, std::to_string(next.invalid_anchors) + " of " + std::to_string(count) +
                                               " anchors failed in the graph transform");
  }
  next.lip_estimate = next.lipschitz_constant();
  next.last_change = graph_distance(graph, next);
  return next;
}

double graph_distance(const ManifoldGraph& a, const ManifoldGraph& b) {
  require(a.values.rows() == b.values.rows() && a.values.cols() == b.values.cols(), ErrorCode::DimensionMismatch,
          "graphs live on different grids");
  if (a.values.size() == 0) return 0.0;
  return (a.values - b.values).rowwise().norm().maxCoeff();
}

double invariance_residual(const ManifoldGraph& graph, const DichotomySplit& split, const TimeOneFlow& flow) {
  check_frame(graph, split);
  if (graph.fiber_dim == 0) return 0.0;
  const Frame f = frame_for(graph.base, split);
  const Eigen::Index count = graph.anchor_count();
  std::vector<double> res(count, 0.0);
  Matrix g_base_inv;
  if (graph.base == GraphBase::unstable) {
    const Matrix d0 = flow(Vector::Zero(split.projection.rows()), true).jacobian;
    g_base_inv = (f.q_base * d0 * f.v_base).inverse();
  }
  parallel_for(static_cast<size_t>(count), [&](size_t a) {
    const Vector xi = graph.anchor_grid.row(a).transpose();
    if (graph.base == GraphBase::unstable) {
      // The graph point over the preimage lands exactly over xi.
      bool good = false;
      Vector image;
      unstable_preimage(graph, f, flow, g_base_inv, xi, good, image);
      res[a] = good ? (f.q_fiber * image - graph.values.row(a).transpose()).norm()
                    : std::numeric_limits<double>::infinity();
    } else {
      const Vector w = flow(f.v_base * xi + f.v_fiber * graph.values.row(a).transpose(), false).value;
      res[a] = (f.q_fiber * w - graph.evaluate(f.q_base * w)).norm();
    }
  });
  return *std::max_element(res.begin(), res.end());
}

OperatorModel truncated_system(const OperatorModel& system, double r0) {
  require(r0 > 0, ErrorCode::InvalidArgument, "truncation radius must be > 0");
  if (system.kind() != ModelKind::semilinear_composite) {
    require(system.is_bounded(), ErrorCode::UnboundedModel, "manifold solvers need a bounded linear part");
    return system;
  }
  return OperatorModel::semilinear(system.linear_part(), radial_truncation(system.nonlinearity(), r0));
}

Matrix random_lipschitz_values(const ManifoldGraph& shape, double lip, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  const Vector w = unit_sphere_point(shape.base_dim, rng);
  const Vector u = shape.fiber_dim > 0 ? unit_sphere_point(shape.fiber_dim, rng) : Vector();
  Matrix values(shape.anchor_count(), shape.fiber_dim);
  for (Eigen::Index a = 0; a < shape.anchor_count(); ++a) {
    values.row(a) = (lip * std::abs(w.dot(shape.anchor_grid.row(a).transpose())) * u).transpose();
  }
  return values;
}

namespace {

struct Setup {
  OperatorModel truncated;
  SemilinearSystem sys;
  DichotomySplit split;
  TimeOneFlow flow;
  TimeOneFlow linear_flow;  // same scheme for L + F'(0)
};

Setup prepare(const OperatorModel& system, double r0, const ManifoldOptions& options) {
  OperatorModel truncated = truncated_system(system, r0);
  SemilinearSystem sys = SemilinearSystem::from(truncated);
  const Matrix l0 = sys.jacobian(Vector::Zero(sys.dimension()));
  DichotomySplit split = spectral_split(OperatorModel::dense(expm(l0)));
  TimeOneFlow flow = crandall_liggett_time_one(sys, options.cl_steps);
  TimeOneFlow linear_flow =
      crandall_liggett_time_one(SemilinearSystem{l0, NonlinearMap::zero(sys.dimension())}, options.cl_steps);
  return {std::move(truncated), std::move(sys), std::move(split), std::move(flow), std::move(linear_flow)};
}

// Sampled Lip of phi(1) = S(1) - T(1) on B_{r0}, half of the pairs close together.
double sampled_phi_lipschitz(const Setup& s, double r0, int pairs, std::uint64_t seed) {
  const Eigen::Index n = s.sys.dimension();
  std::vector<double> ratios(static_cast<size_t>(pairs), 0.0);
  auto phi = [&](const Vector& x) { return Vector(s.flow(x, false).value - s.linear_flow(x, false).value); };
  parallel_for(ratios.size(), [&](size_t i) {
    Rng rng = make_stream(seed, 1000 + i);
    const Vector x = ball_point(n, r0, rng);
    const Vector y = i % 2 == 0 ? ball_point(n, r0, rng) : Vector(x + 1e-3 * r0 * unit_sphere_point(n, rng));
    const double gap = (x - y).norm();
    ratios[i] = gap > 0 ? (phi(x) - phi(y)).norm() / gap : 0.0;
  });
  return *std::max_element(ratios.begin(), ratios.end());
}

ManifoldGraph iterate(GraphBase base, const Setup& s, double r0, double tol, const ManifoldOptions& options) {
  const int n = static_cast<int>(s.sys.dimension());
  const int stable = s.split.stable_dim;
  const int base_dim = base == GraphBase::unstable ? n - stable : stable;
  ManifoldGraph g = ManifoldGraph::zero(base, base_dim, n - base_dim, r0 / 2, options.anchors_per_dim);
  if (options.initial_values) {
    require(options.initial_values->rows() == g.values.rows() && options.initial_values->cols() == g.values.cols(),
            ErrorCode::DimensionMismatch, "initial graph has the wrong shape");
    g.values = *options.initial_values;
  }

  g.lip_phi = sampled_phi_lipschitz(s, r0, options.phi_pairs, options.seed);
  g.gap_threshold = (1 - std::exp(-s.split.beta)) / (4 * s.split.N);
  g.precondition_met = g.lip_phi < g.gap_threshold;
  if (options.strict_gap && !g.precondition_met) {
    throw Error(ErrorCode::GapTooSmall, "Lip(phi(1)) = " + format_number(g.lip_phi) + " >= threshold " +
                                            format_number(g.gap_threshold));
  }

  for (int it = 1; it <= options.max_iterations; ++it) {
    ManifoldGraph next = graph_transform_step(g, s.split, s.flow);
    require(next.values.allFinite(), ErrorCode::NotConverged, "graph transform produced non-finite values");
    next.iterations = it;
    g = std::move(next);
    if (g.last_change <= tol) {
      g.converged = true;
      break;
    }
  }
  g.lip_estimate = g.lipschitz_constant();
  g.invariance_residual = invariance_residual(g, s.split, s.flow);
  return g;
}

}  // namespace

ManifoldGraph compute_unstable_manifold(const OperatorModel& system, double r0, double tol,
                                        const ManifoldOptions& options) {
  const Setup s = prepare(system, r0, options);
  return iterate(GraphBase::unstable, s, r0, tol, options);
}

ManifoldGraph compute_stable_manifold(const OperatorModel& system, double r0, double tol,
                                      const ManifoldOptions& options) {
  const Setup s = prepare(system, r0, options);
  ManifoldGraph g = iterate(GraphBase::stable, s, r0, tol, options);

  const Frame f = frame_for(GraphBase::stable, s.split);
  Rng rng = make_stream(options.seed, 77);
  bool member = true;
  for (int sample = 0; sample < 8; ++sample) {
    Eigen::Index a = static_cast<Eigen::Index>(uniform(rng) * static_cast<double>(g.anchor_count()));
    a = std::min(a, g.anchor_count() - 1);
    if (a == g.origin_index()) a = (a + 1) % g.anchor_count();
    Vector x = f.v_base * g.anchor_grid.row(a).transpose() + f.v_fiber * g.values.row(a).transpose();
    const double x0 = x.norm();
    for (int k = 1; k <= 6; ++k) {
      x = s.flow(x, false).value;
      if (x.norm() > 2 * s.split.N * std::exp(-s.split.beta * k / 2) * x0) member = false;
    }
  }
  g.stable_membership = member;
  return g;
}

LipShrinkReport lip_shrink_study(const OperatorModel& system, std::vector<double> r0_list, double tol,
                                 const ManifoldOptions& options) {
  require(!r0_list.empty(), ErrorCode::InvalidArgument, "lip_shrink_study needs radii");
  std::sort(r0_list.begin(), r0_list.end(), std::greater<>());
  LipShrinkReport rep;
  for (double r0 : r0_list) {
    const ManifoldGraph g = compute_unstable_manifold(system, r0, tol, options);
    rep.rows.push_back({r0, g.lip_phi, g.lip_estimate, g.converged});
  }
  rep.nonincreasing = true;
  for (size_t i = 1; i < rep.rows.size(); ++i) {
    if (rep.rows[i].lip_Phi > 1.1 * rep.rows[i - 1].lip_Phi) rep.nonincreasing = false;
  }
  // The ratio can sit exactly on 0.1 (a quadratic curve sampled on a scaled
  // grid), so allow rounding.
  rep.final_small = rep.rows.back().lip_Phi <= 0.1 * rep.rows.front().lip_Phi * (1 + 1e-6);
  rep.pass = rep.nonincreasing && rep.final_small &&
             std::all_of(rep.rows.begin(), rep.rows.end(), [](const LipShrinkRow& r) { return r.converged; });
  return rep;
}

std::string manifold_csv(const ManifoldGraph& graph) {
  std::ostringstream out;
  for (int i = 0; i < graph.base_dim; ++i) out << (i ? "," : "") << "xi_" << i + 1;
  for (int j = 0; j < graph.fiber_dim; ++j) out << ",phi_" << j + 1;
  out << '\n';
  for (Eigen::Index a = 0; a < graph.anchor_count(); ++a) {
    for (int i = 0; i < graph.base_dim; ++i) out << (i ? "," : "") << format_number(graph.anchor_grid(a, i));
    for (int j = 0; j < graph.fiber_dim; ++j) out << ',' << format_number(graph.values(a, j));
    out << '\n';
  }
  return out.str();
}

}  // namespace ylab
