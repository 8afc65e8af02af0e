#include "ylab/nonlinear.hpp"

#include <cmath>

#include "ylab/parallel.hpp"
#include "ylab/random.hpp"

namespace ylab {

SemilinearSystem SemilinearSystem::from(const OperatorModel& op) {
  if (op.kind() == ModelKind::semilinear_composite) {
    const OperatorModel& l = op.linear_part();
    if (!l.is_bounded()) throw Error(ErrorCode::UnboundedModel, "semilinear linear part must be bounded");
    return {l.materialize(), op.nonlinearity()};
  }
  return {op.materialize(), NonlinearMap::zero(op.dimension())};
}

ResolventSolve solve_nonlinear_resolvent(const SemilinearSystem& sys, double lambda, const Vector& y) {
  require(lambda > 0, ErrorCode::InvalidArgument, "nonlinear resolvent needs lambda > 0");
  require(y.size() == sys.dimension(), ErrorCode::DimensionMismatch, "nonlinear resolvent input dimension");
  const Eigen::Index n = y.size();
  const double tol = 1e-12 * (1.0 + y.norm());
  auto residual_of = [&](const Vector& x) { return Vector(x - lambda * sys(x) - y); };

  ResolventSolve best;
  best.x = y;
  Vector r = residual_of(best.x);
  best.residual = r.norm();
  Vector x = best.x;
  double rn = best.residual;
  // The explicit step is usually a better start than y itself.
  {
    Vector guess = y + lambda * sys(y);
    if (guess.allFinite()) {
      Vector rg = residual_of(guess);
      if (rg.norm() < rn) {
        x = guess;
        r = rg;
        rn = rg.norm();
        best = {x, rn, 0, false};
      }
    }
  }
  for (int it = 0; it <= 50; ++it) {
    if (rn <= tol) {
      best = {x, rn, it, true};
      return best;
    }
    if (it == 50) break;
    const Matrix jac = Matrix::Identity(n, n) - lambda * sys.jacobian(x);
    Eigen::PartialPivLU<Matrix> lu(jac);
    const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (pivots.minCoeff() <= 1e-14 * std::max(1.0, pivots.maxCoeff())) {
      throw Error(ErrorCode::JacobianSingular, "Newton Jacobian is singular");
    }
    const Vector dx = lu.solve(-r);
    double step = 1.0;
    Vector trial;
    Vector rt;
    double rtn = std::numeric_limits<double>::infinity();
    for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
      trial = x + step * dx;
      rt = residual_of(trial);
      rtn = rt.norm();
      if (std::isfinite(rtn) && rtn < (1 - 1e-4 * step) * rn) break;
    }
    if (!(std::isfinite(rtn) && rtn < rn)) break;  // no descent possible
    x = trial;
    r = rt;
    rn = rtn;
    if (rn < best.residual) best = {x, rn, it + 1, false};
  }
  best.converged = best.residual <= tol;
  return best;
}

Vector nonlinear_resolvent(const SemilinearSystem& sys, double lambda, const Vector& y) {
  ResolventSolve s = solve_nonlinear_resolvent(sys, lambda, y);
  if (!s.converged) {
    throw Error(ErrorCode::NewtonDiverged, "best residual " + std::to_string(s.residual));
  }
  return s.x;
}

VectorState nonlinear_resolvent(const OperatorModel& a, double lambda, const VectorState& y) {
  return VectorState(nonlinear_resolvent(SemilinearSystem::from(a), lambda, y.coordinates), a.norm_kind());
}

AccretivityCertificate accretivity_certificate(const OperatorModel& a, double omega, int n_samples, double radius,
                                               std::uint64_t seed, std::vector<double> lambda_grid) {
  require(n_samples >= 1 && radius > 0, ErrorCode::InvalidArgument, "certificate needs samples and a radius");
  for (double lambda : lambda_grid) {
    require(lambda > 0 && lambda * omega < 1, ErrorCode::InvalidArgument, "certificate grid needs lambda omega < 1");
  }
  const SemilinearSystem sys = SemilinearSystem::from(a);
  const Eigen::Index n = sys.dimension();
  AccretivityCertificate cert;
  cert.omega = omega;
  cert.lambda_grid = lambda_grid;
  cert.sample_pairs = n_samples;

  const size_t levels = lambda_grid.size();
  std::vector<double> ratios(static_cast<size_t>(n_samples) * levels, 0.0);
  std::vector<char> failed(ratios.size(), 0);
  parallel_for(static_cast<size_t>(n_samples), [&](size_t i) {
    Rng rng = make_stream(seed, i);
    const Vector x = ball_point(n, radius, rng);
    const Vector y = ball_point(n, radius, rng);
    const double gap = (x - y).norm();
    for (size_t l = 0; l < levels; ++l) {
      const size_t slot = i * levels + l;
      try {
        const Vector jx = nonlinear_resolvent(sys, lambda_grid[l], x);
        const Vector jy = nonlinear_resolvent(sys, lambda_grid[l], y);
        ratios[slot] = gap > 0 ? (jx - jy).norm() / gap : 0.0;
      } catch (const Error&) {
        failed[slot] = 1;
      }
    }
  });

  cert.worst_by_lambda.assign(levels, 0.0);
  for (size_t i = 0; i < static_cast<size_t>(n_samples); ++i) {
    for (size_t l = 0; l < levels; ++l) {
      const size_t slot = i * levels + l;
      const double limit = 1.0 / (1.0 - lambda_grid[l] * omega) * (1 + 1e-9);
      if (failed[slot] || ratios[slot] > limit) ++cert.failures;
      cert.worst_by_lambda[l] = std::max(cert.worst_by_lambda[l], ratios[slot]);
      cert.worst_ratio = std::max(cert.worst_ratio, ratios[slot]);
    }
  }
  cert.pass = cert.failures == 0;
  return cert;
}

FlowEvaluation crandall_liggett_flow(const SemilinearSystem& sys, double t, int n, const Vector& x,
                                     bool with_jacobian) {
  require(t >= 0 && n >= 1, ErrorCode::InvalidArgument, "Crandall-Liggett needs t >= 0 and n >= 1");
  const Eigen::Index dim = sys.dimension();
  FlowEvaluation out{x, Matrix()};
  if (with_jacobian) out.jacobian = Matrix::Identity(dim, dim);
  if (t == 0) return out;
  const double lambda = t / n;
  for (int k = 0; k < n; ++k) {
    out.value = nonlinear_resolvent(sys, lambda, out.value);
    if (with_jacobian) {
      const Matrix jac = Matrix::Identity(dim, dim) - lambda * sys.jacobian(out.value);
      out.jacobian = jac.partialPivLu().solve(out.jacobian);
    }
  }
  return out;
}

TrajectoryRecord crandall_liggett_evolve(const OperatorModel& a, double t, int n, const VectorState& x) {
  require(t >= 0 && n >= 1, ErrorCode::InvalidArgument, "Crandall-Liggett needs t >= 0 and n >= 1");
  const SemilinearSystem sys = SemilinearSystem::from(a);
  require(x.dimension() == sys.dimension(), ErrorCode::DimensionMismatch, "Crandall-Liggett state dimension");
  TrajectoryRecord rec;
  rec.scheme = Scheme::crandall_liggett;
  rec.steps = n;
  rec.times.push_back(0.0);
  rec.states.push_back(x);
  if (t == 0) return rec;
  const double lambda = t / n;
  Vector state = x.coordinates;
  for (int k = 1; k <= n; ++k) {
    state = nonlinear_resolvent(sys, lambda, state);
    rec.times.push_back(k * lambda);
    rec.states.push_back(VectorState(state, x.norm_kind));
  }
  const Vector doubled = crandall_liggett_flow(sys, t, 2 * n, x.coordinates).value;
  rec.doubling_error = (state - doubled).norm();
  return rec;
}

NonlinearMap radial_truncation(const NonlinearMap& f, double r0) {
  require(r0 > 0, ErrorCode::InvalidArgument, "truncation radius must be > 0");
  const Eigen::Index n = f.dimension();
  auto evaluator = [f, r0](const Vector& x) {
    const double nx = x.norm();
    return nx <= r0 ? f(x) : f(Vector(r0 / nx * x));
  };
  NonlinearMap::JacobianFn jacobian;
  if (f.has_analytic_jacobian()) {
    jacobian = [f, r0, n](const Vector& x) {
      const double nx = x.norm();
      if (nx <= r0) return f.jacobian(x);
      const Vector unit = x / nx;
      const Matrix radial = (r0 / nx) * (Matrix::Identity(n, n) - unit * unit.transpose());
      return Matrix(f.jacobian(Vector(r0 * unit)) * radial);
    };
  }
  std::optional<double> hint;
  if (f.lipschitz_hint()) hint = 2.0 * *f.lipschitz_hint();
  NonlinearMap out(n, evaluator, jacobian, hint);
  if (f.descriptor()) {
    NonlinearDescriptor d = *f.descriptor();
    d.parameters["truncation_radius"] = r0;
    out.set_descriptor(std::move(d));
  }
  out.set_truncation_radius(r0);
  return out;
}

ProtoDerivativeRecord semilinear_proto_derivative(const OperatorModel& l, const NonlinearMap& f, const VectorState& x) {
  require(l.is_bounded(), ErrorCode::UnboundedModel, "proto-derivative needs a bounded linear part");
  require(l.dimension() == f.dimension() && x.dimension() == f.dimension(), ErrorCode::DimensionMismatch,
          "proto-derivative dimensions");
  const Matrix lmat = l.materialize();
  OperatorModel linearization = OperatorModel::dense(lmat + f.jacobian(x.coordinates), l.norm_kind());
  const OperatorModel at_origin =
      OperatorModel::dense(lmat + f.jacobian(Vector::Zero(f.dimension())), l.norm_kind());
  YosidaEstimate dy = yosida_distance(linearization, at_origin);
  return {x, std::move(linearization), std::move(dy)};
}

std::vector<double> proto_graph_convergence(const NonlinearMap& f, const Vector& x, int probes, std::uint64_t seed) {
  const Eigen::Index n = f.dimension();
  const Matrix jac = f.jacobian(x);
  const Vector fx = f(x);
  const std::vector<double> steps = {1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<double> out(steps.size(), 0.0);
  for (int p = 0; p < probes; ++p) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(p));
    const Vector v = unit_sphere_point(n, rng);
    for (size_t s = 0; s < steps.size(); ++s) {
      const Vector quotient = (f(Vector(x + steps[s] * v)) - fx) / steps[s];
      // Both graphs contain (v, .); their distance along this direction.
      out[s] = std::max(out[s], (quotient - jac * v).norm());
    }
  }
  return out;
}

namespace {

constexpr int kLadderDepth = 40;  // quarter-octave levels below the anchor radius

double ladder_level(double anchor, int j) { return anchor * std::pow(2.0, j / 4.0); }

}  // namespace

double proto_continuity_modulus(const OperatorModel& system, double r, int n_samples, std::uint64_t seed) {
  require(r > 0 && n_samples >= 1, ErrorCode::InvalidArgument, "modulus needs r > 0 and samples");
  if (system.kind() != ModelKind::semilinear_composite || system.nonlinearity().is_zero()) return 0.0;
  const OperatorModel& l = system.linear_part();
  const NonlinearMap& f = system.nonlinearity();
  const Eigen::Index n = f.dimension();
  const double anchor = f.truncation_radius().value_or(1.0);

  std::vector<double> radii;
  for (int j = -kLadderDepth; ladder_level(anchor, j) <= r * (1 + 1e-12); ++j) radii.push_back(ladder_level(anchor, j));
  if (radii.empty()) radii.push_back(r);  // below the ladder floor

  std::vector<Vector> directions;
  for (int i = 0; i < n_samples; ++i) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(i));
    directions.push_back(unit_sphere_point(n, rng));
  }
  std::vector<double> values(radii.size() * directions.size(), 0.0);
  parallel_for(values.size(), [&](size_t k) {
    const double rho = radii[k / directions.size()];
    const Vector& u = directions[k % directions.size()];
    values[k] = semilinear_proto_derivative(l, f, VectorState(Vector(rho * u))).dY_to_origin.tail_sup;
  });
  return *std::max_element(values.begin(), values.end());
}

namespace {

// The linearized flow goes through the same n-step scheme as S, so the
// discretization errors of the two cancel and phi vanishes for linear systems.
SemilinearSystem linearization_at_origin(const SemilinearSystem& sys) {
  return SemilinearSystem{sys.jacobian(Vector::Zero(sys.dimension())), NonlinearMap::zero(sys.dimension())};
}

}  // namespace

VectorState phi_difference(const OperatorModel& system, double t, const VectorState& x, int n) {
  const SemilinearSystem sys = SemilinearSystem::from(system);
  require(x.dimension() == sys.dimension(), ErrorCode::DimensionMismatch, "phi state dimension");
  const Vector s = crandall_liggett_flow(sys, t, n, x.coordinates).value;
  const Vector lin = crandall_liggett_flow(linearization_at_origin(sys), t, n, x.coordinates).value;
  return VectorState(s - lin, x.norm_kind);
}

LipPhiReport lip_phi_estimate(const OperatorModel& system, double omega, double t, double r, int n_pairs,
                              std::uint64_t seed, int n, int modulus_samples) {
  require(t >= 0 && t <= 1, ErrorCode::InvalidArgument, "lip_phi_estimate needs t in [0, 1]");
  require(r > 0 && n_pairs >= 1, ErrorCode::InvalidArgument, "lip_phi_estimate needs r > 0 and pairs");
  const SemilinearSystem sys = SemilinearSystem::from(system);
  const Eigen::Index dim = sys.dimension();
  const SemilinearSystem lin = linearization_at_origin(sys);
  auto phi = [&](const Vector& x) {
    return Vector(crandall_liggett_flow(sys, t, n, x).value - crandall_liggett_flow(lin, t, n, x).value);
  };

  LipPhiReport rep;
  rep.omega = omega;
  rep.pairs = n_pairs;
  std::vector<double> ratios(static_cast<size_t>(n_pairs), 0.0);
  parallel_for(ratios.size(), [&](size_t i) {
    Rng rng = make_stream(seed, i);
    const Vector x = ball_point(dim, r, rng);
    Vector y;
    if (i % 2 == 0) {
      y = ball_point(dim, r, rng);
    } else {
      // Nearby partner: probes the local derivative rather than a chord.
      y = x + 1e-3 * r * unit_sphere_point(dim, rng);
      if (y.norm() > r) y *= r / y.norm();
    }
    const double gap = (x - y).norm();
    ratios[i] = gap > 0 ? (phi(x) - phi(y)).norm() / gap : 0.0;
  });
  rep.lip_hat = *std::max_element(ratios.begin(), ratios.end());
  rep.modulus = proto_continuity_modulus(system, std::exp(omega) * r, modulus_samples, seed);
  rep.bound = std::exp(3 * omega) * rep.modulus;
  rep.pass = rep.lip_hat <= rep.bound * 1.05;
  return rep;
}

}  // namespace ylab
