#include "ylab/semigroup.hpp"

#include <cmath>

#include "ylab/yosida.hpp"

namespace ylab {

std::string to_string(Scheme scheme, int steps) {
  switch (scheme) {
    case Scheme::matrix_exponential: return "matrix_exponential";
    case Scheme::yosida_limit: return "yosida_limit";
    case Scheme::crandall_liggett: return "crandall_liggett(" + std::to_string(steps) + ")";
  }
  return "unknown";
}

namespace {

// e^{tA_mu} = T(t) + c_1 / mu + c_2 / mu^2 + ... on the domain, so the three
// doubling levels are combined to cancel the first two terms. This is Aitken's
// delta-squared with the ratio fixed at its asymptotic value 1/2; estimating
// the ratio entrywise fails on hat-function columns, whose entries do not
// follow the expansion.
template <typename T>
T richardson(const T& x0, const T& x1, const T& x2) {
  return (8 * x2 - 6 * x1 + x0) / 3;
}

void require_evolvable(const OperatorModel& op) {
  if (!op.is_linear()) throw Error(ErrorCode::NonlinearModel, "linear evolution of a semilinear model");
}

}  // namespace

Matrix yosida_semigroup(const OperatorModel& op, double t, double mu) {
  require_evolvable(op);
  const Matrix approx = yosida_approx(op, mu).materialize();
  return expm((t * approx).eval());
}

Propagator propagator(const OperatorModel& op, double t) {
  require_evolvable(op);
  require(t >= 0, ErrorCode::InvalidArgument, "evolution time must be >= 0");
  const Eigen::Index n = op.dimension();
  if (t == 0.0) return {Matrix::Identity(n, n), op.is_bounded() ? Scheme::matrix_exponential : Scheme::yosida_limit,
                        op.norm_kind()};
  if (op.is_bounded()) {
    return {expm((t * op.materialize()).eval()), Scheme::matrix_exponential, op.norm_kind()};
  }
  const Matrix e0 = yosida_semigroup(op, t, kYosidaLevels[0]);
  const Matrix e1 = yosida_semigroup(op, t, kYosidaLevels[1]);
  const Matrix e2 = yosida_semigroup(op, t, kYosidaLevels[2]);
  return {richardson(e0, e1, e2), Scheme::yosida_limit, op.norm_kind()};
}

std::vector<Propagator> propagator_series(const OperatorModel& op, double h, int count) {
  require_evolvable(op);
  require(count >= 1 && h >= 0, ErrorCode::InvalidArgument, "invalid propagator series");
  std::vector<Propagator> out;
  out.reserve(static_cast<size_t>(count));
  const Eigen::Index n = op.dimension();
  if (op.is_bounded()) {
    const Matrix a = op.materialize();
    for (int k = 0; k < count; ++k) {
      if (k == 0) {
        out.push_back({Matrix::Identity(n, n), Scheme::matrix_exponential, op.norm_kind()});
      } else {
        out.push_back({expm((k * h * a).eval()), Scheme::matrix_exponential, op.norm_kind()});
      }
    }
    return out;
  }
  std::vector<Matrix> step(3), power(3, Matrix::Identity(n, n));
  for (int l = 0; l < 3; ++l) step[static_cast<size_t>(l)] = yosida_semigroup(op, h, kYosidaLevels[l]);
  for (int k = 0; k < count; ++k) {
    if (k > 0)
      for (int l = 0; l < 3; ++l) power[static_cast<size_t>(l)] = step[static_cast<size_t>(l)] * power[static_cast<size_t>(l)];
    out.push_back({k == 0 ? Matrix(Matrix::Identity(n, n)) : richardson(power[0], power[1], power[2]),
                   Scheme::yosida_limit, op.norm_kind()});
  }
  return out;
}

VectorState evolve_linear(const OperatorModel& op, double t, const VectorState& x) {
  require_evolvable(op);
  require(x.dimension() == op.dimension(), ErrorCode::DimensionMismatch, "evolve_linear state dimension");
  require(t >= 0, ErrorCode::InvalidArgument, "evolution time must be >= 0");
  if (op.is_bounded() || t == 0.0) {
    return VectorState(propagator(op, t).matrix * x.coordinates, op.norm_kind());
  }
  Vector levels[3];
  for (int l = 0; l < 3; ++l) levels[l] = yosida_semigroup(op, t, kYosidaLevels[l]) * x.coordinates;
  const double change = (levels[2] - levels[1]).lpNorm<Eigen::Infinity>();
  if (change > 1e-3) {
    throw Error(ErrorCode::NonConvergentYosidaLimit,
                "successive Yosida levels differ by " + std::to_string(change));
  }
  Vector out = richardson(levels[0], levels[1], levels[2]);
  if (!out.allFinite()) throw Error(ErrorCode::NonFiniteResult, "evolution overflowed");
  return VectorState(std::move(out), op.norm_kind());
}

OperatorModel time_one_map(const OperatorModel& op) {
  Propagator p = propagator(op, 1.0);
  return OperatorModel::dense(std::move(p.matrix), p.norm_kind);
}

namespace {

double generator_abscissa(const OperatorModel& op) {
  if (op.is_bounded()) return spectral_abscissa(op.materialize());
  return spectral_abscissa(yosida_approx(op, kYosidaLevels[2]).materialize());
}

}  // namespace

GrowthEnvelope growth_envelope(const OperatorModel& op, double t_max, int samples) {
  require(t_max > 0, ErrorCode::InvalidArgument, "t_max must be > 0");
  require(samples >= 2, ErrorCode::InvalidArgument, "need at least two envelope samples");
  GrowthEnvelope env;
  const double h = t_max / (samples - 1);
  const auto series = propagator_series(op, h, samples);
  env.omega = std::max(0.0, generator_abscissa(op));
  double raw = 0;
  for (int k = 0; k < samples; ++k) {
    const double t = k * h;
    const double norm = matrix_norm(series[static_cast<size_t>(k)].matrix, op.norm_kind());
    env.t_samples.push_back(t);
    env.norms.push_back(norm);
    raw = std::max(raw, norm * std::exp(-env.omega * t));
  }
  // A peak between samples would break the envelope on a denser grid, so look
  // again around every sample near the maximum.
  const double sampled = raw;
  for (int k = 0; k < samples; ++k) {
    const double t = k * h;
    if (env.norms[static_cast<size_t>(k)] * std::exp(-env.omega * t) < 0.95 * sampled) continue;
    const double lo = std::max(0.0, t - h), hi = std::min(t_max, t + h);
    for (int i = 1; i < 16; ++i) {
      const double s = lo + (hi - lo) * i / 16.0;
      raw = std::max(raw, matrix_norm(propagator(op, s).matrix, op.norm_kind()) * std::exp(-env.omega * s));
    }
  }
  env.M = std::max(1.0, std::ceil(raw * (1.0 - 1e-12) / 0.01) * 0.01);
  env.sup_residual = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    env.sup_residual = std::max(env.sup_residual, env.norms[static_cast<size_t>(k)] - env.M * std::exp(env.omega * env.t_samples[static_cast<size_t>(k)]));
  }
  return env;
}

double envelope_violation(const OperatorModel& op, const GrowthEnvelope& env, double t_max, int samples) {
  const double h = t_max / (samples - 1);
  const auto series = propagator_series(op, h, samples);
  double worst = 0;
  for (int k = 0; k < samples; ++k) {
    const double norm = matrix_norm(series[static_cast<size_t>(k)].matrix, op.norm_kind());
    worst = std::max(worst, norm / (env.M * std::exp(env.omega * k * h)));
  }
  return worst;
}

ClosenessReport closeness_bound_check(const OperatorModel& a, const OperatorModel& b, double t) {
  require(a.dimension() == b.dimension(), ErrorCode::DimensionMismatch, "closeness check dimensions");
  require(t > 0, ErrorCode::InvalidArgument, "closeness check needs t > 0");
  ClosenessReport r;
  r.t = t;
  const GrowthEnvelope ea = growth_envelope(a, t);
  const GrowthEnvelope eb = growth_envelope(b, t);
  r.M = std::max(ea.M, eb.M);
  r.omega = std::max(ea.omega, eb.omega);
  r.lhs = matrix_norm((propagator(a, t).matrix - propagator(b, t).matrix).eval(), a.norm_kind());
  r.d_yosida = yosida_distance(a, b).tail_sup;
  r.rhs = t * r.M * r.M * std::exp(4 * r.omega * t) * r.d_yosida;
  r.pass = r.lhs <= r.rhs * (1 + 1e-6);
  return r;
}

namespace {

struct Rk4Result {
  Vector final_x;
  Vector final_y;
  double deviation;
};

Rk4Result integrate_pair(const MatrixPath& a_path, const MatrixPath& b_path, const Vector& w, double step) {
  const int steps = static_cast<int>(std::lround(1.0 / step));
  const double h = 1.0 / steps;
  Vector x = w, y = w;
  double deviation = 0;
  auto rk4 = [h](const MatrixPath& path, double t, const Vector& u) {
    const Matrix a0 = path(t), a1 = path(t + h / 2), a2 = path(t + h);
    const Vector k1 = a0 * u;
    const Vector k2 = a1 * (u + h / 2 * k1);
    const Vector k3 = a1 * (u + h / 2 * k2);
    const Vector k4 = a2 * (u + h * k3);
    return Vector(u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4));
  };
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    x = rk4(a_path, t, x);
    y = rk4(b_path, t, y);
    deviation = std::max(deviation, (x - y).norm());
  }
  return {x, y, deviation};
}

}  // namespace

NonautonomousReport nonautonomous_compare(const MatrixPath& a_path, const MatrixPath& b_path, const Vector& w,
                                          double step) {
  require(step > 0 && step <= 0.5, ErrorCode::InvalidArgument, "invalid RK4 step");
  NonautonomousReport r;
  const Eigen::Index n = w.size();
  double sup_log = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 1000; ++k) {
    const double tau = k * 1e-3;
    const Matrix a = a_path(tau), b = b_path(tau);
    require(a.rows() == n && b.rows() == n && a.cols() == n && b.cols() == n, ErrorCode::DimensionMismatch,
            "path matrices must match the state dimension");
    r.sup_difference = std::max(r.sup_difference, spectral_norm((a - b).eval()));
    sup_log = std::max({sup_log, logarithmic_norm(a), logarithmic_norm(b)});
  }
  r.M = 1.0;
  r.omega = std::max(0.0, sup_log);

  const Rk4Result fine = integrate_pair(a_path, b_path, w, step);
  const Rk4Result coarse = integrate_pair(a_path, b_path, w, 2 * step);
  r.richardson_error =
      std::max((fine.final_x - coarse.final_x).norm(), (fine.final_y - coarse.final_y).norm()) / 15.0;
  if (r.richardson_error > 1e-8) {
    throw Error(ErrorCode::StepSizeTooCoarse, "Richardson estimate " + std::to_string(r.richardson_error));
  }
  r.deviation = fine.deviation;
  r.bound = r.M * std::exp(2 * r.omega) * r.sup_difference * w.norm();
  r.pass = r.deviation <= r.bound * (1 + 1e-6);
  return r;
}

}  // namespace ylab
