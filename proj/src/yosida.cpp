#include "ylab/yosida.hpp"

#include <algorithm>
#include <cmath>

#include "ylab/delay.hpp"
#include "ylab/parallel.hpp"
#include "ylab/random.hpp"
#include "ylab/semigroup.hpp"

namespace ylab {

std::vector<double> geometric_grid(double mu0, double factor, int count) {
  require(mu0 > 0 && factor > 1 && count >= 1, ErrorCode::InvalidArgument, "invalid geometric grid");
  std::vector<double> grid(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) grid[static_cast<size_t>(k)] = mu0 * std::pow(factor, k);
  return grid;
}

OperatorModel yosida_approx(const OperatorModel& op, double mu) {
  require(mu > 0, ErrorCode::InvalidArgument, "Yosida parameter must be > 0");
  const Eigen::Index n = op.dimension();
  switch (op.kind()) {
    case ModelKind::spectral_diagonal: {
      const Vector c = op.eigenvalues();
      const Vector gaps = (mu - c.array()).matrix();
      if (gaps.cwiseAbs().minCoeff() <= 1e-12 * std::max(1.0, mu)) {
        throw Error(ErrorCode::LambdaInSpectrum, "mu = " + std::to_string(mu));
      }
      return OperatorModel::dense(Matrix((mu * c.array() / gaps.array()).matrix().asDiagonal()));
    }
    case ModelKind::dense_matrix: {
      // mu^2 R - mu I = mu A R, and A commutes with R.
      return OperatorModel::dense(Matrix(mu * resolvent_matrix(op, mu) * op.entries()), op.norm_kind());
    }
    case ModelKind::delay_generator: {
      Matrix approx = mu * mu * resolvent_matrix(op, mu);
      approx.diagonal().array() -= mu;
      return OperatorModel::dense(std::move(approx), NormKind::sup);
    }
    case ModelKind::semilinear_composite:
      break;
  }
  (void)n;
  throw Error(ErrorCode::NonlinearModel, "Yosida approximation of a semilinear model");
}

Matrix yosida_difference(const OperatorModel& a, const OperatorModel& b, double mu) {
  require(a.dimension() == b.dimension(), ErrorCode::DimensionMismatch, "Yosida difference dimensions");
  if (a.kind() == ModelKind::delay_generator && b.kind() == ModelKind::delay_generator) {
    return mu * mu * (resolvent_matrix(a, mu) - resolvent_matrix(b, mu));
  }
  return yosida_approx(a, mu).materialize() - yosida_approx(b, mu).materialize();
}

namespace {

// Value at h = 0 of the polynomial through (h_i, v_i) (Neville).
double neville_at_zero(const std::vector<double>& h, std::vector<double> v) {
  const size_t m = v.size();
  for (size_t level = 1; level < m; ++level) {
    for (size_t i = m - 1; i >= level; --i) {
      v[i] = (h[i - level] * v[i] - h[i] * v[i - 1]) / (h[i - level] - h[i]);
      if (i == level) break;
    }
  }
  return v[m - 1];
}

void validate_grid(const std::vector<double>& grid) {
  if (grid.size() < 8) throw Error(ErrorCode::GridTooShort, "need at least 8 grid points, got " + std::to_string(grid.size()));
  for (size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] > 0, ErrorCode::InvalidArgument, "grid values must be positive");
    if (i > 0) require(grid[i] > grid[i - 1], ErrorCode::InvalidArgument, "grid must be strictly increasing");
  }
}

}  // namespace

YosidaEstimate summarize_yosida_grid(std::vector<double> grid, std::vector<double> values) {
  validate_grid(grid);
  require(values.size() == grid.size(), ErrorCode::DimensionMismatch, "one norm value per grid point");
  YosidaEstimate e;
  e.mu_grid = std::move(grid);
  e.norm_values = std::move(values);

  const size_t n = e.norm_values.size();
  const size_t quart = std::max<size_t>(2, (n + 3) / 4);
  const auto tail_begin = e.norm_values.end() - static_cast<std::ptrdiff_t>(quart);
  const double hi = *std::max_element(tail_begin, e.norm_values.end());
  const double lo = *std::min_element(tail_begin, e.norm_values.end());
  e.tail_sup = hi;
  e.plateau_detected = hi <= 1e-300 || (hi - lo) <= 0.05 * hi;

  std::vector<double> h, v;
  for (size_t i = n - 4; i < n; ++i) {
    h.push_back(1.0 / e.mu_grid[i]);
    v.push_back(e.norm_values[i]);
  }
  const bool increasing = std::is_sorted(v.begin(), v.end());
  const bool decreasing = std::is_sorted(v.begin(), v.end(), std::greater<>());
  e.estimate = e.tail_sup;
  if (increasing || decreasing) {
    const double extrapolated = neville_at_zero(h, v);
    const bool usable = std::isfinite(extrapolated) && extrapolated >= 0 &&
                        (!e.plateau_detected || std::abs(extrapolated - e.tail_sup) <= 0.05 * std::max(e.tail_sup, 1e-12));
    if (usable) e.estimate = extrapolated;
  }
  return e;
}

YosidaEstimate yosida_distance(const OperatorModel& a, const OperatorModel& b, const std::vector<double>& grid) {
  validate_grid(grid);
  require(a.dimension() == b.dimension(), ErrorCode::DimensionMismatch, "Yosida distance dimensions");
  const NormKind kind = a.norm_kind();
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](size_t i) { values[i] = matrix_norm(yosida_difference(a, b, grid[i]), kind); });
  return summarize_yosida_grid(grid, std::move(values));
}

Matrix implicit_resolvent_matrix(const OperatorModel& op, double lambda) {
  require(lambda > 0, ErrorCode::InvalidArgument, "implicit resolvent needs lambda > 0");
  // (I - lambda A)^{-1} = (1/lambda) R(1/lambda, A)
  return resolvent_matrix(op, 1.0 / lambda) / lambda;
}

YosidaEstimate resolvent_form_distance(const OperatorModel& a, const OperatorModel& b, const std::vector<double>& grid) {
  validate_grid(grid);
  require(a.dimension() == b.dimension(), ErrorCode::DimensionMismatch, "Yosida distance dimensions");
  const NormKind kind = a.norm_kind();
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](size_t i) {
    const double lambda = 1.0 / grid[i];
    const Matrix diff = implicit_resolvent_matrix(a, lambda) - implicit_resolvent_matrix(b, lambda);
    values[i] = matrix_norm(diff, kind) / lambda;
  });
  return summarize_yosida_grid(grid, std::move(values));
}

double bounded_oracle_distance(const OperatorModel& a, const OperatorModel& b) {
  require(a.dimension() == b.dimension(), ErrorCode::DimensionMismatch, "oracle distance dimensions");
  return matrix_norm((a.materialize() - b.materialize()).eval(), a.norm_kind());
}

BoundCheckReport bounded_perturbation_bound_check(const OperatorModel& a, const OperatorModel& c, double t_max) {
  BoundCheckReport r;
  const GrowthEnvelope env = growth_envelope(a, t_max);
  r.M = env.M;
  r.omega = env.omega;
  r.d_estimate = yosida_distance(a, add(a, c)).estimate;
  r.bound = r.M * r.M * operator_norm(c);
  r.pass = r.d_estimate <= r.bound * (1 + 1e-6);
  r.margin = r.bound - r.d_estimate;
  return r;
}

BoundCheckReport relative_bound_check(const OperatorModel& a, double coef_a, double coef_c, const Vector& contraction,
                                      double t_max) {
  require(a.kind() == ModelKind::spectral_diagonal, ErrorCode::InvalidArgument,
          "relative bound check expects a spectral diagonal generator");
  require(a.eigenvalues().maxCoeff() < 0, ErrorCode::InvalidArgument, "relative bound check needs negative spectrum");
  require(coef_a >= 0 && coef_c >= 0, ErrorCode::InvalidArgument, "relative bound coefficients must be >= 0");
  require(contraction.size() == a.dimension(), ErrorCode::DimensionMismatch, "contraction size");
  require(contraction.cwiseAbs().maxCoeff() <= 1.0, ErrorCode::InvalidArgument, "D must be a contraction");

  const Matrix amat = a.materialize();
  const Matrix d = contraction.asDiagonal();
  const OperatorModel c = OperatorModel::dense(coef_a * amat * d + coef_c * d);

  BoundCheckReport r;
  const GrowthEnvelope env = growth_envelope(a, t_max);
  r.M = env.M;
  r.omega = env.omega;
  const std::vector<double> grid = geometric_grid();
  // K bounds mu ||A R(mu, A)|| for every mu, so the grid maximum is completed
  // with the extrapolated limit.
  std::vector<double> k_values;
  for (double mu : grid) {
    k_values.push_back(mu * spectral_norm((amat * resolvent_matrix(a, mu)).eval()));
    r.K = std::max(r.K, k_values.back());
  }
  r.K = std::max(r.K, summarize_yosida_grid(grid, k_values).estimate);
  // Both sides dense so that C = 0 compares a matrix with itself.
  r.d_estimate = yosida_distance(OperatorModel::dense(amat), add(a, c), grid).estimate;
  r.bound = coef_a * r.K * r.M + coef_c * r.M * r.M;
  r.pass = r.d_estimate <= r.bound * (1 + 1e-6);
  r.margin = r.bound - r.d_estimate;
  return r;
}

BoundCheckReport relative_bound_check(const OperatorModel& a, double coef_a, double coef_c, std::uint64_t seed,
                                      double t_max) {
  Rng rng = make_stream(seed);
  Vector d(a.dimension());
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = uniform(rng, -1.0, 1.0);
  return relative_bound_check(a, coef_a, coef_c, d, t_max);
}

}  // namespace ylab
