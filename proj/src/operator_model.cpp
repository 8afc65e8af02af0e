#include "ylab/operator_model.hpp"

#include <algorithm>
#include <cmath>

#include "ylab/delay.hpp"

namespace ylab {

// ---------------------------------------------------------------------------
// NonlinearMap

NonlinearMap::NonlinearMap(Eigen::Index dimension, Evaluator evaluator, JacobianFn jacobian,
                           std::optional<double> lipschitz_hint)
    : dimension_(dimension),
      evaluator_(std::move(evaluator)),
      jacobian_(std::move(jacobian)),
      lipschitz_hint_(lipschitz_hint) {
  require(dimension >= 1, ErrorCode::InvalidArgument, "nonlinear map dimension must be >= 1");
  require(static_cast<bool>(evaluator_), ErrorCode::InvalidArgument, "nonlinear map needs an evaluator");
  if (lipschitz_hint_) {
    require(*lipschitz_hint_ >= 0, ErrorCode::InvalidArgument, "lipschitz hint must be >= 0");
  }
}

NonlinearMap NonlinearMap::zero(Eigen::Index dimension) {
  NonlinearMap f(
      dimension, [dimension](const Vector&) { return Vector::Zero(dimension).eval(); },
      [dimension](const Vector&) { return Matrix::Zero(dimension, dimension).eval(); }, 0.0);
  f.zero_ = true;
  f.descriptor_ = NonlinearDescriptor{"zero", {}};
  return f;
}

Vector NonlinearMap::operator()(const Vector& x) const {
  require(x.size() == dimension_, ErrorCode::DimensionMismatch, "nonlinear map input dimension");
  Vector y = evaluator_(x);
  require(y.size() == dimension_, ErrorCode::DimensionMismatch, "nonlinear map output dimension");
  if (!y.allFinite()) throw Error(ErrorCode::NonFiniteResult, "nonlinear map produced a non-finite value");
  return y;
}

Matrix NonlinearMap::finite_difference_jacobian(const Vector& x) const {
  const double h = 1e-6 * (1.0 + x.norm());
  Matrix j(dimension_, dimension_);
  Vector probe = x;
  for (Eigen::Index k = 0; k < dimension_; ++k) {
    probe(k) = x(k) + h;
    const Vector up = evaluator_(probe);
    probe(k) = x(k) - h;
    const Vector down = evaluator_(probe);
    probe(k) = x(k);
    j.col(k) = (up - down) / (2 * h);
  }
  if (!j.allFinite()) throw Error(ErrorCode::JacobianUnavailable, "finite-difference Jacobian is not finite");
  return j;
}

Matrix NonlinearMap::jacobian(const Vector& x) const {
  require(x.size() == dimension_, ErrorCode::DimensionMismatch, "jacobian input dimension");
  if (!jacobian_) return finite_difference_jacobian(x);
  Matrix j = jacobian_(x);
  if (!j.allFinite()) throw Error(ErrorCode::JacobianUnavailable, "analytic Jacobian is not finite");
  return j;
}

// ---------------------------------------------------------------------------
// OperatorModel

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::dense_matrix: return "dense";
    case ModelKind::spectral_diagonal: return "spectral_diagonal";
    case ModelKind::delay_generator: return "delay";
    case ModelKind::semilinear_composite: return "semilinear";
  }
  return "unknown";
}

OperatorModel OperatorModel::dense(Matrix entries, NormKind norm) {
  require(entries.rows() >= 1 && entries.rows() == entries.cols(), ErrorCode::InvalidArgument,
          "dense model needs a square matrix of size >= 1");
  require(entries.allFinite(), ErrorCode::InvalidArgument, "dense model entries must be finite");
  return OperatorModel(Dense{std::move(entries), norm});
}

OperatorModel OperatorModel::spectral_diagonal(Vector eigenvalues) {
  require(eigenvalues.size() >= 1, ErrorCode::InvalidArgument, "spectral diagonal needs >= 1 eigenvalue");
  require(eigenvalues.allFinite(), ErrorCode::InvalidArgument, "eigenvalues must be finite");
  std::sort(eigenvalues.data(), eigenvalues.data() + eigenvalues.size(), std::greater<>());
  return OperatorModel(Diagonal{std::move(eigenvalues)});
}

OperatorModel OperatorModel::delay_generator(double a, int grid_size) {
  require(std::isfinite(a), ErrorCode::InvalidArgument, "delay coefficient must be finite");
  require(grid_size >= 8, ErrorCode::InvalidArgument, "delay grid size must be >= 8");
  return OperatorModel(Delay{a, grid_size});
}

OperatorModel OperatorModel::semilinear(OperatorModel linear, NonlinearMap nonlinearity) {
  require(linear.is_linear(), ErrorCode::InvalidArgument, "semilinear linear part must be linear");
  require(linear.dimension() == nonlinearity.dimension(), ErrorCode::DimensionMismatch,
          "semilinear parts differ in dimension");
  return OperatorModel(
      Semilinear{std::make_shared<const OperatorModel>(std::move(linear)), std::move(nonlinearity)});
}

ModelKind OperatorModel::kind() const {
  return std::visit(
      [](const auto& m) -> ModelKind {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Dense>) return ModelKind::dense_matrix;
        else if constexpr (std::is_same_v<T, Diagonal>) return ModelKind::spectral_diagonal;
        else if constexpr (std::is_same_v<T, Delay>) return ModelKind::delay_generator;
        else return ModelKind::semilinear_composite;
      },
      model_);
}

Eigen::Index OperatorModel::dimension() const {
  return std::visit(
      [](const auto& m) -> Eigen::Index {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Dense>) return m.entries.rows();
        else if constexpr (std::is_same_v<T, Diagonal>) return m.eigenvalues.size();
        else if constexpr (std::is_same_v<T, Delay>) return m.grid + 1;
        else return m.linear->dimension();
      },
      model_);
}

NormKind OperatorModel::norm_kind() const {
  return std::visit(
      [](const auto& m) -> NormKind {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Dense>) return m.norm;
        else if constexpr (std::is_same_v<T, Diagonal>) return NormKind::euclidean;
        else if constexpr (std::is_same_v<T, Delay>) return NormKind::sup;
        else return m.linear->norm_kind();
      },
      model_);
}

bool OperatorModel::is_bounded() const {
  const ModelKind k = kind();
  return k == ModelKind::dense_matrix || k == ModelKind::spectral_diagonal;
}

const Matrix& OperatorModel::entries() const {
  const auto* d = std::get_if<Dense>(&model_);
  require(d != nullptr, ErrorCode::InvalidArgument, "not a dense model");
  return d->entries;
}

const Vector& OperatorModel::eigenvalues() const {
  const auto* d = std::get_if<Diagonal>(&model_);
  require(d != nullptr, ErrorCode::InvalidArgument, "not a spectral diagonal model");
  return d->eigenvalues;
}

double OperatorModel::delay_coefficient() const {
  const auto* d = std::get_if<Delay>(&model_);
  require(d != nullptr, ErrorCode::InvalidArgument, "not a delay model");
  return d->a;
}

int OperatorModel::grid_size() const {
  const auto* d = std::get_if<Delay>(&model_);
  require(d != nullptr, ErrorCode::InvalidArgument, "not a delay model");
  return d->grid;
}

const OperatorModel& OperatorModel::linear_part() const {
  const auto* s = std::get_if<Semilinear>(&model_);
  require(s != nullptr, ErrorCode::InvalidArgument, "not a semilinear model");
  return *s->linear;
}

const NonlinearMap& OperatorModel::nonlinearity() const {
  const auto* s = std::get_if<Semilinear>(&model_);
  require(s != nullptr, ErrorCode::InvalidArgument, "not a semilinear model");
  return s->nonlinearity;
}

Matrix OperatorModel::materialize() const {
  if (const auto* d = std::get_if<Dense>(&model_)) return d->entries;
  if (const auto* d = std::get_if<Diagonal>(&model_)) return d->eigenvalues.asDiagonal();
  throw Error(ErrorCode::UnboundedModel, std::string(to_string(kind())) + " model cannot be materialized");
}

OperatorModel add(const OperatorModel& a, const OperatorModel& b, double scale) {
  require(a.dimension() == b.dimension(), ErrorCode::DimensionMismatch, "sum of operators of different size");
  return OperatorModel::dense(a.materialize() + scale * b.materialize(), a.norm_kind());
}

// ---------------------------------------------------------------------------
// Operations

namespace {

void check_dimension(const OperatorModel& op, Eigen::Index n) {
  if (op.dimension() != n) {
    throw Error(ErrorCode::DimensionMismatch, "operator dimension " + std::to_string(op.dimension()) +
                                                  " vs vector dimension " + std::to_string(n));
  }
}

}  // namespace

VectorState apply(const OperatorModel& op, const VectorState& x) {
  check_dimension(op, x.dimension());
  Vector y;
  switch (op.kind()) {
    case ModelKind::dense_matrix:
      y = op.entries() * x.coordinates;
      break;
    case ModelKind::spectral_diagonal:
      y = op.eigenvalues().cwiseProduct(x.coordinates);
      break;
    case ModelKind::delay_generator:
      y = delay_generator_matrix(op.delay_coefficient(), op.grid_size()) * x.coordinates;
      break;
    case ModelKind::semilinear_composite:
      y = apply(op.linear_part(), x).coordinates + op.nonlinearity()(x.coordinates);
      break;
  }
  if (!y.allFinite()) throw Error(ErrorCode::NonFiniteResult, "apply overflowed");
  return VectorState(std::move(y), op.norm_kind());
}

Matrix resolvent_matrix(const OperatorModel& op, double lambda) {
  const Eigen::Index n = op.dimension();
  switch (op.kind()) {
    case ModelKind::dense_matrix: {
      const Matrix shifted = lambda * Matrix::Identity(n, n) - op.entries();
      Eigen::PartialPivLU<Matrix> lu(shifted);
      const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
      if (pivots.minCoeff() <= 1e-12 * std::max(1.0, pivots.maxCoeff())) {
        throw Error(ErrorCode::LambdaInSpectrum, "lambda = " + std::to_string(lambda));
      }
      return lu.solve(Matrix::Identity(n, n));
    }
    case ModelKind::spectral_diagonal: {
      const Vector gaps = (lambda - op.eigenvalues().array()).matrix();
      if (gaps.cwiseAbs().minCoeff() <= 1e-12 * std::max(1.0, std::abs(lambda))) {
        throw Error(ErrorCode::LambdaInSpectrum, "lambda = " + std::to_string(lambda));
      }
      return gaps.cwiseInverse().asDiagonal();
    }
    case ModelKind::delay_generator:
      return delay_resolvent_matrix(op.delay_coefficient(), lambda, op.grid_size());
    case ModelKind::semilinear_composite:
      break;
  }
  throw Error(ErrorCode::NonlinearModel, "linear resolvent of a semilinear model");
}

VectorState resolvent(const OperatorModel& op, double lambda, const VectorState& y) {
  check_dimension(op, y.dimension());
  switch (op.kind()) {
    case ModelKind::delay_generator:
      return delay_resolvent(op.delay_coefficient(), lambda, y);
    case ModelKind::spectral_diagonal: {
      const Vector gaps = (lambda - op.eigenvalues().array()).matrix();
      if (gaps.cwiseAbs().minCoeff() <= 1e-12 * std::max(1.0, std::abs(lambda))) {
        throw Error(ErrorCode::LambdaInSpectrum, "lambda = " + std::to_string(lambda));
      }
      return VectorState(y.coordinates.cwiseQuotient(gaps), op.norm_kind());
    }
    case ModelKind::dense_matrix: {
      const Eigen::Index n = op.dimension();
      const Matrix shifted = lambda * Matrix::Identity(n, n) - op.entries();
      Eigen::PartialPivLU<Matrix> lu(shifted);
      const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
      if (pivots.minCoeff() <= 1e-12 * std::max(1.0, pivots.maxCoeff())) {
        throw Error(ErrorCode::LambdaInSpectrum, "lambda = " + std::to_string(lambda));
      }
      return VectorState(lu.solve(y.coordinates), op.norm_kind());
    }
    case ModelKind::semilinear_composite:
      break;
  }
  throw Error(ErrorCode::NonlinearModel, "linear resolvent of a semilinear model");
}

double operator_norm(const OperatorModel& op) {
  switch (op.kind()) {
    case ModelKind::spectral_diagonal:
      return op.eigenvalues().cwiseAbs().maxCoeff();
    case ModelKind::dense_matrix:
      return matrix_norm(op.entries(), op.norm_kind());
    default:
      throw Error(ErrorCode::UnboundedModel, "norm of an unbounded model");
  }
}

std::vector<Complex> spectrum(const OperatorModel& op) {
  if (op.kind() == ModelKind::spectral_diagonal) {
    Matrix d = op.eigenvalues().asDiagonal();
    return sorted_eigenvalues(d);
  }
  if (op.kind() != ModelKind::dense_matrix) throw Error(ErrorCode::UnboundedModel, "spectrum of an unbounded model");
  return sorted_eigenvalues(op.entries());
}

std::vector<EigenPair> spectrum_pairs(const OperatorModel& op) {
  const Matrix a = op.materialize();
  Eigen::ComplexEigenSolver<ComplexMatrix> es(a.cast<Complex>());
  const std::vector<Complex> order = spectrum(op);
  std::vector<bool> used(static_cast<size_t>(a.rows()), false);
  std::vector<EigenPair> out;
  out.reserve(order.size());
  for (const Complex& target : order) {
    Eigen::Index best = -1;
    double best_dist = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      if (used[static_cast<size_t>(k)]) continue;
      const double dist = std::abs(es.eigenvalues()(k) - target);
      if (best < 0 || dist < best_dist) {
        best = k;
        best_dist = dist;
      }
    }
    used[static_cast<size_t>(best)] = true;
    const Complex value = es.eigenvalues()(best);
    const ComplexVector v = es.eigenvectors().col(best);
    const double residual = (a.cast<Complex>() * v - value * v).norm() / v.norm();
    out.push_back({value, v, residual});
  }
  return out;
}

}  // namespace ylab
