#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ylab/error.hpp"
#include "ylab/linalg.hpp"

namespace ylab {

/// A point of the phase space together with the norm it is measured in.
struct VectorState {
  Vector coordinates;
  NormKind norm_kind = NormKind::euclidean;

  VectorState() = default;
  explicit VectorState(Vector x, NormKind kind = NormKind::euclidean)
      : coordinates(std::move(x)), norm_kind(kind) {}

  Eigen::Index dimension() const { return coordinates.size(); }
  double norm() const { return vector_norm(coordinates, norm_kind); }
};

/// Catalog name and numeric parameters of a serializable nonlinearity.
struct NonlinearDescriptor {
  std::string name;
  std::map<std::string, double> parameters;
};

/// A smooth (or Lipschitz) map R^n -> R^n with an optional analytic Jacobian.
/// Without one, the Jacobian is taken by central differences with step
/// 1e-6 * (1 + ||x||).
class NonlinearMap {
 public:
  using Evaluator = std::function<Vector(const Vector&)>;
  using JacobianFn = std::function<Matrix(const Vector&)>;

  NonlinearMap() = default;
  NonlinearMap(Eigen::Index dimension, Evaluator evaluator, JacobianFn jacobian = {},
               std::optional<double> lipschitz_hint = std::nullopt);

  static NonlinearMap zero(Eigen::Index dimension);

  Eigen::Index dimension() const { return dimension_; }
  Vector operator()(const Vector& x) const;
  Matrix jacobian(const Vector& x) const;
  Matrix finite_difference_jacobian(const Vector& x) const;

  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_); }
  bool is_zero() const { return zero_; }
  std::optional<double> lipschitz_hint() const { return lipschitz_hint_; }

  /// Radius of the ball outside of which the map is frozen along rays, when
  /// it was produced by radial truncation.
  std::optional<double> truncation_radius() const { return truncation_radius_; }

  const std::optional<NonlinearDescriptor>& descriptor() const { return descriptor_; }
  NonlinearMap& set_descriptor(NonlinearDescriptor d) {
    descriptor_ = std::move(d);
    return *this;
  }
  NonlinearMap& set_truncation_radius(double r0) {
    truncation_radius_ = r0;
    return *this;
  }

 private:
  Eigen::Index dimension_ = 0;
  Evaluator evaluator_;
  JacobianFn jacobian_;
  std::optional<double> lipschitz_hint_;
  std::optional<double> truncation_radius_;
  std::optional<NonlinearDescriptor> descriptor_;
  bool zero_ = false;
};

enum class ModelKind { dense_matrix, spectral_diagonal, delay_generator, semilinear_composite };

std::string_view to_string(ModelKind kind);

/// Immutable description of a (possibly unbounded, possibly nonlinear)
/// operator. Every module consumes operators through this type.
class OperatorModel {
 public:
  static OperatorModel dense(Matrix entries, NormKind norm = NormKind::euclidean);
  /// Eigenvalues are stored sorted descending.
  static OperatorModel spectral_diagonal(Vector eigenvalues);
  /// x'(t) = a x(t-1) on C([-1,0]) sampled at grid_size + 1 uniform points.
  static OperatorModel delay_generator(double a, int grid_size);
  static OperatorModel semilinear(OperatorModel linear, NonlinearMap nonlinearity);

  ModelKind kind() const;
  Eigen::Index dimension() const;
  NormKind norm_kind() const;
  /// Dense and diagonal models; these admit materialize().
  bool is_bounded() const;
  bool is_linear() const { return kind() != ModelKind::semilinear_composite; }

  const Matrix& entries() const;
  const Vector& eigenvalues() const;
  double delay_coefficient() const;
  int grid_size() const;
  const OperatorModel& linear_part() const;
  const NonlinearMap& nonlinearity() const;

  /// The matrix of a bounded model. Throws UnboundedModel otherwise.
  Matrix materialize() const;

 private:
  struct Dense {
    Matrix entries;
    NormKind norm;
  };
  struct Diagonal {
    Vector eigenvalues;
  };
  struct Delay {
    double a;
    int grid;
  };
  struct Semilinear {
    std::shared_ptr<const OperatorModel> linear;
    NonlinearMap nonlinearity;
  };

  using Variant = std::variant<Dense, Diagonal, Delay, Semilinear>;
  explicit OperatorModel(Variant v) : model_(std::move(v)) {}

  Variant model_;
};

/// a + scale * b for bounded models, as a dense model in a's norm.
OperatorModel add(const OperatorModel& a, const OperatorModel& b, double scale = 1.0);

/// Image A x. DelayGenerator rows use fourth-order finite differences on
/// [-1,0) and a * phi(-1) in the last row.
VectorState apply(const OperatorModel& op, const VectorState& x);

/// Solves (lambda I - A) x = y.
VectorState resolvent(const OperatorModel& op, double lambda, const VectorState& y);

/// R(lambda, A) as a matrix (columns are images of unit vectors / hat functions).
Matrix resolvent_matrix(const OperatorModel& op, double lambda);

double operator_norm(const OperatorModel& op);

std::vector<Complex> spectrum(const OperatorModel& op);

struct EigenPair {
  Complex value;
  ComplexVector vector;
  double residual;  // ||A v - lambda v|| / ||v||
};

/// Eigenpairs in the same order as spectrum(), with residuals.
std::vector<EigenPair> spectrum_pairs(const OperatorModel& op);

}  // namespace ylab
