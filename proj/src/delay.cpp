#include "ylab/delay.hpp"

#include <array>
#include <cmath>

namespace ylab {

namespace {

// g_k(z) = int_0^1 e^{-z u} u^k du for k = 0..3. Power series for small z,
// where the closed forms cancel; upward recurrence otherwise.
std::array<double, 4> exponential_moments(double z) {
  std::array<double, 4> g{};
  if (z < 2.0) {
    for (int k = 0; k < 4; ++k) {
      double term = 1.0, sum = 0.0;
      for (int m = 0; m < 60; ++m) {
        if (m > 0) term *= -z / m;
        sum += term / (m + k + 1);
        if (std::abs(term) < 1e-18) break;
      }
      g[static_cast<size_t>(k)] = sum;
    }
    return g;
  }
  const double em = std::exp(-z);
  g[0] = -std::expm1(-z) / z;
  for (int k = 1; k < 4; ++k) g[static_cast<size_t>(k)] = (k * g[static_cast<size_t>(k - 1)] - em) / z;
  return g;
}

// Weights w such that int_{t_j}^{t_j + h} e^{-lambda (s - t_j)} p(s) ds = sum_i w_i psi(t_j + offset_i h),
// p the cubic through the four nodes at the given offsets.
Eigen::Vector4d cell_weights(const std::array<double, 4>& g, double h, std::array<int, 4> offsets) {
  Eigen::Matrix4d v;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) v(i, k) = std::pow(static_cast<double>(offsets[static_cast<size_t>(i)]), k);
  const Eigen::Vector4d gv(g[0], g[1], g[2], g[3]);
  return h * v.transpose().partialPivLu().solve(gv);
}

void require_grid(int grid_size) {
  require(grid_size >= 8, ErrorCode::InvalidArgument, "delay grid size must be >= 8");
}

}  // namespace

Vector delay_grid(int grid_size) {
  require_grid(grid_size);
  Vector t(grid_size + 1);
  for (int j = 0; j <= grid_size; ++j) t(j) = -1.0 + static_cast<double>(j) / grid_size;
  t(grid_size) = 0.0;
  return t;
}

Matrix delay_generator_matrix(double a, int grid_size) {
  require_grid(grid_size);
  const int n = grid_size;
  const double inv12h = n / 12.0;
  Matrix d = Matrix::Zero(n + 1, n + 1);
  auto set = [&](int row, int first, std::initializer_list<double> coeffs) {
    int col = first;
    for (double c : coeffs) d(row, col++) = c * inv12h;
  };
  set(0, 0, {-25, 48, -36, 16, -3});
  set(1, 0, {-3, -10, 18, -6, 1});
  for (int j = 2; j <= n - 2; ++j) set(j, j - 2, {1, -8, 0, 8, -1});
  set(n - 1, n - 4, {-1, 6, -18, 10, 3});
  d(n, 0) = a;
  return d;
}

Vector delay_resolvent(double a, double lambda, const Vector& psi) {
  const Eigen::Index size = psi.size();
  require(size >= 9, ErrorCode::InvalidArgument, "delay state needs at least 9 samples");
  require(lambda > 0, ErrorCode::InvalidArgument, "delay resolvent requires lambda > 0");
  const int n = static_cast<int>(size) - 1;
  const double den = lambda - a * std::exp(-lambda);
  if (!(std::abs(den) >= 1e-12)) {
    throw Error(ErrorCode::SingularPrefactor, "|lambda - a e^{-lambda}| < 1e-12");
  }
  const double h = 1.0 / n;
  const auto g = exponential_moments(lambda * h);
  const Eigen::Vector4d first = cell_weights(g, h, {0, 1, 2, 3});
  const Eigen::Vector4d inner = cell_weights(g, h, {-1, 0, 1, 2});
  const Eigen::Vector4d last = cell_weights(g, h, {-2, -1, 0, 1});
  const double decay = std::exp(-lambda * h);

  // I_j = int_{t_j}^0 e^{-lambda (s - t_j)} psi(s) ds, accumulated from the right.
  Vector running(n + 1);
  running(n) = 0.0;
  for (int j = n - 1; j >= 0; --j) {
    double cell;
    if (j == 0) {
      cell = first.dot(psi.segment<4>(0));
    } else if (j == n - 1) {
      cell = last.dot(psi.segment<4>(n - 3));
    } else {
      cell = inner.dot(psi.segment<4>(j - 1));
    }
    running(j) = cell + decay * running(j + 1);
  }
  const double tail = (a * running(0) + psi(n)) / den;
  Vector x(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double t = -1.0 + static_cast<double>(j) * h;
    x(j) = running(j) + std::exp(lambda * (j == n ? 0.0 : t)) * tail;
  }
  if (!x.allFinite()) throw Error(ErrorCode::NonFiniteResult, "delay resolvent overflowed");
  return x;
}

VectorState delay_resolvent(double a, double lambda, const VectorState& psi) {
  return VectorState(delay_resolvent(a, lambda, psi.coordinates), NormKind::sup);
}

Matrix delay_resolvent_matrix(double a, double lambda, int grid_size) {
  require_grid(grid_size);
  const int n = grid_size;
  Matrix r(n + 1, n + 1);
  Vector e = Vector::Zero(n + 1);
  for (int k = 0; k <= n; ++k) {
    e(k) = 1.0;
    r.col(k) = delay_resolvent(a, lambda, e);
    e(k) = 0.0;
  }
  return r;
}

}  // namespace ylab
