#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace ylab {

/// Norm attached to a phase space: euclidean for matrix models, sup for
/// sampled C([-1,0]) states.
enum class NormKind { euclidean, sup };

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

template <typename Derived>
typename Derived::RealScalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  if (m.size() == 0) return 0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::BDCSVD<Plain> svd(m.eval());
  return svd.singularValues()(0);
}

/// Induced sup-operator norm: the maximum absolute row sum.
template <typename Derived>
typename Derived::RealScalar sup_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

template <typename Derived>
typename Derived::RealScalar matrix_norm(const Eigen::MatrixBase<Derived>& m, NormKind kind) {
  return kind == NormKind::euclidean ? spectral_norm(m) : sup_norm(m);
}

template <typename Derived>
typename Derived::RealScalar vector_norm(const Eigen::MatrixBase<Derived>& v, NormKind kind) {
  if (v.size() == 0) return 0;
  return kind == NormKind::euclidean ? v.norm() : v.template lpNorm<Eigen::Infinity>();
}

/// Matrix exponential by Pade scaling and squaring.
template <typename Derived>
typename Derived::PlainObject expm(const Eigen::MatrixBase<Derived>& m) {
  typename Derived::PlainObject out = m.eval().exp();
  return out;
}

/// Largest eigenvalue of the symmetric part; bounds d/dt log ||x(t)|| for x' = Ax.
template <typename Derived>
typename Derived::RealScalar logarithmic_norm(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  Plain sym = (m + m.transpose()) / 2;
  Eigen::SelfAdjointEigenSolver<Plain> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Eigenvalues sorted by modulus descending, ties broken by real part then
/// imaginary part descending.
std::vector<Complex> sorted_eigenvalues(const Matrix& m);

/// max Re(lambda) over the spectrum.
double spectral_abscissa(const Matrix& m);

/// max |lambda| over the spectrum.
double spectral_radius(const Matrix& m);

/// Identity-or-empty safe check that every entry is finite.
template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace ylab
