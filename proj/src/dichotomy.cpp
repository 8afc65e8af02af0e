#include "ylab/dichotomy.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ylab/semigroup.hpp"
#include "ylab/serialize.hpp"
#include "ylab/yosida.hpp"

namespace ylab {

namespace {

// Plane rotation [c s; -conj(s) c] zeroing g in (f, g).
void make_rotation(const Complex& f, const Complex& g, double& c, Complex& s) {
  if (g == Complex(0)) {
    c = 1;
    s = 0;
    return;
  }
  if (f == Complex(0)) {
    c = 0;
    s = std::conj(g) / std::abs(g);
    return;
  }
  const double af = std::abs(f);
  const double nrm = std::hypot(af, std::abs(g));
  c = af / nrm;
  s = (f / af) * std::conj(g) / nrm;
}

void rotate(Complex& x, Complex& y, double c, const Complex& s) {
  const Complex tx = c * x + s * y;
  y = c * y - std::conj(s) * x;
  x = tx;
}

// Exchanges the adjacent diagonal entries k, k+1 of the triangular factor.
void swap_adjacent(ComplexMatrix& t, ComplexMatrix& u, Eigen::Index k) {
  const Eigen::Index n = t.rows();
  const Complex t11 = t(k, k), t22 = t(k + 1, k + 1);
  double c;
  Complex s;
  make_rotation(t(k, k + 1), t22 - t11, c, s);
  for (Eigen::Index j = k + 2; j < n; ++j) rotate(t(k, j), t(k + 1, j), c, s);
  for (Eigen::Index i = 0; i < k; ++i) rotate(t(i, k), t(i, k + 1), c, std::conj(s));
  t(k, k) = t22;
  t(k + 1, k + 1) = t11;
  for (Eigen::Index i = 0; i < n; ++i) rotate(u(i, k), u(i, k + 1), c, std::conj(s));
}

// Orthonormal basis of the column space of m with rank r, columns signed so
// their largest-magnitude entry is positive.
Matrix column_basis(const Matrix& m, int rank) {
  const Eigen::Index n = m.rows();
  if (rank == 0) return Matrix(n, 0);
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(n, rank);
  for (int j = 0; j < rank; ++j) {
    Eigen::Index arg;
    q.col(j).cwiseAbs().maxCoeff(&arg);
    if (q(arg, j) < 0) q.col(j) *= -1;
  }
  return q;
}

}  // namespace

OrderedSchur ordered_schur(const Matrix& a, const std::function<bool(const Complex&)>& select) {
  Eigen::ComplexSchur<ComplexMatrix> schur(a.cast<Complex>());
  OrderedSchur out{schur.matrixT(), schur.matrixU(), 0};
  const Eigen::Index n = a.rows();
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      if (!select(out.T(k, k)) && select(out.T(k + 1, k + 1))) {
        swap_adjacent(out.T, out.U, k);
        swapped = true;
      }
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) out.selected += select(out.T(k, k)) ? 1 : 0;
  return out;
}

bool check_hyperbolic(const OperatorModel& t1, double gap_tol) {
  require(gap_tol > 0 && gap_tol < 0.5, ErrorCode::InvalidArgument, "gap_tol must lie in (0, 0.5)");
  for (const Complex& z : spectrum(t1)) {
    if (std::abs(std::abs(z) - 1.0) <= gap_tol) return false;
  }
  return true;
}

DichotomySplit spectral_split(const OperatorModel& t1, double gap_tol) {
  if (!check_hyperbolic(t1, gap_tol)) throw Error(ErrorCode::NotHyperbolic, "time-1 map has spectrum on the unit circle");
  const Matrix t = t1.materialize();
  const Eigen::Index n = t.rows();

  const OrderedSchur schur = ordered_schur(t, [](const Complex& z) { return std::abs(z) < 1.0; });
  const int k = schur.selected;
  const Eigen::Index m = n - k;

  // Block-diagonalize: T11 Y - Y T22 = -T12 gives P = U [I -Y; 0 0] U^*.
  ComplexMatrix ps = ComplexMatrix::Zero(n, n);
  ps.topLeftCorner(k, k).setIdentity();
  if (k > 0 && m > 0) {
    const ComplexMatrix t11 = schur.T.topLeftCorner(k, k);
    const ComplexMatrix t12 = schur.T.topRightCorner(k, m);
    const ComplexMatrix t22 = schur.T.bottomRightCorner(m, m);
    ComplexMatrix y(k, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      ComplexVector rhs = -t12.col(j);
      for (Eigen::Index i = 0; i < j; ++i) rhs += y.col(i) * t22(i, j);
      ComplexMatrix shifted = t11;
      shifted.diagonal().array() -= t22(j, j);
      y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
    }
    ps.topRightCorner(k, m) = -y;
  }
  DichotomySplit split;
  split.projection = (schur.U * ps * schur.U.adjoint()).real();
  split.stable_dim = k;
  split.condition = spectral_norm(split.projection);
  if (!(split.condition <= 1e8)) {
    throw Error(ErrorCode::IllConditionedSplit, "||P|| = " + std::to_string(split.condition));
  }

  split.inner_radius = 0;
  split.outer_radius = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = std::abs(schur.T(i, i));
    if (i < k) split.inner_radius = std::max(split.inner_radius, r);
    else split.outer_radius = std::min(split.outer_radius, r);
  }

  const Matrix id = Matrix::Identity(n, n);
  split.stable_basis = column_basis(split.projection, k);
  split.unstable_basis = column_basis(id - split.projection, static_cast<int>(m));

  double beta = std::numeric_limits<double>::infinity();
  if (k > 0) beta = std::min(beta, -std::log(std::max(split.inner_radius, 1e-300)));
  if (m > 0) beta = std::min(beta, std::log(split.outer_radius));
  split.beta = beta;

  double prefactor = 1.0;
  Matrix forward = split.projection;
  Matrix backward = id - split.projection;
  Matrix inverse_on_unstable;
  if (m > 0) {
    const Matrix& vu = split.unstable_basis;
    const Matrix gu = vu.transpose() * t * vu;
    inverse_on_unstable = vu * gu.inverse() * vu.transpose();
  }
  for (int step = 0; step <= 8; ++step) {
    const double weight = std::exp(beta * step);
    if (k > 0) prefactor = std::max(prefactor, spectral_norm(forward) * weight);
    if (m > 0) prefactor = std::max(prefactor, spectral_norm(backward) * weight);
    if (k > 0) forward = t * forward;
    if (m > 0) backward = inverse_on_unstable * backward;
  }
  split.N = prefactor;
  return split;
}

Matrix riesz_projection_contour(const Matrix& t1, double radius, int nodes) {
  const Eigen::Index n = t1.rows();
  const ComplexMatrix tc = t1.cast<Complex>();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < nodes; ++j) {
    const double theta = 2 * std::numbers::pi * j / nodes;
    const Complex z = std::polar(radius, theta);
    // dz = i z dtheta; the 1/(2 pi i) and dtheta = 2 pi / nodes leave z / nodes.
    sum += (z / static_cast<double>(nodes)) * (z * id - tc).partialPivLu().solve(id);
  }
  return sum.real();
}

RoughnessReport roughness_sweep(const OperatorModel& a, const OperatorModel& direction,
                                const std::vector<double>& eps_list, double gap_tol) {
  require(direction.is_bounded(), ErrorCode::UnboundedModel, "perturbation direction must be bounded");
  require(std::abs(operator_norm(direction) - 1.0) <= 1e-9, ErrorCode::InvalidArgument,
          "perturbation direction must have unit norm");
  if (!check_hyperbolic(time_one_map(a), gap_tol)) {
    throw Error(ErrorCode::BaseNotHyperbolic, "base semigroup is not hyperbolic");
  }
  RoughnessReport report;
  report.rows.resize(eps_list.size());
  for (size_t i = 0; i < eps_list.size(); ++i) {
    RoughnessRow& row = report.rows[i];
    row.eps = eps_list[i];
    const OperatorModel b = add(a, direction, row.eps);
    row.d_yosida = yosida_distance(a, b).tail_sup;
    const OperatorModel t1 = time_one_map(b);
    row.hyperbolic = check_hyperbolic(t1, gap_tol);
    row.gap_inner = 0;
    row.gap_outer = std::numeric_limits<double>::infinity();
    row.stable_dim = 0;
    for (const Complex& z : spectrum(t1)) {
      const double r = std::abs(z);
      if (r < 1.0 - gap_tol) {
        row.gap_inner = std::max(row.gap_inner, r);
        ++row.stable_dim;
      } else if (r > 1.0 + gap_tol) {
        row.gap_outer = std::min(row.gap_outer, r);
      }
    }
  }
  for (const RoughnessRow& row : report.rows) {
    if (!row.hyperbolic) break;
    ++report.persistent_prefix;
    report.eps_star = row.eps;
  }
  report.persistent = report.persistent_prefix > 0;
  return report;
}

std::string roughness_csv(const RoughnessReport& report) {
  std::ostringstream out;
  out << "eps,d_Y,hyperbolic,gap_inner,gap_outer,stable_dim\n";
  for (const RoughnessRow& row : report.rows) {
    out << format_number(row.eps) << ',' << format_number(row.d_yosida) << ',' << (row.hyperbolic ? 1 : 0) << ','
        << format_number(row.gap_inner) << ',' << format_number(row.gap_outer) << ',' << row.stable_dim << '\n';
  }
  return out.str();
}

}  // namespace ylab
