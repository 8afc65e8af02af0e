#include "ylab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace ylab {

namespace {

// Moduli that agree to ~1e-10 are treated as ties so conjugate pairs and
// +-1 style spectra order deterministically.
double modulus_key(const Complex& z) { return std::round(std::abs(z) * 1e10) / 1e10; }
double part_key(double x) { return std::round(x * 1e10) / 1e10; }

}  // namespace

std::vector<Complex> sorted_eigenvalues(const Matrix& m) {
  std::vector<Complex> out;
  if (m.rows() == 0) return out;
  Eigen::EigenSolver<Matrix> es(m, false);
  const ComplexVector ev = es.eigenvalues();
  out.assign(ev.data(), ev.data() + ev.size());
  std::stable_sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    const double ma = modulus_key(a), mb = modulus_key(b);
    if (ma != mb) return ma > mb;
    const double ra = part_key(a.real()), rb = part_key(b.real());
    if (ra != rb) return ra > rb;
    return a.imag() > b.imag();
  });
  return out;
}

double spectral_abscissa(const Matrix& m) {
  if (m.rows() == 0) return 0;
  Eigen::EigenSolver<Matrix> es(m, false);
  return es.eigenvalues().real().maxCoeff();
}

double spectral_radius(const Matrix& m) {
  if (m.rows() == 0) return 0;
  Eigen::EigenSolver<Matrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace ylab
