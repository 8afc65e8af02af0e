#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "ylab/delay.hpp"
#include "ylab/random.hpp"
#include "ylab/semigroup.hpp"
#include "ylab/serialize.hpp"

using namespace ylab;

namespace {

Matrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  std::copy(d.begin(), d.end(), v.data());
  return v.asDiagonal();
}

Matrix rotation(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

}  // namespace

TEST(EvolveLinear, ZeroAndDiagonal) {
  const Vector x = Vector::LinSpaced(3, 1, 3);
  EXPECT_EQ(evolve_linear(OperatorModel::dense(Matrix::Zero(3, 3)), 2.5, VectorState(x)).coordinates, x);
  const Vector y = evolve_linear(OperatorModel::dense(diag({-1, 1})), 1.0, VectorState(Vector::Ones(2))).coordinates;
  EXPECT_NEAR(y(0), std::exp(-1.0), 1e-14);
  EXPECT_NEAR(y(1), std::exp(1.0), 1e-14);
}

TEST(EvolveLinear, MatrixExponentialMatchesTaylorOracle) {
  for (int trial = 0; trial < 10; ++trial) {
    Rng rng = make_stream(17, trial);
    const Matrix a = gaussian_matrix(5, 5, rng);
    const Matrix want = oracle::expm_taylor(a);
    EXPECT_LE((propagator(OperatorModel::dense(a), 1.0).matrix - want).norm(), 1e-12 * want.norm());
  }
}

TEST(EvolveLinear, DelayMatchesMethodOfSteps) {
  // psi(s) = 1 - s satisfies psi'(0) = a psi(-1) for a = -0.5, so it lies in the domain
  // and the Yosida levels converge like 1/mu.
  const int n = 128;
  const double a = -0.5;
  const OperatorModel op = OperatorModel::delay_generator(a, n);
  const Vector grid = delay_grid(n);
  const std::vector<double> offsets(grid.data(), grid.data() + grid.size());
  for (double t : {0.5, 1.0, 2.0}) {
    const Vector got = evolve_linear(op, t, VectorState((1 - grid.array()).matrix(), NormKind::sup)).coordinates;
    const auto want = oracle::delay_method_of_steps(a, [](double s) { return 1 - s; }, t, 1e-4, offsets);
    double err = 0;
    for (Eigen::Index j = 0; j <= n; ++j) err = std::max(err, std::abs(got(j) - want[static_cast<size_t>(j)]));
    EXPECT_LE(err, 1e-4) << "t = " << t;
  }
}

TEST(EvolveLinear, ConstantHistoryOutsideDomainIsRejected) {
  // psi == 1 violates psi'(0) = a psi(-1); e^{tA_mu} psi then converges only like mu^{-1/2}
  // and the levels 2^9, 2^10 differ by more than 1e-3.
  const int n = 128;
  try {
    evolve_linear(OperatorModel::delay_generator(-0.5, n), 1.0, VectorState(Vector::Ones(n + 1), NormKind::sup));
    FAIL() << "expected NonConvergentYosidaLimit";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConvergentYosidaLimit);
  }
}

TEST(EvolveLinear, DelayEigenfunctionEvolvesByExponential) {
  // e^{z s} with z = a e^{-z} is an eigenfunction of the generator; take a real root.
  const double a = -0.2;
  const double z = oracle::delay_characteristic_root(a, {-0.25, 0.0}).real();
  const int n = 128;
  const Vector grid = delay_grid(n);
  const Vector psi = (z * grid.array()).exp();
  const Vector got = evolve_linear(OperatorModel::delay_generator(a, n), 1.0, VectorState(psi, NormKind::sup)).coordinates;
  EXPECT_LE((got - std::exp(z) * psi).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(TimeOneMap, Examples) {
  EXPECT_EQ(time_one_map(OperatorModel::dense(Matrix::Zero(2, 2))).entries(), Matrix::Identity(2, 2));
  const Matrix t1 = time_one_map(OperatorModel::dense(diag({-2, 1}))).entries();
  EXPECT_NEAR(t1(0, 0), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(t1(1, 1), std::exp(1.0), 1e-14);
  EXPECT_EQ(t1(0, 1), 0.0);
}

TEST(TimeOneMap, DelayDominantEigenvalueMatchesCharacteristicRoot) {
  const double a = -1.7;
  const auto s = spectrum(time_one_map(OperatorModel::delay_generator(a, 96)));
  // Rightmost root of z = a e^{-z}: a complex pair for a < -1/e.
  const oracle::Cx root = oracle::delay_characteristic_root(a, {-0.3, 1.5});
  ASSERT_LT(std::abs(root - a * std::exp(-root)), 1e-12);
  const Complex expected = std::exp(root);
  EXPECT_NEAR(std::abs(s[0]), std::abs(expected), 1e-3);
  EXPECT_NEAR(std::min(std::abs(s[0] - expected), std::abs(s[0] - std::conj(expected))), 0.0, 1e-3);
}

TEST(GrowthEnvelope, Examples) {
  const GrowthEnvelope zero = growth_envelope(OperatorModel::dense(Matrix::Zero(2, 2)), 1.0);
  EXPECT_EQ(zero.M, 1.0);
  EXPECT_EQ(zero.omega, 0.0);

  const GrowthEnvelope normal = growth_envelope(OperatorModel::dense(diag({-1, 1})), 2.0);
  EXPECT_NEAR(normal.omega, 1.0, 1e-12);
  EXPECT_EQ(normal.M, 1.0);

  Matrix j(2, 2);
  j << 0, 4, 0, 0;
  const GrowthEnvelope jordan = growth_envelope(OperatorModel::dense(j), 2.0);
  EXPECT_EQ(jordan.omega, 0.0);
  // ||I + 4tE|| = 2t + sqrt(4t^2 + 1), largest at t = 2.
  const double peak = 4 + std::sqrt(17.0);
  EXPECT_GE(jordan.M, peak);
  EXPECT_LE(jordan.M, peak + 0.01);
  EXPECT_LE(jordan.sup_residual, 0.0);
}

TEST(GrowthEnvelope, HoldsOnDenserGrid) {
  for (int trial = 0; trial < 10; ++trial) {
    Rng rng = make_stream(23, trial);
    const OperatorModel a = OperatorModel::dense(gaussian_matrix(4, 4, rng));
    const GrowthEnvelope env = growth_envelope(a, 1.0);
    EXPECT_LE(envelope_violation(a, env, 1.0, 128), 1 + 1e-9);
    // M is the sampled sup rounded up to the 1e-2 grid.
    double raw = 0;
    for (size_t k = 0; k < env.norms.size(); ++k) raw = std::max(raw, env.norms[k] * std::exp(-env.omega * env.t_samples[k]));
    EXPECT_GE(env.M, raw * (1 - 1e-12));
    if (env.M > 1.0) EXPECT_LT(env.M - 0.01, raw);
  }
  const OperatorModel delay = OperatorModel::delay_generator(-0.5, 64);
  const GrowthEnvelope env = growth_envelope(delay, 1.0);
  EXPECT_LE(envelope_violation(delay, env, 1.0, 128), 1 + 1e-9);
}

TEST(Closeness, Examples) {
  const OperatorModel a = OperatorModel::dense(diag({-1, 1}));
  const ClosenessReport same = closeness_bound_check(a, a, 1.0);
  EXPECT_EQ(same.lhs, 0.0);
  EXPECT_TRUE(same.pass);

  const OperatorModel b = OperatorModel::dense(diag({-0.9, 1.1}));
  const ClosenessReport r = closeness_bound_check(a, b, 1.0);
  EXPECT_NEAR(r.lhs, std::expm1(0.1) * std::exp(1.0), 1e-9);
  // Common envelope: omega = max(1, 1.1).
  EXPECT_NEAR(r.omega, 1.1, 1e-12);
  EXPECT_EQ(r.M, 1.0);
  EXPECT_NEAR(r.rhs / (std::exp(4.4) * 0.1), 1.0, 1e-5);
  EXPECT_TRUE(r.pass);
}

TEST(Closeness, RandomPairs) {
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng = make_stream(29, trial);
    const Matrix a = gaussian_matrix(6, 6, rng) / std::sqrt(6.0);
    Matrix d = gaussian_matrix(6, 6, rng);
    d *= 0.2 * uniform(rng) / spectral_norm(d);
    for (double t : {0.5, 1.0}) {
      EXPECT_TRUE(closeness_bound_check(OperatorModel::dense(a), OperatorModel::dense(a + d), t).pass);
    }
  }
}

TEST(Nonautonomous, Examples) {
  const MatrixPath zero = [](double) { return Matrix::Zero(1, 1); };
  const NonautonomousReport same = nonautonomous_compare(zero, zero, Vector::Ones(1));
  EXPECT_EQ(same.deviation, 0.0);
  EXPECT_TRUE(same.pass);

  const MatrixPath eps = [](double) { return Matrix::Constant(1, 1, 0.1); };
  const NonautonomousReport r = nonautonomous_compare(zero, eps, Vector::Ones(1));
  EXPECT_NEAR(r.deviation, std::expm1(0.1), 1e-10);
  EXPECT_NEAR(r.omega, 0.1, 1e-15);
  EXPECT_NEAR(r.bound, std::exp(0.2) * 0.1, 1e-12);
  EXPECT_TRUE(r.pass);
}

TEST(Nonautonomous, RotatingFramePairs) {
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng = make_stream(37, trial);
    const Matrix a0 = gaussian_matrix(3, 3, rng);
    Matrix d = gaussian_matrix(3, 3, rng);
    d *= 0.05 / spectral_norm(d);
    auto frame = [](double t) {
      Matrix r = Matrix::Identity(3, 3);
      r.topLeftCorner(2, 2) = rotation(t);
      return r;
    };
    const MatrixPath a = [=](double t) { return Matrix(frame(t) * a0 * frame(t).transpose()); };
    const MatrixPath b = [=](double t) { return Matrix(frame(t) * (a0 + d) * frame(t).transpose()); };
    const NonautonomousReport r = nonautonomous_compare(a, b, gaussian_vector(3, rng));
    EXPECT_TRUE(r.pass) << r.deviation << " vs " << r.bound;
    EXPECT_NEAR(r.sup_difference, 0.05, 1e-12);
  }
}

TEST(Nonautonomous, StepSizeTooCoarse) {
  const MatrixPath stiff = [](double) { return Matrix::Constant(1, 1, -40.0); };
  try {
    nonautonomous_compare(stiff, stiff, Vector::Ones(1), 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepSizeTooCoarse);
  }
}

TEST(SemigroupProperties, SemigroupLawAndIdentityAtZero) {
  Rng rng = make_stream(43);
  const OperatorModel a = OperatorModel::dense(gaussian_matrix(5, 5, rng));
  EXPECT_EQ(propagator(a, 0.0).matrix, Matrix::Identity(5, 5));
  EXPECT_EQ(propagator(a, 0.0).scheme, Scheme::matrix_exponential);
  for (double t : {0.25, 0.5, 1.0})
    for (double s : {0.25, 0.5, 1.0}) {
      const Matrix lhs = propagator(a, t + s).matrix;
      EXPECT_LE((lhs - propagator(a, t).matrix * propagator(a, s).matrix).norm(), 1e-9 * std::max(1.0, lhs.norm()));
    }
}

TEST(SemigroupProperties, YosidaLimitConsistencyOnBoundedModels) {
  for (int trial = 0; trial < 5; ++trial) {
    Rng rng = make_stream(47, trial);
    const OperatorModel a = OperatorModel::dense(gaussian_matrix(4, 4, rng));
    const Matrix exact = propagator(a, 1.0).matrix;
    // Raw levels improve monotonically, at first order in 1/mu.
    std::vector<Matrix> levels;
    double previous = std::numeric_limits<double>::infinity();
    for (double mu : {64.0, 128.0, 256.0, 512.0, 1024.0}) {
      levels.push_back(yosida_semigroup(a, 1.0, mu));
      const double err = (levels.back() - exact).norm();
      EXPECT_LT(err, previous);
      previous = err;
    }
    // The extrapolated limit from the levels up to 2^10.
    const Matrix limit = (8 * levels[4] - 6 * levels[3] + levels[2]) / 3;
    EXPECT_LE((limit - exact).norm(), 1e-3 * exact.norm());
  }
}

TEST(SemigroupProperties, DelaySeriesMatchesDirectPropagator) {
  const OperatorModel op = OperatorModel::delay_generator(-1.0, 48);
  const auto series = propagator_series(op, 0.25, 5);
  EXPECT_EQ(series[0].matrix, Matrix::Identity(49, 49));
  const Matrix direct = propagator(op, 1.0).matrix;
  EXPECT_LE(sup_norm((series[4].matrix - direct).eval()), 1e-8);
  EXPECT_EQ(series[4].scheme, Scheme::yosida_limit);
}

TEST(Trajectory, CsvExport) {
  TrajectoryRecord r;
  r.times = {0.0, 0.5};
  r.states = {VectorState(Vector::Ones(2)), VectorState(Vector::Zero(2))};
  EXPECT_EQ(trajectory_csv(r), "t,x_1,x_2\n0,1,1\n0.5,0,0\n");
  EXPECT_EQ(to_string(Scheme::crandall_liggett, 64), "crandall_liggett(64)");
}
