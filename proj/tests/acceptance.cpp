// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ylab/dichotomy.hpp"
#include "ylab/manifolds.hpp"
#include "ylab/nonlinear.hpp"
#include "ylab/scenario.hpp"
#include "ylab/semigroup.hpp"
#include "ylab/yosida.hpp"

using namespace ylab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [failed: " << what << "]";
    }
  }
};

Matrix normal_matrix(Eigen::Index n, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = scale * g(gen);
  return m;
}

double two_norm(const Matrix& m) { return Eigen::JacobiSVD<Matrix>(m).singularValues()(0); }

OperatorModel diag(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  std::copy(d.begin(), d.end(), v.data());
  return OperatorModel::dense(v.asDiagonal().toDenseMatrix());
}

void bounded_oracle(Outcome& o) {
  double worst = 0;
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::mt19937_64 gen(1000 + trial);
    const Eigen::Index n = 2 + trial % 7;
    const Matrix a = normal_matrix(n, gen), b = normal_matrix(n, gen);
    const double exact = two_norm(a - b);
    const double err = std::abs(yosida_distance(OperatorModel::dense(a), OperatorModel::dense(b)).tail_sup - exact);
    worst = std::max(worst, err / (1 + exact));
    if (err > 1e-4 * (1 + exact)) ++violations;
  }
  o.note << "200 pairs, worst |tail_sup - ||A-B|||/(1+||A-B||) = " << worst;
  o.require(violations == 0, std::to_string(violations) + " violations");
}

void bounded_perturbation(Outcome& o) {
  int violations = 0;
  double lo = 1e300, hi = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::mt19937_64 gen(2000 + trial);
    const Eigen::Index n = 2 + trial % 5;
    Matrix a = normal_matrix(n, gen);
    const bool normal = trial % 2 == 0;
    if (normal) a = (a + a.transpose()).eval() / 2;
    const Matrix c = normal_matrix(n, gen, 0.3);
    const BoundCheckReport r = bounded_perturbation_bound_check(OperatorModel::dense(a), OperatorModel::dense(c));
    if (!r.pass) ++violations;
    if (normal) {
      const double ratio = r.d_estimate / two_norm(c);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  o.note << "100 trials, " << violations << " violations; normal-A ratio d_Y/||C|| in [" << lo << ", " << hi << "]";
  o.require(violations == 0, "inequality violated");
  o.require(lo >= 0.99 && hi <= 1.01, "ratio outside [0.99, 1.01]");
}

void delay_example(Outcome& o) {
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{1, 0}, {0.5, -0.5}, {2, 1}}) {
    const double d = yosida_distance(OperatorModel::delay_generator(a, 256), OperatorModel::delay_generator(b, 256)).estimate;
    const double gap = std::abs(a - b);
    o.note << "(" << a << "," << b << "): d_Y = " << d << "  ";
    o.require(d <= 2 * gap, "d_Y > 2|a-b|");
    o.require(d >= 0.9 * gap && d <= 1.1 * gap, "d_Y outside [0.9, 1.1] |a-b|");
  }
}

void closeness(Outcome& o) {
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::mt19937_64 gen(4000 + trial);
    const Eigen::Index n = 2 + trial % 4;
    const Matrix a = normal_matrix(n, gen, 0.7);
    Matrix d = normal_matrix(n, gen);
    d *= std::uniform_real_distribution<double>(0.0, 0.2)(gen) / two_norm(d);
    for (double t : {0.5, 1.0}) {
      if (!closeness_bound_check(OperatorModel::dense(a), OperatorModel::dense(a + d), t).pass) ++violations;
    }
  }
  const OperatorModel a = diag({-1, 1});
  const ClosenessReport c = closeness_bound_check(a, diag({-0.9, 1.1}), 1.0);
  const double want = std::expm1(0.1) * std::exp(1.0);
  o.note << "200 checks, " << violations << " violations; commuting lhs - (e^0.1 - 1)e = " << c.lhs - want;
  o.require(violations == 0, "closeness inequality violated");
  o.require(std::abs(c.lhs - want) <= 1e-9 && c.pass, "commuting case");
}

bool brute_force_hyperbolic(const Matrix& m, double gap_tol) {
  for (const oracle::Cx& z : oracle::polynomial_roots(oracle::characteristic_polynomial(m))) {
    if (std::abs(std::abs(z) - 1.0) <= gap_tol) return false;
  }
  return true;
}

void hyperbolicity(Outcome& o) {
  int disagreements = 0, hyperbolic = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::mt19937_64 gen(5000 + trial);
    Matrix m = normal_matrix(6, gen, 1.0 / std::sqrt(6.0));
    if (trial % 5 == 0) {
      // Plant a rotation block with eigenvalues e^{+-i theta} on the unit circle.
      Matrix blocks = Matrix::Zero(6, 6);
      const double theta = std::uniform_real_distribution<double>(0.1, 3.0)(gen);
      blocks.topLeftCorner(2, 2) << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
      blocks.bottomRightCorner(4, 4) = normal_matrix(4, gen, 0.5);
      const Matrix v = normal_matrix(6, gen) + 3 * Matrix::Identity(6, 6);
      m = v * blocks * v.inverse();
    }
    const bool lib = check_hyperbolic(OperatorModel::dense(m), 1e-6);
    hyperbolic += lib ? 1 : 0;
    if (lib != brute_force_hyperbolic(m, 1e-6)) ++disagreements;
  }
  o.note << "500 maps (" << hyperbolic << " hyperbolic), " << disagreements << " disagreements; ";
  o.require(disagreements == 0, "check_hyperbolic disagrees with brute force");

  int empty_prefix = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::mt19937_64 gen(5500 + trial);
    const Matrix a = normal_matrix(3, gen);
    if (!check_hyperbolic(time_one_map(OperatorModel::dense(a)), 1e-6)) continue;
    Matrix d = normal_matrix(3, gen);
    d /= two_norm(d);
    const RoughnessReport r = roughness_sweep(OperatorModel::dense(a), OperatorModel::dense(d), {1e-4, 1e-3, 1e-2, 0.1, 1.0});
    if (r.persistent_prefix == 0) ++empty_prefix;
  }
  o.note << empty_prefix << " sweeps with empty prefix; ";
  o.require(empty_prefix == 0, "roughness sweep without persistent prefix");

  // diag(-1, 1) has M = 1, omega = 1 and spectral gap 1 - e^{-1}.
  const double floor = (1 - std::exp(-1.0)) / std::exp(4.0);
  int held = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::mt19937_64 gen(5800 + trial);
    Matrix d = normal_matrix(2, gen);
    d /= two_norm(d);
    const RoughnessReport r = roughness_sweep(diag({-1, 1}), OperatorModel::dense(d), {0.5 * floor, 0.99 * floor});
    bool ok = r.persistent_prefix == 2;
    for (const RoughnessRow& row : r.rows) ok = ok && row.d_yosida < floor;
    held += ok ? 1 : 0;
  }
  o.note << "persistence floor " << held << "/50";
  o.require(held == 50, "persistence floor");
}

OperatorModel scalar_cubic() {
  const NonlinearMap f(
      1, [](const Vector& x) { return Vector(-x.array().cube().matrix()); },
      [](const Vector& x) { return Matrix((-3 * x.array().square()).matrix().asDiagonal()); });
  return OperatorModel::semilinear(OperatorModel::dense(Matrix::Zero(1, 1)), f);
}

void crandall_liggett(Outcome& o) {
  double linear_err = 0;
  const OperatorModel minus_one = OperatorModel::dense(-Matrix::Identity(1, 1));
  for (int n : {1, 4, 16, 64, 256, 1024}) {
    for (double t : {0.5, 1.0, 2.0}) {
      const double got = crandall_liggett_evolve(minus_one, t, n, VectorState(Vector::Ones(1))).states.back().coordinates(0);
      linear_err = std::max(linear_err, std::abs(got - std::pow(1 + t / n, -n)));
    }
  }
  o.note << "linear max err " << linear_err << "; ";
  o.require(linear_err <= 1e-12, "linear case");

  const double exact = 1 / std::sqrt(3.0);  // (1 + 2t)^{-1/2} at t = 1
  std::vector<double> logn, logerr;
  for (int n = 8; n <= 512; n *= 2) {
    const double got = crandall_liggett_evolve(scalar_cubic(), 1.0, n, VectorState(Vector::Ones(1))).states.back().coordinates(0);
    logn.push_back(std::log(n));
    logerr.push_back(std::log(std::abs(got - exact)));
  }
  double mx = 0, my = 0;
  for (size_t i = 0; i < logn.size(); ++i) mx += logn[i] / logn.size(), my += logerr[i] / logn.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < logn.size(); ++i) sxy += (logn[i] - mx) * (logerr[i] - my), sxx += (logn[i] - mx) * (logn[i] - mx);
  const double order = -sxy / sxx;
  o.note << "cubic observed order " << order << "; ";
  o.require(order >= 0.9, "observed order < 0.9");

  const AccretivityCertificate c = accretivity_certificate(scalar_cubic(), 0.0, 1000, 2.0, 17);
  const Scenario saddle = load_scenario("saddle-quadratic");
  const AccretivityCertificate s = accretivity_certificate(truncated_system(saddle.system->model, saddle.system->r0),
                                                           saddle.system->omega, 1000, saddle.system->r0, 17);
  o.note << "certificate violations " << c.failures << " (cubic), " << s.failures << " (saddle)";
  o.require(c.failures == 0 && c.pass && s.failures == 0 && s.pass, "nonexpansiveness certificate");
}

void lip_phi(Outcome& o) {
  for (const char* name : {"saddle-quadratic", "heat-semilinear", "coupled-3d"}) {
    const Scenario s = load_scenario(name);
    const SystemSpec& sys = *s.system;
    const LipPhiReport r = lip_phi_estimate(truncated_system(sys.model, sys.r0), sys.omega, 1.0, sys.r0 / 2, 32, s.seed);
    o.note << name << ": " << r.lip_hat << " <= 1.05*" << r.bound << "  ";
    o.require(r.lip_hat <= r.bound * 1.05, name);
  }
}

void manifolds(Outcome& o) {
  const Scenario s = load_scenario("saddle-quadratic");
  const OperatorModel& model = s.system->model;
  const double r0 = s.system->r0, tol = 1e-10;
  const SemilinearSystem lin = SemilinearSystem::from(model);
  const DichotomySplit split =
      spectral_split(time_one_map(OperatorModel::dense(lin.jacobian(Vector::Zero(lin.dimension())))));

  const ManifoldGraph g = compute_unstable_manifold(model, r0, tol);
  double curve = 0;
  for (Eigen::Index a = 0; a < g.anchor_count(); ++a) {
    const Vector p = split.unstable_basis * g.anchor_grid.row(a).transpose() + split.stable_basis * g.values.row(a).transpose();
    if (std::abs(p(0)) <= 0.25 + 1e-12) curve = std::max(curve, std::abs(p(1) - p(0) * p(0) / 3));
  }
  o.note << "sup|Phi - x^2/3| = " << curve << ", residual " << g.invariance_residual << "; ";
  o.require(g.converged && curve <= 1e-3, "unstable curve");
  o.require(g.invariance_residual <= 1e-6, "invariance residual");

  const ManifoldGraph st = compute_stable_manifold(model, r0, tol);
  const double psi = st.values.cwiseAbs().maxCoeff();
  o.note << "sup|Psi| = " << psi << "; ";
  o.require(st.converged && psi <= 1e-6 && st.stable_membership.value_or(false), "stable graph");

  ManifoldOptions other;
  other.initial_values = random_lipschitz_values(g, 0.1, s.seed);
  const ManifoldGraph g2 = compute_unstable_manifold(model, r0, tol, other);
  const double dist = graph_distance(g, g2);
  o.note << "two initial graphs differ by " << dist << "; ";
  o.require(g2.converged && dist <= 1e-8, "uniqueness");

  const LipShrinkReport shrink = lip_shrink_study(model, {0.5, 0.25, 0.1, 0.05}, tol);
  o.note << "lip_Phi rows";
  for (const LipShrinkRow& row : shrink.rows) o.note << ' ' << row.lip_Phi;
  o.require(shrink.nonincreasing && shrink.pass, "lip_shrink rows");
}

void heat(Outcome& o) {
  for (const auto& [a, want] : std::vector<std::pair<double, int>>{{0.5, 16}, {-2.5, 15}, {-4.0, -1}}) {
    const SystemSpec spec = template_system("heat-semilinear", {{"a", a}, {"modes", 16}});
    const SemilinearSystem sys = SemilinearSystem::from(spec.model);
    const OperatorModel t1 = time_one_map(OperatorModel::dense(sys.jacobian(Vector::Zero(sys.dimension()))));
    try {
      const DichotomySplit split = spectral_split(t1);
      o.note << "a=" << a << ": stable_dim " << split.stable_dim << "  ";
      o.require(split.stable_dim == want, "a = " + std::to_string(a));
    } catch (const Error& e) {
      o.note << "a=" << a << ": " << ylab::to_string(e.code()) << "  ";
      o.require(want < 0 && e.code() == ErrorCode::NotHyperbolic, "a = " + std::to_string(a));
    }
  }
}

void determinism(Outcome& o) {
  for (const std::string& name : catalog_names()) {
    const Scenario s = load_scenario(name);
    const std::string first = report_body(run_scenario(s)).dump(2);
    const std::string second = report_body(run_scenario(s)).dump(2);
    o.note << name << (first == second ? " identical  " : " DIFFERS  ");
    o.require(first == second, name);
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "bounded-operator oracle", 60, bounded_oracle},
      {2, "bounded-perturbation bound", 60, bounded_perturbation},
      {3, "delay example", 120, delay_example},
      {4, "semigroup closeness", 60, closeness},
      {5, "hyperbolicity and roughness", 120, hyperbolicity},
      {6, "Crandall-Liggett", 120, crandall_liggett},
      {7, "Lipschitz-closeness bound", 300, lip_phi},
      {8, "manifolds", 300, manifolds},
      {9, "heat scenario", 30, heat},
      {10, "determinism", 30, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.note << " [exception: " << e.what() << "]";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(seconds <= c.budget, "runtime over " + std::to_string(static_cast<int>(c.budget)) + " s");
    if (!o.pass) ++failed;
    std::printf("%s %2d %-28s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, seconds, o.note.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
