#include "ylab/scenario.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "ylab/dichotomy.hpp"
#include "ylab/manifolds.hpp"
#include "ylab/nonlinear.hpp"
#include "ylab/random.hpp"
#include "ylab/semigroup.hpp"
#include "ylab/yosida.hpp"

namespace ylab {

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

Json catalog_doc(const std::string& name) {
  if (name == "matrix-suite") {
    return Json{{"schema", 1},
                {"name", name},
                {"seed", 7},
                {"parameters", {{"trials", 40}}},
                {"checks",
                 Json::array({"bounded_oracle", "bounded_perturbation", "normal_ratio", "relative_bound", "closeness",
                  "closeness_commuting", "roughness"})}};
  }
  if (name == "delay-example") {
    return Json{{"schema", 1},
                {"name", name},
                {"seed", 7},
                {"parameters", {{"grid_size", 256}}},
                {"checks", Json::array({"delay_distance"})}};
  }
  if (name == "saddle-quadratic") {
    return Json{{"schema", 1},
                {"name", name},
                {"template", "saddle-quadratic"},
                {"seed", 7},
                {"parameters", {{"r0", 0.5}, {"omega", 3.0}, {"expected_stable_dim", 1}}},
                {"tolerances", {{"manifold", 1e-10}}},
                {"checks",
                 Json::array({"dichotomy", "accretivity", "crandall_liggett", "lip_phi", "unstable_manifold", "saddle_curve",
                  "stable_manifold", "lip_shrink"})}};
  }
  if (name == "heat-semilinear") {
    return Json{{"schema", 1},
                {"name", name},
                {"template", "heat-semilinear"},
                {"seed", 7},
                {"parameters", {{"a", 0.5}, {"modes", 16}, {"r0", 1.0}, {"expected_stable_dim", 16}}},
                {"checks", Json::array({"dichotomy", "accretivity", "crandall_liggett", "lip_phi"})}};
  }
  if (name == "coupled-3d") {
    return Json{{"schema", 1},
                {"name", name},
                {"template", "coupled-3d"},
                {"seed", 7},
                {"parameters", {{"r0", 0.3}, {"omega", 2.5}, {"expected_stable_dim", 2}}},
                {"tolerances", {{"manifold", 1e-10}}},
                {"checks", Json::array({"dichotomy", "accretivity", "lip_phi", "unstable_manifold", "coupled_curve"})}};
  }
  throw Error(ErrorCode::ParseError, "unknown scenario '" + name + "'");
}

// Checks that need a system declaration.
const std::set<std::string> kSystemChecks = {"dichotomy",         "accretivity",  "crandall_liggett", "lip_phi",
                                             "unstable_manifold", "saddle_curve", "coupled_curve",    "stable_manifold",
                                             "lip_shrink"};

const std::vector<std::string> kChecks = {
    "bounded_oracle", "bounded_perturbation", "normal_ratio",     "relative_bound", "closeness",
    "closeness_commuting", "roughness",       "delay_distance",   "dichotomy",      "accretivity",
    "crandall_liggett", "lip_phi",            "unstable_manifold", "saddle_curve",  "coupled_curve",
    "stable_manifold",  "lip_shrink"};

}  // namespace

std::vector<std::string> catalog_names() {
  return {"matrix-suite", "delay-example", "saddle-quadratic", "heat-semilinear", "coupled-3d"};
}

std::vector<std::string> known_checks() { return kChecks; }

Json catalog_scenario_json(const std::string& name) { return catalog_doc(name); }

SystemSpec template_system(const std::string& name, const std::map<std::string, double>& p) {
  if (name == "saddle-quadratic") {
    Vector l(2);
    l << 1.0, -1.0;
    OperatorModel linear = OperatorModel::dense(l.asDiagonal().toDenseMatrix());
    NonlinearMap f = make_nonlinearity({"saddle_quadratic", {}}, 2);
    return {OperatorModel::semilinear(std::move(linear), std::move(f)), param(p, "omega", 3.0), param(p, "r0", 0.5)};
  }
  if (name == "heat-semilinear") {
    const double a = param(p, "a", 0.5);
    const int modes = static_cast<int>(param(p, "modes", 16));
    if (modes < 1 || modes > 16) throw Error(ErrorCode::ParseError, "heat-semilinear supports 1..16 modes");
    Vector eig(modes);
    for (int k = 1; k <= modes; ++k) eig(k - 1) = -static_cast<double>(k * k) - a;
    // Lip(sin u - u) <= 2 plus the nonnegative part of the linear spectrum.
    const double omega = param(p, "omega", 2.0 + std::max(0.0, eig.maxCoeff()));
    NonlinearMap f = make_nonlinearity({"sine_minus_identity", {}}, modes);
    return {OperatorModel::semilinear(OperatorModel::spectral_diagonal(eig), std::move(f)), omega, param(p, "r0", 1.0)};
  }
  if (name == "coupled-3d") {
    Vector l(3);
    l << -1.0, -2.0, 1.0;
    OperatorModel linear = OperatorModel::dense(l.asDiagonal().toDenseMatrix());
    NonlinearMap f = make_nonlinearity({"coupled_quadratic", {}}, 3);
    return {OperatorModel::semilinear(std::move(linear), std::move(f)), param(p, "omega", 2.5), param(p, "r0", 0.3)};
  }
  throw Error(ErrorCode::ParseError, "unknown template '" + name + "'");
}

Scenario scenario_from_json(const Json& doc) {
  try {
    if (!doc.is_object()) throw Error(ErrorCode::ParseError, "scenario must be an object");
    if (!doc.contains("schema") || doc["schema"] != 1) throw Error(ErrorCode::ParseError, "scenario schema must be 1");
    Scenario s;
    s.name = doc.at("name").get<std::string>();
    if (s.name.empty()) throw Error(ErrorCode::ParseError, "scenario name is empty");
    if (!doc.contains("seed") || !doc["seed"].is_number_integer()) {
      throw Error(ErrorCode::ParseError, "scenario must declare an integer seed");
    }
    s.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("parameters")) {
      for (const auto& [k, v] : doc["parameters"].items()) s.parameters[k] = number_from_json(v);
    }
    if (doc.contains("tolerances")) {
      for (const auto& [k, v] : doc["tolerances"].items()) s.tolerances[k] = number_from_json(v);
    }
    for (const auto& c : doc.at("checks")) {
      const std::string id = c.get<std::string>();
      if (std::find(kChecks.begin(), kChecks.end(), id) == kChecks.end()) {
        throw Error(ErrorCode::ParseError, "unknown check id '" + id + "'");
      }
      s.checks.push_back(id);
    }
    if (doc.contains("template")) {
      s.template_name = doc["template"].get<std::string>();
      s.system = template_system(s.template_name, s.parameters);
    } else if (doc.contains("system")) {
      const Json& sys = doc["system"];
      s.system = SystemSpec{operator_from_json(sys.at("operator")), number_from_json(sys.at("omega")),
                            number_from_json(sys.at("r0"))};
    }
    for (const std::string& id : s.checks) {
      if (kSystemChecks.count(id) && !s.system) {
        throw Error(ErrorCode::ParseError, "check '" + id + "' needs a system declaration");
      }
    }
    if ((std::count(s.checks.begin(), s.checks.end(), "saddle_curve") && s.template_name != "saddle-quadratic") ||
        (std::count(s.checks.begin(), s.checks.end(), "coupled_curve") && s.template_name != "coupled-3d")) {
      throw Error(ErrorCode::ParseError, "exact-curve checks need their template");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

Scenario load_scenario(const std::string& name_or_path) {
  const auto names = catalog_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
    return scenario_from_json(catalog_doc(name_or_path));
  }
  return scenario_from_json(read_json_file(name_or_path));
}

namespace {

struct RunContext {
  const Scenario& s;
  VerificationReport& report;
  std::optional<ManifoldGraph> unstable;  // shared by the manifold checks

  double tol(const std::string& key, double fallback) const { return param(s.tolerances, key, fallback); }
  int count(const std::string& key, int fallback) const {
    return static_cast<int>(param(s.parameters, key, fallback));
  }
  const SystemSpec& system() const { return *s.system; }
  OperatorModel truncated() const { return truncated_system(system().model, system().r0); }

  const ManifoldGraph& unstable_manifold() {
    if (!unstable) {
      unstable = compute_unstable_manifold(system().model, system().r0, tol("manifold", 1e-10));
      report.sidecars[s.name + ".unstable_manifold.csv"] = manifold_csv(*unstable);
    }
    return *unstable;
  }
};

CheckRow row(std::string relation, double lhs, double rhs, std::string detail = {}) {
  CheckRow r;
  r.relation = std::move(relation);
  r.lhs = lhs;
  r.rhs = rhs;
  if (r.relation == "<=") r.pass = lhs <= rhs;
  else if (r.relation == ">=") r.pass = lhs >= rhs;
  else r.pass = lhs == rhs;
  r.detail = std::move(detail);
  return r;
}

Matrix random_matrix(Rng& rng, Eigen::Index n, double scale) {
  return gaussian_matrix(n, n, rng) * (scale / std::sqrt(static_cast<double>(n)));
}

CheckRow check_bounded_oracle(RunContext& ctx) {
  const int trials = ctx.count("trials", 40);
  std::vector<double> worst(static_cast<size_t>(trials), 0.0);
  for (int i = 0; i < trials; ++i) {
    Rng rng = make_stream(ctx.s.seed, 100 + static_cast<std::uint64_t>(i));
    const Eigen::Index n = 2 + i % 7;
    const OperatorModel a = OperatorModel::dense(random_matrix(rng, n, 1.0));
    const OperatorModel b = OperatorModel::dense(random_matrix(rng, n, 1.0));
    const double exact = bounded_oracle_distance(a, b);
    worst[i] = std::abs(yosida_distance(a, b).tail_sup - exact) / (1 + exact);
  }
  return row("<=", *std::max_element(worst.begin(), worst.end()), 1e-4, "max |tail_sup - ||A-B|||/(1+||A-B||)");
}

CheckRow check_bounded_perturbation(RunContext& ctx) {
  const int trials = ctx.count("trials", 40);
  int violations = 0;
  for (int i = 0; i < trials; ++i) {
    Rng rng = make_stream(ctx.s.seed, 200 + static_cast<std::uint64_t>(i));
    const Eigen::Index n = 2 + i % 7;
    const OperatorModel a = OperatorModel::dense(random_matrix(rng, n, 1.0));
    const OperatorModel c = OperatorModel::dense(random_matrix(rng, n, 0.3));
    if (!bounded_perturbation_bound_check(a, c).pass) ++violations;
  }
  return row("==", violations, 0, "violations of d_Y(A, A+C) <= M^2 ||C||");
}

CheckRow check_normal_ratio(RunContext& ctx) {
  const int trials = ctx.count("trials", 40);
  double worst = 0;
  for (int i = 0; i < trials; ++i) {
    Rng rng = make_stream(ctx.s.seed, 300 + static_cast<std::uint64_t>(i));
    const Eigen::Index n = 2 + i % 7;
    const Matrix g = random_matrix(rng, n, 1.0);
    // Symmetric negative definite: normal with M = 1.
    const OperatorModel a = OperatorModel::dense(-(g * g.transpose()) - Matrix::Identity(n, n));
    const OperatorModel c = OperatorModel::dense(random_matrix(rng, n, 0.3));
    const BoundCheckReport r = bounded_perturbation_bound_check(a, c);
    worst = std::max(worst, std::abs(r.d_estimate / operator_norm(c) - 1));
  }
  return row("<=", worst, 0.01, "max |d_Y / ||C|| - 1| for normal A");
}

CheckRow check_relative_bound(RunContext& ctx) {
  const int trials = ctx.count("trials", 40);
  int violations = 0;
  for (int i = 0; i < trials; ++i) {
    Rng rng = make_stream(ctx.s.seed, 400 + static_cast<std::uint64_t>(i));
    const Eigen::Index n = 2 + i % 7;
    Vector eig(n);
    for (Eigen::Index k = 0; k < n; ++k) eig(k) = -uniform(rng, 0.1, 10.0);
    const OperatorModel a = OperatorModel::spectral_diagonal(eig);
    if (!relative_bound_check(a, uniform(rng, 0.0, 0.5), uniform(rng, 0.0, 1.0), ctx.s.seed + i).pass) ++violations;
  }
  return row("==", violations, 0, "violations of d_Y <= a K M + b M^2");
}

CheckRow check_closeness(RunContext& ctx) {
  const int trials = ctx.count("trials", 40);
  int violations = 0;
  for (int i = 0; i < trials; ++i) {
    Rng rng = make_stream(ctx.s.seed, 500 + static_cast<std::uint64_t>(i));
    const Eigen::Index n = 2 + i % 7;
    const Matrix a = random_matrix(rng, n, 1.0);
    Matrix d = random_matrix(rng, n, 1.0);
    d *= uniform(rng, 0.01, 0.2) / spectral_norm(d);
    const OperatorModel ma = OperatorModel::dense(a), mb = OperatorModel::dense(a + d);
    for (double t : {0.5, 1.0}) {
      if (!closeness_bound_check(ma, mb, t).pass) ++violations;
    }
  }
  return row("==", violations, 0, "violations of ||T(t) - S(t)|| <= t M^2 e^{4 omega t} d_Y");
}

CheckRow check_closeness_commuting(RunContext&) {
  Vector l(2);
  l << -1.0, 1.0;
  const Matrix a = l.asDiagonal();
  const ClosenessReport r =
      closeness_bound_check(OperatorModel::dense(a), OperatorModel::dense(a + 0.1 * Matrix::Identity(2, 2)), 1.0);
  const double expected = std::expm1(0.1) * std::exp(1.0);
  CheckRow out = row("<=", std::abs(r.lhs - expected), 1e-9, "|lhs - (e^0.1 - 1) e|");
  out.pass = out.pass && r.pass;
  return out;
}

CheckRow check_roughness(RunContext& ctx) {
  Vector l(2);
  l << -1.0, 1.0;
  std::vector<double> eps;
  for (int k = 1; k <= 9; ++k) eps.push_back(0.1 * k);
  const RoughnessReport r =
      roughness_sweep(OperatorModel::dense(l.asDiagonal().toDenseMatrix()), OperatorModel::dense(Matrix::Identity(2, 2)), eps);
  ctx.report.sidecars[ctx.s.name + ".roughness.csv"] = roughness_csv(r);
  return row(">=", r.persistent_prefix, 9, "hyperbolic prefix of diag(-1,1) + eps I, eps = 0.1..0.9");
}

CheckRow check_delay_distance(RunContext& ctx) {
  const int grid = ctx.count("grid_size", 256);
  double worst = 0;
  bool within_claim = true;
  std::ostringstream detail;
  for (auto [a, b] : {std::pair{1.0, 0.0}, std::pair{0.5, -0.5}, std::pair{2.0, 1.0}}) {
    const double d = yosida_distance(OperatorModel::delay_generator(a, grid), OperatorModel::delay_generator(b, grid)).estimate;
    const double gap = std::abs(a - b);
    worst = std::max(worst, std::abs(d / gap - 1));
    within_claim = within_claim && d <= 2 * gap;
    detail << "d(" << format_number(a) << "," << format_number(b) << ")=" << format_number(d) << ' ';
  }
  CheckRow out = row("<=", worst, 0.1, detail.str() + "max |d / |a-b| - 1|");
  out.pass = out.pass && within_claim;
  return out;
}

CheckRow check_dichotomy(RunContext& ctx) {
  const SemilinearSystem sys = SemilinearSystem::from(ctx.system().model);
  const Matrix l0 = sys.jacobian(Vector::Zero(sys.dimension()));
  const DichotomySplit split = spectral_split(time_one_map(OperatorModel::dense(l0)));
  const auto expected = ctx.s.parameters.find("expected_stable_dim");
  const double want = expected == ctx.s.parameters.end() ? split.stable_dim : expected->second;
  return row("==", split.stable_dim, want,
             "stable_dim of the time-1 map; beta=" + format_number(split.beta) + " N=" + format_number(split.N));
}

CheckRow check_accretivity(RunContext& ctx) {
  const AccretivityCertificate c = accretivity_certificate(ctx.truncated(), ctx.system().omega, ctx.count("pairs", 200),
                                                           ctx.system().r0, ctx.s.seed);
  return row("==", c.failures, 0, "worst ratio " + format_number(c.worst_ratio));
}

CheckRow check_crandall_liggett(RunContext& ctx) {
  const OperatorModel sysm = ctx.truncated();
  const SemilinearSystem sys = SemilinearSystem::from(sysm);
  Rng rng = make_stream(ctx.s.seed, 600);
  const Vector x = ball_point(sys.dimension(), ctx.system().r0 / 2, rng);
  const int n = ctx.count("cl_steps", 256);
  const TrajectoryRecord whole = crandall_liggett_evolve(sysm, 0.75, n, VectorState(x));
  const Vector half = crandall_liggett_flow(sys, 0.25, n, x).value;
  const Vector composed = crandall_liggett_flow(sys, 0.5, n, half).value;
  const double defect = (whole.states.back().coordinates - composed).norm();
  return row("<=", defect, 5 * whole.doubling_error + 1e-12, "||S(0.75)x - S(0.5)S(0.25)x|| vs 5 x doubling error");
}

CheckRow check_lip_phi(RunContext& ctx) {
  const LipPhiReport r = lip_phi_estimate(ctx.truncated(), ctx.system().omega, 1.0, ctx.system().r0 / 2,
                                          ctx.count("phi_pairs", 32), ctx.s.seed);
  return row("<=", r.lip_hat, 1.05 * r.bound, "modulus " + format_number(r.modulus));
}

CheckRow check_unstable_manifold(RunContext& ctx) {
  const ManifoldGraph& g = ctx.unstable_manifold();
  const double tol = ctx.tol("manifold", 1e-10);
  CheckRow out = row("<=", g.invariance_residual, 10 * tol * (1 + g.lip_estimate),
                     "iterations " + std::to_string(g.iterations) + (g.converged ? "" : " (not converged)") +
                         (g.precondition_met ? "" : "; contraction precondition not met"));
  out.pass = out.pass && g.converged;
  return out;
}

CheckRow check_saddle_curve(RunContext& ctx) {
  const ManifoldGraph& g = ctx.unstable_manifold();
  double err = 0;
  for (Eigen::Index a = 0; a < g.anchor_count(); ++a) {
    const double x = g.anchor_grid(a, 0);
    err = std::max(err, std::abs(g.values(a, 0) - x * x / 3));
  }
  return row("<=", err, 1e-3, "sup |Phi(x) - x^2/3|");
}

CheckRow check_coupled_curve(RunContext& ctx) {
  const ManifoldGraph& g = ctx.unstable_manifold();
  double err = 0;
  for (Eigen::Index a = 0; a < g.anchor_count(); ++a) {
    const double z = g.anchor_grid(a, 0);
    err = std::max({err, std::abs(g.values(a, 0) - z * z / 3), std::abs(g.values(a, 1) - z * z * z / 15)});
  }
  return row("<=", err, 1e-3, "sup |Phi(z) - (z^2/3, z^3/15)|");
}

CheckRow check_stable_manifold(RunContext& ctx) {
  const double tol = ctx.tol("manifold", 1e-10);
  const ManifoldGraph g = compute_stable_manifold(ctx.system().model, ctx.system().r0, tol);
  ctx.report.sidecars[ctx.s.name + ".stable_manifold.csv"] = manifold_csv(g);
  CheckRow out = row("<=", g.invariance_residual, 10 * tol * (1 + g.lip_estimate),
                     std::string("membership ") + (g.stable_membership.value_or(false) ? "ok" : "violated"));
  out.pass = out.pass && g.converged && g.stable_membership.value_or(false);
  return out;
}

CheckRow check_lip_shrink(RunContext& ctx) {
  const double r0 = ctx.system().r0;
  const LipShrinkReport r = lip_shrink_study(ctx.system().model, {r0, r0 / 2, r0 / 5, r0 / 10}, ctx.tol("manifold", 1e-10));
  std::ostringstream csv;
  csv << "r0,lip_phi,lip_Phi\n";
  for (const LipShrinkRow& x : r.rows) {
    csv << format_number(x.r0) << ',' << format_number(x.lip_phi) << ',' << format_number(x.lip_Phi) << '\n';
  }
  ctx.report.sidecars[ctx.s.name + ".lip_shrink.csv"] = csv.str();
  CheckRow out = row("<=", r.rows.back().lip_Phi / r.rows.front().lip_Phi, 0.1 * (1 + 1e-6),
                     r.nonincreasing ? "nonincreasing within 10%" : "not monotone within 10%");
  out.pass = r.pass;
  return out;
}

using CheckFn = std::function<CheckRow(RunContext&)>;

const std::map<std::string, CheckFn>& registry() {
  static const std::map<std::string, CheckFn> table = {
      {"bounded_oracle", check_bounded_oracle},
      {"bounded_perturbation", check_bounded_perturbation},
      {"normal_ratio", check_normal_ratio},
      {"relative_bound", check_relative_bound},
      {"closeness", check_closeness},
      {"closeness_commuting", check_closeness_commuting},
      {"roughness", check_roughness},
      {"delay_distance", check_delay_distance},
      {"dichotomy", check_dichotomy},
      {"accretivity", check_accretivity},
      {"crandall_liggett", check_crandall_liggett},
      {"lip_phi", check_lip_phi},
      {"unstable_manifold", check_unstable_manifold},
      {"saddle_curve", check_saddle_curve},
      {"coupled_curve", check_coupled_curve},
      {"stable_manifold", check_stable_manifold},
      {"lip_shrink", check_lip_shrink},
  };
  return table;
}

}  // namespace

VerificationReport run_scenario(const Scenario& scenario) {
  using Clock = std::chrono::steady_clock;
  VerificationReport report;
  report.scenario = scenario.name;
  report.seed = scenario.seed;
  report.toolchain = toolchain_fingerprint();
  RunContext ctx{scenario, report, std::nullopt};
  const auto start = Clock::now();
  for (const std::string& id : scenario.checks) {
    const auto t0 = Clock::now();
    CheckRow r;
    try {
      r = registry().at(id)(ctx);
    } catch (const Error& e) {
      r.relation = "==";
      r.pass = false;
      r.detail = e.what();
      r.lhs = std::numeric_limits<double>::quiet_NaN();
      r.rhs = std::numeric_limits<double>::quiet_NaN();
    }
    r.id = id;
    r.runtime = std::chrono::duration<double>(Clock::now() - t0).count();
    report.rows.push_back(std::move(r));
  }
  report.runtime = std::chrono::duration<double>(Clock::now() - start).count();
  report.pass = std::all_of(report.rows.begin(), report.rows.end(), [](const CheckRow& r) { return r.pass; });
  return report;
}

std::string toolchain_fingerprint() {
  std::ostringstream out;
#if defined(__clang__)
  out << "clang " << __clang_major__ << '.' << __clang_minor__ << '.' << __clang_patchlevel__;
#elif defined(__GNUC__)
  out << "gcc " << __GNUC__ << '.' << __GNUC_MINOR__ << '.' << __GNUC_PATCHLEVEL__;
#else
  out << "unknown-compiler";
#endif
  out << "; Eigen " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  return out.str();
}

Json report_body(const VerificationReport& report) {
  Json rows = Json::array();
  for (const CheckRow& r : report.rows) {
    rows.push_back(Json{{"id", r.id},
                        {"lhs", number_json(r.lhs)},
                        {"relation", r.relation},
                        {"rhs", number_json(r.rhs)},
                        {"pass", r.pass},
                        {"detail", r.detail}});
  }
  return Json{{"schema", 1},
              {"scenario", report.scenario},
              {"seed", report.seed},
              {"toolchain", report.toolchain},
              {"checks", rows},
              {"pass", report.pass}};
}

Json report_json(const VerificationReport& report) {
  Json per_check = Json::object();
  for (const CheckRow& r : report.rows) per_check[r.id] = r.runtime;
  return Json{{"body", report_body(report)}, {"timing", {{"total_seconds", report.runtime}, {"checks", per_check}}}};
}

std::string write_report(const VerificationReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / (report.scenario + ".report.json");
  std::ofstream(path) << report_json(report).dump(2) << '\n';
  for (const auto& [name, text] : report.sidecars) std::ofstream(fs::path(dir) / name) << text;
  return path.string();
}

int exit_code(const VerificationReport& report) { return report.pass ? 0 : 1; }

}  // namespace ylab
