// Command-line front end for the Yosida-distance laboratory.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ylab/dichotomy.hpp"
#include "ylab/manifolds.hpp"
#include "ylab/nonlinear.hpp"
#include "ylab/scenario.hpp"
#include "ylab/semigroup.hpp"
#include "ylab/serialize.hpp"
#include "ylab/yosida.hpp"

namespace fs = std::filesystem;
using namespace ylab;

namespace {

struct Options {
  std::vector<std::string> operators;
  std::string mu_grid = "16:2:20";
  double t = 1.0;
  std::string eps_list = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  std::optional<double> r0;
  double tol = 1e-10;
  std::uint64_t seed = 7;
  bool seed_given = false;
  std::string out;
  std::string format = "json";
  std::string scenario;
  std::string state;
  std::string direction;
  int steps = 1024;
  int samples = 16;
  bool stable = false;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "not a number list: '" + text + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::ParseError, "empty number list");
  return out;
}

std::vector<double> parse_mu_grid(const std::string& text) {
  std::stringstream in(text);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c)) {
    throw Error(ErrorCode::ParseError, "--mu-grid expects start:factor:count");
  }
  try {
    return geometric_grid(std::stod(a), std::stod(b), std::stoi(c));
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::ParseError, "--mu-grid expects start:factor:count");
  }
}

OperatorModel load_operator(const std::string& path) { return operator_from_json(read_json_file(path)); }

std::vector<OperatorModel> load_operators(const Options& o, size_t want) {
  if (o.operators.size() != want) {
    throw Error(ErrorCode::ParseError, "expected " + std::to_string(want) + " --operator file(s)");
  }
  std::vector<OperatorModel> ops;
  for (const auto& p : o.operators) ops.push_back(load_operator(p));
  return ops;
}

// Writes to <out>/<name> when --out is set, else to stdout.
void emit(const Options& o, const std::string& name, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  fs::create_directories(o.out);
  std::ofstream(fs::path(o.out) / name) << text;
  std::cout << (fs::path(o.out) / name).string() << '\n';
}

int cmd_distance(const Options& o) {
  const auto ops = load_operators(o, 2);
  const YosidaEstimate e = yosida_distance(ops[0], ops[1], parse_mu_grid(o.mu_grid));
  if (o.format == "csv") emit(o, "distance.csv", yosida_csv(e));
  else emit(o, "distance.json", yosida_json(e).dump(2));
  return 0;
}

int cmd_evolve(const Options& o) {
  const OperatorModel op = load_operators(o, 1)[0];
  Vector x = Vector::Ones(op.dimension());
  if (!o.state.empty()) {
    const std::vector<double> values = parse_list(o.state);
    x = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  }
  require(x.size() == op.dimension(), ErrorCode::ParseError, "--state has the wrong dimension");
  TrajectoryRecord rec;
  if (op.is_linear()) {
    rec.scheme = op.is_bounded() ? Scheme::matrix_exponential : Scheme::yosida_limit;
    for (int k = 0; k <= o.samples; ++k) {
      const double tk = o.t * k / o.samples;
      rec.times.push_back(tk);
      rec.states.push_back(evolve_linear(op, tk, VectorState(x, op.norm_kind())));
    }
  } else {
    rec = crandall_liggett_evolve(op, o.t, o.steps, VectorState(x));
  }
  if (o.format == "csv") {
    emit(o, "trajectory.csv", trajectory_csv(rec));
  } else {
    Json j{{"scheme", to_string(rec.scheme, rec.steps)},
           {"t", number_json(o.t)},
           {"final_state", vector_json(rec.states.back().coordinates)}};
    if (rec.scheme == Scheme::crandall_liggett) j["doubling_error"] = number_json(rec.doubling_error);
    emit(o, "trajectory.json", j.dump(2));
  }
  return 0;
}

double gap_tol_from(const Options& o) { return o.tol == 1e-10 ? 1e-6 : o.tol; }

int cmd_dichotomy(const Options& o) {
  const OperatorModel op = load_operators(o, 1)[0];
  const OperatorModel t1 = time_one_map(op);
  const double gap_tol = gap_tol_from(o);
  Json j{{"hyperbolic", check_hyperbolic(t1, gap_tol)}};
  if (j["hyperbolic"].get<bool>()) {
    const DichotomySplit s = spectral_split(t1, gap_tol);
    j["stable_dim"] = s.stable_dim;
    j["beta"] = number_json(s.beta);
    j["N"] = number_json(s.N);
    j["inner_radius"] = number_json(s.inner_radius);
    j["outer_radius"] = number_json(s.outer_radius);
    j["condition"] = number_json(s.condition);
    j["projection"] = matrix_json(s.projection);
  }
  emit(o, "dichotomy.json", j.dump(2));
  return j["hyperbolic"].get<bool>() ? 0 : 1;
}

int cmd_roughness(const Options& o) {
  const OperatorModel a = load_operators(o, 1)[0];
  const OperatorModel dir = o.direction.empty()
                                ? OperatorModel::dense(Matrix::Identity(a.dimension(), a.dimension()), a.norm_kind())
                                : load_operator(o.direction);
  const RoughnessReport r = roughness_sweep(a, dir, parse_list(o.eps_list), gap_tol_from(o));
  if (o.format == "csv") {
    emit(o, "roughness.csv", roughness_csv(r));
  } else {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
      rows.push_back(Json{{"eps", number_json(row.eps)},
                          {"d_Y", number_json(row.d_yosida)},
                          {"hyperbolic", row.hyperbolic},
                          {"gap_inner", number_json(row.gap_inner)},
                          {"gap_outer", number_json(row.gap_outer)},
                          {"stable_dim", row.stable_dim}});
    }
    emit(o, "roughness.json",
         Json{{"rows", rows}, {"persistent_prefix", r.persistent_prefix}, {"eps_star", number_json(r.eps_star)}}
             .dump(2));
  }
  return r.persistent ? 0 : 1;
}

int cmd_manifold(const Options& o) {
  std::optional<SystemSpec> spec;
  std::string name;
  if (!o.scenario.empty()) {
    const Scenario s = load_scenario(o.scenario);
    if (!s.system) throw Error(ErrorCode::ParseError, "scenario '" + s.name + "' declares no system");
    spec = s.system;
    name = s.name;
  } else {
    spec = SystemSpec{load_operators(o, 1)[0], 0.0, 0.5};
    name = "operator";
  }
  const double r0 = o.r0.value_or(spec->r0);
  ManifoldOptions mo;
  mo.seed = o.seed;
  const ManifoldGraph g = o.stable ? compute_stable_manifold(spec->model, r0, o.tol, mo)
                                   : compute_unstable_manifold(spec->model, r0, o.tol, mo);
  const std::string stem = name + (o.stable ? ".stable_manifold" : ".unstable_manifold");
  if (o.format == "csv") {
    emit(o, stem + ".csv", manifold_csv(g));
  } else {
    if (!o.out.empty()) {
      fs::create_directories(o.out);
      std::ofstream(fs::path(o.out) / (stem + ".csv")) << manifold_csv(g);
    }
    emit(o, stem + ".json", manifold_summary_json(g).dump(2));
  }
  return g.converged ? 0 : 1;
}

int cmd_verify_bounds(const Options& o) {
  const auto ops = load_operators(o, 2);
  const BoundCheckReport r = bounded_perturbation_bound_check(ops[0], ops[1], o.t);
  emit(o, "bounds.json",
       Json{{"lhs", number_json(r.d_estimate)},
            {"rhs", number_json(r.bound)},
            {"pass", r.pass},
            {"metadata", {{"M", number_json(r.M)}, {"omega", number_json(r.omega)}, {"margin", number_json(r.margin)}}}}
           .dump(2));
  return r.pass ? 0 : 1;
}

int cmd_run(const Options& o) {
  if (o.scenario.empty()) throw Error(ErrorCode::ParseError, "run needs --scenario");
  Scenario s = load_scenario(o.scenario);
  if (o.seed_given) s.seed = o.seed;
  const VerificationReport report = run_scenario(s);
  const std::string path = write_report(report, o.out.empty() ? "reports" : o.out);
  for (const CheckRow& r : report.rows) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << ": " << format_number(r.lhs) << ' ' << r.relation << ' '
              << format_number(r.rhs) << (r.detail.empty() ? "" : "  [" + r.detail + "]") << '\n';
  }
  std::cout << (report.pass ? "overall PASS" : "overall FAIL") << "  -> " << path << '\n';
  return exit_code(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Yosida-distance numerical laboratory"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--operator", o.operators, "operator model JSON file (repeatable)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", o.seed, "random seed")->each([&](const std::string&) { o.seed_given = true; });
  };

  auto* distance = app.add_subcommand("distance", "Yosida distance between two operators");
  add_common(distance);
  distance->add_option("--mu-grid", o.mu_grid, "start:factor:count");

  auto* evolve = app.add_subcommand("evolve", "evolve a state under the semigroup");
  add_common(evolve);
  evolve->add_option("--t", o.t, "final time")->check(CLI::NonNegativeNumber);
  evolve->add_option("--state", o.state, "initial state as comma-separated values (default: ones)");
  evolve->add_option("--steps", o.steps, "Crandall-Liggett steps for nonlinear models")->check(CLI::PositiveNumber);
  evolve->add_option("--samples", o.samples, "output samples for linear models")->check(CLI::PositiveNumber);

  auto* dichotomy = app.add_subcommand("dichotomy", "hyperbolicity and dichotomy split of the time-1 map");
  add_common(dichotomy);
  dichotomy->add_option("--tol", o.tol, "gap tolerance (default 1e-6)");

  auto* roughness = app.add_subcommand("roughness-sweep", "hyperbolicity under A + eps D");
  add_common(roughness);
  roughness->add_option("--eps-list", o.eps_list, "comma-separated eps values");
  roughness->add_option("--direction", o.direction, "unit-norm perturbation direction (default: identity)");
  roughness->add_option("--tol", o.tol, "gap tolerance (default 1e-6)");

  auto* manifold = app.add_subcommand("manifold", "local unstable or stable manifold");
  add_common(manifold);
  manifold->add_option("--scenario", o.scenario, "catalog name or scenario file");
  manifold->add_option("--r0", o.r0, "truncation radius")->check(CLI::PositiveNumber);
  manifold->add_option("--tol", o.tol, "graph-transform tolerance");
  manifold->add_flag("--stable", o.stable, "compute the stable manifold");

  auto* verify = app.add_subcommand("verify-bounds", "d_Y(A, A + C) <= M^2 ||C|| for --operator A --operator C");
  add_common(verify);
  verify->add_option("--t", o.t, "envelope horizon")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "run a verification scenario");
  add_common(run);
  run->add_option("--scenario", o.scenario, "catalog name or scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*distance) return cmd_distance(o);
    if (*evolve) return cmd_evolve(o);
    if (*dichotomy) return cmd_dichotomy(o);
    if (*roughness) return cmd_roughness(o);
    if (*manifold) return cmd_manifold(o);
    if (*verify) return cmd_verify_bounds(o);
    if (*run) return cmd_run(o);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == ErrorCode::ParseError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 2;
}
