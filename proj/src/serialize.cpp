#include "ylab/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ylab {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json number_json(double x) { return std::isfinite(x) ? Json(x) : Json(format_number(x)); }

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorCode::ParseError, "expected a number, got " + j.dump());
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_json(v(i)));
  return out;
}

Json matrix_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_from_json(j[i]);
  return v;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ParseError, "expected a nonempty array of rows");
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw Error(ErrorCode::ParseError, "ragged matrix rows");
    m.row(static_cast<Eigen::Index>(i)) = vector_from_json(j[i]).transpose();
  }
  return m;
}

namespace {

double param(const NonlinearDescriptor& d, const std::string& key, double fallback) {
  auto it = d.parameters.find(key);
  return it == d.parameters.end() ? fallback : it->second;
}

NonlinearMap catalog_map(const NonlinearDescriptor& d, Eigen::Index n) {
  const std::string& name = d.name;
  if (name == "zero") return NonlinearMap::zero(n);
  if (name == "cubic") {
    const double c = param(d, "coefficient", -1.0);
    return NonlinearMap(
        n, [c](const Vector& x) { return Vector(c * x.array().cube().matrix()); },
        [c](const Vector& x) { return Matrix((3 * c * x.array().square()).matrix().asDiagonal()); });
  }
  if (name == "quadratic") {
    const double c = param(d, "coefficient", 1.0);
    return NonlinearMap(
        n, [c](const Vector& x) { return Vector(c * x.array().square().matrix()); },
        [c](const Vector& x) { return Matrix((2 * c * x.array()).matrix().asDiagonal()); });
  }
  if (name == "scaled_sine") {
    const double s = param(d, "scale", 1.0);
    return NonlinearMap(
        n, [s](const Vector& x) { return Vector(s * x.array().sin().matrix()); },
        [s](const Vector& x) { return Matrix((s * x.array().cos()).matrix().asDiagonal()); }, std::abs(s));
  }
  if (name == "sine_minus_identity") {
    return NonlinearMap(
        n, [](const Vector& x) { return Vector((x.array().sin() - x.array()).matrix()); },
        [](const Vector& x) { return Matrix((x.array().cos() - 1.0).matrix().asDiagonal()); }, 2.0);
  }
  if (name == "saddle_quadratic") {
    if (n != 2) throw Error(ErrorCode::ParseError, "saddle_quadratic is planar");
    const double c = param(d, "coefficient", 1.0);
    return NonlinearMap(
        2, [c](const Vector& x) { return Vector(Vector::Unit(2, 1) * (c * x(0) * x(0))); },
        [c](const Vector& x) {
          Matrix j = Matrix::Zero(2, 2);
          j(1, 0) = 2 * c * x(0);
          return j;
        });
  }
  if (name == "coupled_quadratic") {
    if (n != 3) throw Error(ErrorCode::ParseError, "coupled_quadratic acts on R^3");
    return NonlinearMap(
        3,
        [](const Vector& x) {
          Vector f(3);
          f << x(2) * x(2), x(0) * x(2), 0.0;
          return f;
        },
        [](const Vector& x) {
          Matrix j = Matrix::Zero(3, 3);
          j(0, 2) = 2 * x(2);
          j(1, 0) = x(2);
          j(1, 2) = x(0);
          return j;
        });
  }
  throw Error(ErrorCode::ParseError, "unknown nonlinearity '" + name + "'");
}

}  // namespace

NonlinearMap make_nonlinearity(const NonlinearDescriptor& d, Eigen::Index dimension) {
  NonlinearMap f = catalog_map(d, dimension);
  NonlinearDescriptor base = d;
  base.parameters.erase("truncation_radius");
  f.set_descriptor(base);
  if (auto it = d.parameters.find("truncation_radius"); it != d.parameters.end()) {
    if (!(it->second > 0)) throw Error(ErrorCode::ParseError, "truncation_radius must be > 0");
    f = radial_truncation(f, it->second);
  }
  return f;
}

Json descriptor_json(const NonlinearDescriptor& d) {
  Json params = Json::object();
  for (const auto& [k, v] : d.parameters) params[k] = number_json(v);
  return Json{{"name", d.name}, {"parameters", params}};
}

NonlinearDescriptor descriptor_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string()) {
    throw Error(ErrorCode::ParseError, "nonlinearity needs a name");
  }
  NonlinearDescriptor d{j["name"].get<std::string>(), {}};
  if (j.contains("parameters")) {
    if (!j["parameters"].is_object()) throw Error(ErrorCode::ParseError, "nonlinearity parameters must be an object");
    for (const auto& [k, v] : j["parameters"].items()) d.parameters[k] = number_from_json(v);
  }
  return d;
}

Json operator_json(const OperatorModel& op) {
  Json params = Json::object();
  switch (op.kind()) {
    case ModelKind::dense_matrix:
      params["entries"] = matrix_json(op.entries());
      params["norm"] = op.norm_kind() == NormKind::sup ? "sup" : "euclidean";
      break;
    case ModelKind::spectral_diagonal:
      params["eigenvalues"] = vector_json(op.eigenvalues());
      break;
    case ModelKind::delay_generator:
      params["a"] = number_json(op.delay_coefficient());
      params["grid_size"] = op.grid_size();
      break;
    case ModelKind::semilinear_composite: {
      const auto& d = op.nonlinearity().descriptor();
      require(d.has_value(), ErrorCode::InvalidArgument, "nonlinearity has no catalog descriptor");
      NonlinearDescriptor full = *d;
      if (auto r0 = op.nonlinearity().truncation_radius()) full.parameters["truncation_radius"] = *r0;
      params["linear"] = operator_json(op.linear_part());
      params["nonlinearity"] = descriptor_json(full);
      break;
    }
  }
  return Json{{"kind", std::string(to_string(op.kind()))}, {"dimension", op.dimension()}, {"parameters", params}};
}

OperatorModel operator_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "operator must be an object");
    const std::string kind = j.at("kind").get<std::string>();
    const Json& p = j.at("parameters");
    OperatorModel op = [&] {
      if (kind == "dense") {
        NormKind norm = NormKind::euclidean;
        if (p.contains("norm")) {
          const std::string s = p["norm"].get<std::string>();
          if (s == "sup") norm = NormKind::sup;
          else if (s != "euclidean") throw Error(ErrorCode::ParseError, "unknown norm '" + s + "'");
        }
        return OperatorModel::dense(matrix_from_json(p.at("entries")), norm);
      }
      if (kind == "spectral_diagonal") return OperatorModel::spectral_diagonal(vector_from_json(p.at("eigenvalues")));
      if (kind == "delay") {
        return OperatorModel::delay_generator(number_from_json(p.at("a")), p.at("grid_size").get<int>());
      }
      if (kind == "semilinear") {
        OperatorModel linear = operator_from_json(p.at("linear"));
        const NonlinearDescriptor d = descriptor_from_json(p.at("nonlinearity"));
        NonlinearMap f = make_nonlinearity(d, linear.dimension());
        return OperatorModel::semilinear(std::move(linear), std::move(f));
      }
      throw Error(ErrorCode::ParseError, "unknown operator kind '" + kind + "'");
    }();
    if (j.contains("dimension") && j["dimension"].get<Eigen::Index>() != op.dimension()) {
      throw Error(ErrorCode::ParseError, "declared dimension does not match the operator");
    }
    return op;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, e.what());
  }
}

Json yosida_json(const YosidaEstimate& e) {
  Json grid = Json::array(), values = Json::array();
  for (double mu : e.mu_grid) grid.push_back(number_json(mu));
  for (double v : e.norm_values) values.push_back(number_json(v));
  return Json{{"mu_grid", grid},
              {"norm_values", values},
              {"estimate", number_json(e.estimate)},
              {"tail_sup", number_json(e.tail_sup)},
              {"plateau_detected", e.plateau_detected}};
}

std::string yosida_csv(const YosidaEstimate& e) {
  std::ostringstream out;
  out << "mu,norm\n";
  for (size_t i = 0; i < e.mu_grid.size(); ++i) {
    out << format_number(e.mu_grid[i]) << ',' << format_number(e.norm_values[i]) << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const TrajectoryRecord& r) {
  std::ostringstream out;
  out << 't';
  const Eigen::Index n = r.states.empty() ? 0 : r.states.front().dimension();
  for (Eigen::Index i = 0; i < n; ++i) out << ",x_" << i + 1;
  out << '\n';
  for (size_t k = 0; k < r.times.size(); ++k) {
    out << format_number(r.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_number(r.states[k].coordinates(i));
    out << '\n';
  }
  return out.str();
}

Json manifold_summary_json(const ManifoldGraph& g) {
  Json out{{"base", std::string(to_string(g.base))},
           {"base_dim", g.base_dim},
           {"fiber_dim", g.fiber_dim},
           {"anchors_per_dim", g.anchors_per_dim},
           {"half_width", number_json(g.half_width)},
           {"lip_estimate", number_json(g.lip_estimate)},
           {"invariance_residual", number_json(g.invariance_residual)},
           {"iterations", g.iterations},
           {"converged", g.converged},
           {"last_change", number_json(g.last_change)},
           {"lip_phi", number_json(g.lip_phi)},
           {"gap_threshold", number_json(g.gap_threshold)},
           {"precondition_met", g.precondition_met}};
  if (g.stable_membership) out["stable_membership"] = *g.stable_membership;
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

}  // namespace ylab
