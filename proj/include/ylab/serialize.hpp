#pragma once

#include <string>

#include <json.hpp>

#include "ylab/manifolds.hpp"
#include "ylab/nonlinear.hpp"
#include "ylab/semigroup.hpp"
#include "ylab/yosida.hpp"

namespace ylab {

using Json = nlohmann::ordered_json;

/// %.17g, with "inf" / "-inf" / "nan" spelled out.
std::string format_number(double x);

/// Finite numbers as JSON numbers, the rest as the strings above.
Json number_json(double x);
double number_from_json(const Json& j);

Json vector_json(const Vector& v);
Json matrix_json(const Matrix& m);  // row-major array of rows
Vector vector_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);

/// Builds a catalog nonlinearity (zero, cubic, scaled_sine, sine_minus_identity,
/// saddle_quadratic, coupled_quadratic, quadratic). A truncation_radius
/// parameter applies radial_truncation. Throws ParseError on unknown names.
NonlinearMap make_nonlinearity(const NonlinearDescriptor& d, Eigen::Index dimension);

Json descriptor_json(const NonlinearDescriptor& d);
NonlinearDescriptor descriptor_from_json(const Json& j);

/// {kind, dimension, parameters}. Semilinear models need a descriptor on
/// their nonlinearity.
Json operator_json(const OperatorModel& op);
OperatorModel operator_from_json(const Json& j);

Json yosida_json(const YosidaEstimate& e);
std::string yosida_csv(const YosidaEstimate& e);

std::string trajectory_csv(const TrajectoryRecord& r);

Json manifold_summary_json(const ManifoldGraph& g);

/// Reads and parses a JSON file; ParseError on any failure.
Json read_json_file(const std::string& path);

}  // namespace ylab
