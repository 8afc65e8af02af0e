#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ylab/operator_model.hpp"
#include "ylab/serialize.hpp"

namespace ylab {

/// A semilinear (or linear) system with its declared growth bound and
/// truncation radius.
struct SystemSpec {
  OperatorModel model;
  double omega = 0;
  double r0 = 1;
};

struct Scenario {
  std::string name;
  std::string template_name;  // empty for explicit systems
  std::map<std::string, double> parameters;
  std::uint64_t seed = 7;
  std::vector<std::string> checks;
  std::map<std::string, double> tolerances;
  std::optional<SystemSpec> system;
};

struct CheckRow {
  std::string id;
  double lhs = 0;
  double rhs = 0;
  std::string relation;  // "<=", ">=" or "=="
  bool pass = false;
  std::string detail;
  double runtime = 0;  // seconds, reported outside the deterministic body
};

struct VerificationReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<CheckRow> rows;
  bool pass = false;
  std::string toolchain;
  double runtime = 0;
  std::map<std::string, std::string> sidecars;  // file name -> CSV text
};

std::vector<std::string> catalog_names();
std::vector<std::string> known_checks();

/// The JSON document of a built-in scenario. ParseError if unknown.
Json catalog_scenario_json(const std::string& name);

/// Validates and expands a scenario document (schema 1). ParseError on any problem.
Scenario scenario_from_json(const Json& doc);

/// A catalog name or a path to a scenario file.
Scenario load_scenario(const std::string& name_or_path);

/// Builds the system of a template (saddle-quadratic, heat-semilinear,
/// coupled-3d) from its parameters.
SystemSpec template_system(const std::string& template_name, const std::map<std::string, double>& parameters);

/// Runs the checks in declared order. Check errors become failed rows whose
/// detail names the error code.
VerificationReport run_scenario(const Scenario& scenario);

std::string toolchain_fingerprint();

/// {"schema": 1, scenario, seed, toolchain, checks, pass}; byte-stable for
/// fixed scenario and seeds.
Json report_body(const VerificationReport& report);
/// {"body": ..., "timing": ...}.
Json report_json(const VerificationReport& report);

/// Writes <dir>/<scenario>.report.json and the sidecars; returns the report path.
std::string write_report(const VerificationReport& report, const std::string& dir);

/// 0 on overall pass, 1 otherwise.
int exit_code(const VerificationReport& report);

}  // namespace ylab
