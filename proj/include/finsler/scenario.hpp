#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "finsler/catalog.hpp"
#include "finsler/report.hpp"

namespace finsler {

struct CheckSpec {
  std::string name;
  double tol = 0.0;       // 0 -> registry default
  Json params;            // check-specific knobs
};

struct SurfaceSpec {
  std::string catalog;
  std::map<std::string, double> params;
};

struct CaseSpec {
  std::string id;
  std::string metric_id;
  int n = 3;
  std::map<std::string, double> metric_params;
  std::optional<SurfaceSpec> surface;
  std::vector<CheckSpec> checks;
};

struct Scenario {
  std::string id;
  unsigned long long seed = 1;
  double tol_scale = 1.0;
  std::vector<CaseSpec> cases;
};

// Parse + validate. ParseError carries the byte offset reported by the JSON
// parser; SchemaError names the offending field; UnknownCatalogId for bad ids.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json(const Json& j);

VerificationReport run_scenario(const Scenario& sc);

// Names accepted in CheckSpec::name, with their default tolerances.
std::vector<std::pair<std::string, double>> known_checks();

}  // namespace finsler
