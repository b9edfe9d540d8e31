#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/linalg.hpp"

namespace finsler {

using Json = nlohmann::json;

struct CheckResult {
  std::string case_id;
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;  // residual <= tolerance
  Json details;       // optional named values
  std::vector<double> sample_residuals;  // flat per-sample table for the CSV
};

inline CheckResult make_result(std::string case_id, std::string name, double residual,
                               double tolerance) {
  CheckResult r;
  r.case_id = std::move(case_id);
  r.name = std::move(name);
  r.residual = residual;
  r.tolerance = tolerance;
  r.pass = residual <= tolerance;
  return r;
}

struct VerificationReport {
  std::string scenario_id;
  unsigned long long seed = 0;
  std::vector<CheckResult> checks;
  // volatile data (host, timings) lives only here so reports are reproducible
  // byte-for-byte once this member is stripped
  Json environment;

  bool all_pass() const;
  Json to_json() const;
  std::string to_csv() const;
};

// Writes report.json / report.csv under out_dir; format in {json, csv, both}.
void write_report_files(const VerificationReport& rep, const std::string& out_dir,
                        const std::string& format);

}  // namespace finsler
