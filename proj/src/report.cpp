#include "finsler/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace finsler {

bool VerificationReport::all_pass() const {
  for (const CheckResult& c : checks)
    if (!c.pass) return false;
  return true;
}

Json VerificationReport::to_json() const {
  Json j;
  j["scenario"] = scenario_id;
  j["seed"] = seed;
  Json rows = Json::array();
  for (const CheckResult& c : checks) {
    Json row;
    row["case"] = c.case_id;
    row["check"] = c.name;
    row["residual"] = c.residual;
    row["tolerance"] = c.tolerance;
    row["verdict"] = c.pass ? "pass" : "fail";
    if (!c.details.is_null()) row["details"] = c.details;
    rows.push_back(row);
  }
  j["checks"] = rows;
  j["all_pass"] = all_pass();
  j["environment"] = environment;
  return j;
}

std::string VerificationReport::to_csv() const {
  std::string out = "scenario,case,check,sample,residual\n";
  char buf[512];
  for (const CheckResult& c : checks) {
    if (c.sample_residuals.empty()) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%s,summary,%.17g\n", scenario_id.c_str(),
                    c.case_id.c_str(), c.name.c_str(), c.residual);
      out += buf;
      continue;
    }
    for (size_t i = 0; i < c.sample_residuals.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%s,%zu,%.17g\n", scenario_id.c_str(),
                    c.case_id.c_str(), c.name.c_str(), i, c.sample_residuals[i]);
      out += buf;
    }
  }
  return out;
}

void write_report_files(const VerificationReport& rep, const std::string& out_dir,
                        const std::string& format) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    if (!f) throw IoError("cannot open " + name + " for writing");
    f << content;
  };
  if (format == "json" || format == "both") write("report.json", rep.to_json().dump(2) + "\n");
  if (format == "csv" || format == "both") write("report.csv", rep.to_csv());
  if (format != "json" && format != "csv" && format != "both")
    throw SchemaError("unknown report format '" + format + "'");
}

}  // namespace finsler
