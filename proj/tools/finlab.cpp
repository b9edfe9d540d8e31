#include <CLI11.hpp>
#include <iostream>

#include "finsler/scenario.hpp"

using namespace finsler;

namespace {

struct GlobalOpts {
  unsigned long long seed = 20240801ULL;
  double tol_scale = 1.0;
  std::string out_dir = "out";
  std::string format = "both";
};

int finish(const VerificationReport& rep, const GlobalOpts& g) {
  write_report_files(rep, g.out_dir, g.format);
  int fails = 0;
  for (const CheckResult& c : rep.checks) {
    std::printf("[%s] %-40s residual %10.3e  tol %9.3e  (%s)\n", c.pass ? "pass" : "FAIL",
                c.name.c_str(), c.residual, c.tolerance, c.case_id.c_str());
    if (!c.pass) ++fails;
  }
  std::printf("%s: %zu checks, %d failing; reports in %s/\n", rep.scenario_id.c_str(),
              rep.checks.size(), fails, g.out_dir.c_str());
  return fails == 0 ? 0 : 1;
}

Json check_json(const std::string& name, const Json& params) {
  Json j;
  j["name"] = name;
  if (!params.is_null()) j["params"] = params;
  return j;
}

// Assemble a one-case scenario for the convenience verbs.
Scenario verb_scenario(const std::string& verb, const std::string& metric, int n,
                       const std::map<std::string, double>& mparams, const std::string& surface,
                       const std::map<std::string, double>& sparams, const GlobalOpts& g) {
  Json j;
  j["id"] = verb + "-" + metric;
  j["seed"] = g.seed;
  j["tol_scale"] = g.tol_scale;
  Json cj;
  cj["id"] = metric;
  cj["metric"] = Json{{"catalog", metric}, {"n", n}};
  if (!mparams.empty()) {
    Json p;
    for (const auto& [k, v] : mparams) p[k] = v;
    cj["metric"]["params"] = p;
  }
  if (!surface.empty()) {
    cj["surface"] = Json{{"catalog", surface}};
    if (!sparams.empty()) {
      Json p;
      for (const auto& [k, v] : sparams) p[k] = v;
      cj["surface"]["params"] = p;
    }
  }
  Json checks = Json::array();
  if (verb == "tensors") {
    checks.push_back(check_json("tensor-oracle", {}));
    checks.push_back(check_json("algebraic-identities", {}));
    checks.push_back(check_json("duality", {}));
  } else if (verb == "geodesic") {
    checks.push_back(check_json("geodesic-conservation", {}));
    checks.push_back(check_json("parallel-transport", {}));
  } else if (verb == "focal") {
    checks.push_back(check_json("focal-detect", {}));
  } else if (verb == "tube") {
    checks.push_back(check_json("tube-curvature", {}));
  } else if (verb == "isoparam") {
    checks.push_back(check_json("isoparam", {}));
  } else if (verb == "cartan") {
    checks.push_back(check_json("cartan-measured", {}));
  } else if (verb == "randers-audit") {
    checks.push_back(check_json("killing-classify", {}));
    checks.push_back(check_json("s-curvature", {}));
    checks.push_back(check_json("torsion-audit", {}));
    checks.push_back(check_json("spray-closed-vs-ad", {}));
    checks.push_back(check_json("bh-cross-check", {}));
  }
  cj["checks"] = checks;
  j["cases"] = Json::array({cj});
  return scenario_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finlab: catalog metrics, verification checks, machine-readable reports"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "global random seed");
  app.add_option("--tol-scale", g.tol_scale, "multiply every tolerance");
  app.add_option("--out", g.out_dir, "output directory for report files");
  app.add_option("--format", g.format, "report format: json, csv or both");

  std::string metric = "euclidean", surface;
  int n = 3;
  std::map<std::string, double> mparams, sparams;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--metric", metric, "catalog metric id");
    sub->add_option("--n", n, "chart dimension (2..4)");
    sub->add_option("--param", mparams, "metric parameter (e.g. --param eps 0.4)");
    sub->add_option("--surface", surface, "catalog surface id");
    sub->add_option("--surface-param", sparams, "surface parameter");
  };
  for (const char* verb :
       {"tensors", "geodesic", "focal", "tube", "isoparam", "cartan", "randers-audit"})
    add_common(app.add_subcommand(verb));

  auto* run = app.add_subcommand("run", "run a scenario file");
  std::string scenario_path;
  run->add_option("file", scenario_path, "scenario JSON path")->required();

  auto* list = app.add_subcommand("list", "list catalog ids and check names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      std::printf("metrics:");
      for (const std::string& id : catalog_model_ids()) std::printf(" %s", id.c_str());
      std::printf("\nsurfaces:");
      for (const std::string& id : catalog_surface_ids()) std::printf(" %s", id.c_str());
      std::printf("\nchecks:");
      for (const auto& [name, tol] : known_checks()) std::printf(" %s(%.0e)", name.c_str(), tol);
      std::printf("\n");
      return 0;
    }
    Scenario sc;
    if (run->parsed()) {
      sc = load_scenario(scenario_path);
      sc.seed = app.count("--seed") ? g.seed : sc.seed;
      sc.tol_scale *= g.tol_scale;
    } else {
      sc = verb_scenario(app.get_subcommands().front()->get_name(), metric, n, mparams, surface,
                         sparams, g);
    }
    return finish(run_scenario(sc), g);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 2;
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "schema error: %s\n", e.what());
    return 2;
  } catch (const UnknownCatalogId& e) {
    std::fprintf(stderr, "catalog error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
