#include "finsler/scenario.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "finsler/focal.hpp"
#include "finsler/geodesic.hpp"
#include "finsler/isoparametric.hpp"
#include "finsler/legendre.hpp"
#include "finsler/oracles.hpp"
#include "finsler/randers.hpp"

namespace finsler {

namespace {

unsigned long long fnv1a(const std::string& s) {
  unsigned long long h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

double rel_scale(double max_abs) { return std::max(1.0, max_abs); }

double tensor3_diff(const Tensor3& a, const Tensor3& b) {
  double d = 0.0;
  const int n = a.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) d = std::max(d, std::abs(a(i, j, k) - b(i, j, k)));
  return d;
}

struct CheckContext {
  const CaseSpec* cs = nullptr;
  const CatalogModel* model = nullptr;
  const LevelSetSurface* surface = nullptr;  // may be null
  unsigned long long seed = 1;
  double tol_scale = 1.0;
};

using Results = std::vector<CheckResult>;

Rng check_rng(const CheckContext& ctx, const CheckSpec& spec) {
  return Rng(ctx.seed ^ fnv1a(ctx.cs->id + "/" + spec.name));
}

void push(Results& out, const CheckContext& ctx, const std::string& name, double residual,
          double tol, Json details = {}, std::vector<double> samples = {}) {
  CheckResult r = make_result(ctx.cs->id, name, residual, tol * ctx.tol_scale);
  r.details = std::move(details);
  r.sample_residuals = std::move(samples);
  out.push_back(std::move(r));
}

const LevelSetSurface& need_surface(const CheckContext& ctx, const CheckSpec& spec) {
  if (!ctx.surface) throw SchemaError("check '" + spec.name + "' requires a surface");
  return *ctx.surface;
}

SpaceFormProfile profile_of(const CheckContext& ctx) {
  if (ctx.model->profile_known) return ctx.model->profile;
  // measure c and c' when the catalog does not declare them
  Rng rng(ctx.seed ^ fnv1a("profile"));
  const Metric& m = ctx.model->metric;
  const int n = m.dim();
  double c_sum = 0.0, c_min = 1e300, c_max = -1e300;
  double cp_sum = 0.0, cp_min = 1e300, cp_max = -1e300;
  const int count = 40;
  for (int i = 0; i < count; ++i) {
    Vec x = ctx.model->sample_point(rng);
    Vec y = ctx.model->sample_direction(rng);
    y /= eval_F(m, x, y);
    Vec V = rng.normal_vec(n);
    double K = flag_curvature(m, x, y, V);
    c_sum += K;
    c_min = std::min(c_min, K);
    c_max = std::max(c_max, K);
    double cp = s_curvature(m, ctx.model->bh_volume, x, y) / (n + 1);
    cp_sum += cp;
    cp_min = std::min(cp_min, cp);
    cp_max = std::max(cp_max, cp);
  }
  SpaceFormProfile p;
  p.measured = true;
  p.c = c_sum / count;
  p.c_residual = c_max - c_min;
  p.c_prime = cp_sum / count;
  p.cp_residual = cp_max - cp_min;
  return p;
}

// ---- individual checks -----------------------------------------------------

void check_tensor_oracle(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const int points = spec.params.value("points", 100);
  Rng rng = check_rng(ctx, spec);
  double worst = 0.0;
  std::vector<double> samples;
  for (int p = 0; p < points; ++p) {
    Vec x = ctx.model->sample_point(rng);
    Vec y = ctx.model->sample_direction(rng);
    y /= eval_F(m, x, y);
    double r = 0.0;
    {
      Mat g = fundamental_tensor_unchecked(m, x, y);
      Mat go = oracle_fundamental_tensor(m, x, y);
      r = std::max(r, (g - go).cwiseAbs().maxCoeff() / rel_scale(g.cwiseAbs().maxCoeff()));
    }
    {
      Tensor3 C = cartan_tensor(m, x, y);
      Tensor3 Co = oracle_cartan(m, x, y);
      r = std::max(r, tensor3_diff(C, Co) / rel_scale(C.max_abs()));
    }
    {
      Vec G = spray_G(m, x, y);
      Vec Go = oracle_spray_G(m, x, y);
      r = std::max(r, (G - Go).cwiseAbs().maxCoeff() / rel_scale(G.cwiseAbs().maxCoeff()));
    }
    {
      SprayData s = spray_coefficients(m, x, y);
      Tensor3 Go = oracle_spray_Gamma(m, x, y);
      r = std::max(r, tensor3_diff(s.Gamma, Go) / rel_scale(s.Gamma.max_abs()));
    }
    {
      Tensor3 L = landsberg_tensor(m, x, y);
      Tensor3 Lo = oracle_landsberg(m, x, y);
      r = std::max(r, tensor3_diff(L, Lo) / rel_scale(L.max_abs()));
    }
    samples.push_back(r);
    worst = std::max(worst, r);
  }
  push(out, ctx, spec.name, worst, spec.tol > 0 ? spec.tol : 1e-6, {}, std::move(samples));
}

void check_algebraic_identities(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const int points = spec.params.value("points", 100);
  Rng rng = check_rng(ctx, spec);
  double metric_id = 0.0, cartan_c = 0.0, landsberg_c = 0.0, homog_F = 0.0, homog_G = 0.0,
         gamma_contr = 0.0, n_contr = 0.0;
  const int n = m.dim();
  for (int p = 0; p < points; ++p) {
    Vec x = ctx.model->sample_point(rng);
    Vec y = ctx.model->sample_direction(rng);
    const double F = eval_F(m, x, y);
    y /= F;
    Mat g = fundamental_tensor(m, x, y);
    metric_id = std::max(metric_id, std::abs(y.dot(g * y) - 1.0));
    Tensor3 C = cartan_tensor(m, x, y);
    Tensor3 L = landsberg_tensor(m, x, y);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double cc = 0.0, lc = 0.0;
        for (int k = 0; k < n; ++k) {
          cc += C(i, j, k) * y[k];
          lc += L(i, j, k) * y[k];
        }
        cartan_c = std::max(cartan_c, std::abs(cc));
        landsberg_c = std::max(landsberg_c, std::abs(lc));
      }
    const double lam = rng.uniform(0.2, 5.0);
    homog_F = std::max(homog_F,
                       std::abs(eval_F(m, x, Vec(lam * y)) - lam) / lam);
    SprayData s = spray_coefficients(m, x, y);
    Vec G2 = spray_G(m, x, Vec(2.0 * y));
    homog_G = std::max(homog_G, (G2 - 4.0 * s.G).cwiseAbs().maxCoeff() /
                                    rel_scale(4.0 * s.G.cwiseAbs().maxCoeff()));
    Mat Gy(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += s.Gamma(i, j, k) * y[k];
        Gy(i, j) = acc;
      }
    gamma_contr = std::max(gamma_contr, (Gy - s.N).cwiseAbs().maxCoeff());
    n_contr = std::max(n_contr, (s.N * y - 2.0 * s.G).cwiseAbs().maxCoeff());
  }
  push(out, ctx, spec.name + "/metric-identity", metric_id, 1e-9);
  push(out, ctx, spec.name + "/cartan-y-contraction", cartan_c, 1e-9);
  push(out, ctx, spec.name + "/landsberg-y-contraction", landsberg_c, 1e-9);
  push(out, ctx, spec.name + "/F-homogeneity", homog_F, 1e-10);
  push(out, ctx, spec.name + "/spray-homogeneity", homog_G, 1e-8);
  push(out, ctx, spec.name + "/gamma-contraction", gamma_contr, 1e-10);
  push(out, ctx, spec.name + "/N-contraction", n_contr, 1e-10);
}

void check_duality(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const int points = spec.params.value("points", 100);
  Rng rng = check_rng(ctx, spec);
  NewtonOptions generic;
  generic.use_model_initial_guess = false;
  double round_trip = 0.0, norm_id = 0.0, closed_dual = 0.0, closed_inverse = 0.0;
  for (int p = 0; p < points; ++p) {
    Vec x = ctx.model->sample_point(rng);
    Vec y = ctx.model->sample_direction(rng);
    y /= eval_F(m, x, y);
    Vec xi = legendre(m, x, y);
    Vec back = legendre_inverse(m, x, xi, generic);
    round_trip = std::max(round_trip, (back - y).cwiseAbs().maxCoeff() / y.cwiseAbs().maxCoeff());
    norm_id = std::max(norm_id, std::abs(dual_norm(m, x, xi, generic) - 1.0));
    if (auto nav = m.navigation()) {
      Vec zeta = rng.normal_vec(m.dim());
      double fd = randers_dual(*nav, x, zeta);
      double fn = dual_norm(m, x, zeta, generic);
      closed_dual = std::max(closed_dual, std::abs(fd - fn) / rel_scale(std::abs(fd)));
      Vec yc = randers_legendre_inverse(*nav, x, zeta);
      Vec yn = legendre_inverse(m, x, zeta, generic);
      closed_inverse = std::max(closed_inverse,
                                (yc - yn).cwiseAbs().maxCoeff() / rel_scale(yc.cwiseAbs().maxCoeff()));
    }
  }
  push(out, ctx, spec.name + "/round-trip", round_trip, 1e-8);
  push(out, ctx, spec.name + "/dual-norm", norm_id, 1e-8);
  if (m.navigation()) {
    push(out, ctx, spec.name + "/randers-closed-dual", closed_dual, 1e-8);
    push(out, ctx, spec.name + "/randers-closed-inverse", closed_inverse, 1e-8);
  }
}

void check_flag_constant(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const int flags = spec.params.value("flags", 200);
  const double expect = spec.params.value("expect", 0.0);
  Rng rng = check_rng(ctx, spec);
  double worst = 0.0;
  std::vector<double> samples;
  for (int p = 0; p < flags; ++p) {
    Vec x = ctx.model->sample_point(rng);
    Vec y = ctx.model->sample_direction(rng);
    Vec V = rng.normal_vec(m.dim());
    double K = flag_curvature(m, x, y, V);
    samples.push_back(std::abs(K - expect));
    worst = std::max(worst, samples.back());
  }
  push(out, ctx, spec.name, worst, spec.tol > 0 ? spec.tol : 1e-6,
       Json{{"expect", expect}}, std::move(samples));
}

void check_geodesic_conservation(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const int count = spec.params.value("count", 5);
  const double s_max = spec.params.value("s_max", 0.5 * m.chart().scale());
  Rng rng = check_rng(ctx, spec);
  double drift = 0.0;
  int done = 0, attempts = 0;
  while (done < count && attempts < 10 * count) {
    ++attempts;
    Vec x = ctx.model->sample_point(rng);
    Vec y = ctx.model->sample_direction(rng);
    try {
      GeodesicPath path = integrate_geodesic(m, x, y, s_max);
      for (int k = 0; k <= 50; ++k) {
        double s = s_max * k / 50.0;
        drift = std::max(drift, std::abs(eval_F(m, path.position(s), path.velocity(s)) - 1.0));
      }
      ++done;
    } catch (const PathExitsChart&) {
      continue;
    }
  }
  if (done < count) throw StepFailure("could not find geodesics staying in chart");
  push(out, ctx, spec.name, drift, spec.tol > 0 ? spec.tol : 1e-8);
}

void check_straight_line(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const int count = spec.params.value("count", 5);
  const double s_max = spec.params.value("s_max", 2.0);
  Rng rng = check_rng(ctx, spec);
  double worst = 0.0;
  for (int p = 0; p < count; ++p) {
    Vec x = ctx.model->sample_point(rng);
    Vec y = ctx.model->sample_direction(rng);
    const double F = eval_F(m, x, y);
    GeodesicPath path = integrate_geodesic(m, x, y, s_max);
    for (int k = 0; k <= 40; ++k) {
      double s = s_max * k / 40.0;
      worst = std::max(worst, (path.position(s) - (x + s * y / F)).cwiseAbs().maxCoeff());
    }
  }
  push(out, ctx, spec.name, worst, spec.tol > 0 ? spec.tol : 1e-9);
}

void check_parallel_transport(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const int count = spec.params.value("count", 3);
  const double s_max = spec.params.value("s_max", 0.4 * m.chart().scale());
  Rng rng = check_rng(ctx, spec);
  const int n = m.dim();
  double drift = 0.0;
  int done = 0, attempts = 0;
  while (done < count && attempts < 10 * count) {
    ++attempts;
    Vec x = ctx.model->sample_point(rng);
    Vec y = ctx.model->sample_direction(rng);
    y /= eval_F(m, x, y);
    std::vector<Vec> frame{y};
    for (int q = 1; q < n; ++q) frame.push_back(rng.normal_vec(n));
    try {
      TransportedFrame tf(m, x, y, s_max, frame);
      Mat g0 = fundamental_tensor(m, x, y);
      Mat pair0(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) pair0(a, b) = frame[a].dot(g0 * frame[b]);
      for (int k = 1; k <= 20; ++k) {
        double s = s_max * k / 20.0;
        Vec T = tf.velocity(s);
        Mat g = fundamental_tensor(m, tf.position(s), T);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            double v = tf.vector(a, s).dot(g * tf.vector(b, s));
            drift = std::max(drift, std::abs(v - pair0(a, b)) / rel_scale(std::abs(pair0(a, b))));
          }
      }
      ++done;
    } catch (const PathExitsChart&) {
      continue;
    }
  }
  if (done < count) throw StepFailure("could not find transports staying in chart");
  push(out, ctx, spec.name, drift, spec.tol > 0 ? spec.tol : 1e-8);
}

void check_focal_detect(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const LevelSetSurface& surf = need_surface(ctx, spec);
  const bool plus = spec.params.value("orientation", std::string("minus")) == "plus";
  const double s_hi = spec.params.value("s_hi", 2.0);
  Rng rng = check_rng(ctx, spec);
  // one surface point
  Vec seed = ctx.model->sample_point(rng);
  Vec x = project_to_level_set(m, surf, seed);
  SpaceFormProfile prof = profile_of(ctx);

  std::vector<FocalPoint> detected = detect_focal_numeric(m, surf, x, plus, 1e-4, s_hi);

  // Lemma-side prediction from the measured spectrum
  NormalPair np = unit_normal(m, surf, x);
  Vec n0 = plus ? np.n_plus : np.n_minus;
  CurvatureSpectrum spec_meas = principal_curvatures(m, surf, x, n0, 1e-6);
  std::vector<std::pair<double, int>> lemma;  // (s, multiplicity)
  for (int i = 0; i < spec_meas.g(); ++i)
    for (double s : focal_distances(prof.c, spec_meas.values[i], 1e-4, s_hi))
      lemma.push_back({s, spec_meas.multiplicities[i]});
  std::sort(lemma.begin(), lemma.end());

  double pos_resid = 0.0;
  double mult_mismatch = 0.0;
  double count_mismatch = std::abs(static_cast<double>(detected.size()) -
                                   static_cast<double>(lemma.size()));
  for (size_t i = 0; i < std::min(lemma.size(), detected.size()); ++i) {
    pos_resid = std::max(pos_resid, std::abs(detected[i].s - lemma[i].first));
    if (detected[i].multiplicity != lemma[i].second) mult_mismatch += 1.0;
  }
  if (spec.params.contains("expect")) {
    std::vector<double> exp_s = spec.params["expect"].get<std::vector<double>>();
    double r = std::abs(static_cast<double>(exp_s.size()) - static_cast<double>(detected.size()));
    for (size_t i = 0; i < std::min(exp_s.size(), detected.size()); ++i)
      r = std::max(r, std::abs(exp_s[i] - detected[i].s));
    push(out, ctx, spec.name + "/expected-position", r, spec.tol > 0 ? spec.tol : 1e-6);
  }
  push(out, ctx, spec.name + "/lemma31-agreement", pos_resid, spec.tol > 0 ? spec.tol : 1e-6);
  push(out, ctx, spec.name + "/count", count_mismatch, 0.0);
  push(out, ctx, spec.name + "/multiplicity", mult_mismatch, 0.0);
}

void check_tube_curvature(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const LevelSetSurface& surf = need_surface(ctx, spec);
  const bool plus = spec.params.value("orientation", std::string("minus")) == "plus";
  const double s_lo = spec.params.value("s_lo", 0.05);
  const double s_hi = spec.params.value("s_hi", 0.6);
  const int s_count = spec.params.value("s_count", 20);
  Rng rng = check_rng(ctx, spec);
  Vec x = project_to_level_set(m, surf, ctx.model->sample_point(rng));
  SpaceFormProfile prof = profile_of(ctx);

  NormalPair np = unit_normal(m, surf, x);
  Vec n0 = plus ? np.n_plus : np.n_minus;
  CurvatureSpectrum base = principal_curvatures(m, surf, x, n0, 1e-6);

  double worst = 0.0, gauss = 0.0;
  int used = 0;
  std::vector<double> samples;
  for (int k = 0; k < s_count; ++k) {
    const double s = s_lo + (s_hi - s_lo) * k / std::max(1, s_count - 1);
    // skip near-singular s
    SCValues v = sc_eval(prof.c, s);
    bool singular = false;
    for (double lam : base.values)
      if (std::abs(v.scp - lam * v.sc) < 1e-3) singular = true;
    if (singular) continue;
    CurvatureSpectrum pred = tube_principal_curvatures(prof.c, base, s, 1, 1e-8);
    MeasuredTubeSpectrum meas = measured_tube_spectrum(m, surf, x, plus, s, 1e-3);
    gauss = std::max(gauss, meas.gauss_residual);
    // compare multiplicity-expanded sorted eigenvalue lists
    std::vector<double> pv, mv;
    for (int i = 0; i < pred.g(); ++i)
      for (int q = 0; q < pred.multiplicities[i]; ++q) pv.push_back(pred.values[i]);
    for (int i = 0; i < meas.spectrum.g(); ++i)
      for (int q = 0; q < meas.spectrum.multiplicities[i]; ++q) mv.push_back(meas.spectrum.values[i]);
    double r = (pv.size() != mv.size()) ? 1.0 : 0.0;
    for (size_t q = 0; q < std::min(pv.size(), mv.size()); ++q)
      r = std::max(r, std::abs(pv[q] - mv[q]));
    samples.push_back(r);
    worst = std::max(worst, r);
    ++used;
  }
  push(out, ctx, spec.name, worst, spec.tol > 0 ? spec.tol : 1e-5,
       Json{{"grid_used", used}}, std::move(samples));
  push(out, ctx, spec.name + "/grid-size", used >= s_count * 3 / 4 ? 0.0 : 1.0, 0.0,
       Json{{"used", used}, {"requested", s_count}});
  push(out, ctx, spec.name + "/gauss-lemma", gauss, 1e-7);
}

void check_torsion_audit(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  auto nav = m.navigation();
  if (!nav) throw SchemaError("torsion-audit requires a navigation model");
  const int samples = spec.params.value("samples", 50);
  const std::string mode = spec.params.value("mode", std::string("killing"));
  Rng rng = check_rng(ctx, spec);
  TorsionAuditReport rep = torsion_audit(*nav, m, ctx.model->bh_volume, samples, rng);
  Json details{{"c_prime", rep.c_prime}, {"sup_torsion", rep.sup_torsion}};
  if (mode == "killing") {
    push(out, ctx, spec.name, rep.sup_torsion, spec.tol > 0 ? spec.tol : 1e-7, details);
  } else if (mode == "homothetic") {
    push(out, ctx, spec.name, rep.sup_residual_vs_2cpX, spec.tol > 0 ? spec.tol : 1e-6, details);
  } else {
    throw SchemaError("torsion-audit mode must be killing or homothetic");
  }
}

void check_s_curvature(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const int points = spec.params.value("points", 100);
  const std::string mode = spec.params.value("mode", std::string("zero"));
  Rng rng = check_rng(ctx, spec);
  std::vector<double> vals;
  for (int p = 0; p < points; ++p) {
    Vec x = ctx.model->sample_point(rng);
    Vec y = ctx.model->sample_direction(rng);
    y /= eval_F(m, x, y);
    vals.push_back(s_curvature(m, ctx.model->bh_volume, x, y));
  }
  if (mode == "zero") {
    double worst = 0.0;
    for (double v : vals) worst = std::max(worst, std::abs(v));
    push(out, ctx, spec.name, worst, spec.tol > 0 ? spec.tol : 1e-5, {}, std::move(vals));
  } else if (mode == "const-ratio") {
    // S/F with F = 1 by normalization: spread of the values
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    double spread = 0.0;
    for (double v : vals) spread = std::max(spread, std::abs(v - mean));
    push(out, ctx, spec.name, spread, spec.tol > 0 ? spec.tol : 1e-4,
         Json{{"mean_S_over_F", mean}, {"c_prime", mean / (m.dim() + 1)}}, std::move(vals));
  } else {
    throw SchemaError("s-curvature mode must be zero or const-ratio");
  }
}

CurvatureSpectrum synthetic_spectrum(double c, int g, double theta1,
                                     const std::vector<int>& mults, double shift_first = 0.0) {
  CurvatureSpectrum s;
  const double r = std::sqrt(c);
  for (int i = 0; i < g; ++i) {
    double theta = theta1 + i * M_PI / g;
    if (i == 0) theta += shift_first;
    s.values.push_back(r / std::tan(theta));
    s.multiplicities.push_back(mults[i]);
  }
  std::reverse(s.values.begin(), s.values.end());  // ascending lambda
  std::reverse(s.multiplicities.begin(), s.multiplicities.end());
  return s;
}

void check_cartan_measured(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const LevelSetSurface& surf = need_surface(ctx, spec);
  const bool plus = spec.params.value("orientation", std::string("minus")) == "plus";
  Rng rng = check_rng(ctx, spec);
  SpaceFormProfile prof = profile_of(ctx);
  double worst = 0.0;
  const int points = spec.params.value("points", 4);
  for (int p = 0; p < points; ++p) {
    Vec x = project_to_level_set(m, surf, ctx.model->sample_point(rng));
    NormalPair np = unit_normal(m, surf, x);
    CurvatureSpectrum sp = principal_curvatures(m, surf, x, plus ? np.n_plus : np.n_minus, 1e-6);
    if (sp.g() == 1) continue;  // empty-sum residual is identically zero
    CartanResidual r = cartan_residuals(prof.c, sp);
    worst = std::max(worst, r.max_abs());
  }
  push(out, ctx, spec.name, worst, spec.tol > 0 ? spec.tol : 1e-7);
}

void check_cartan_synthetic(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const double c = spec.params.value("c", 1.0);
  const int g = spec.params.value("g", 3);
  const double theta1 = spec.params.value("theta1", 0.4);
  std::vector<int> mults = spec.params.contains("mults")
                               ? spec.params["mults"].get<std::vector<int>>()
                               : std::vector<int>(g, 1);
  CurvatureSpectrum sp = synthetic_spectrum(c, g, theta1, mults);
  CartanResidual r = cartan_residuals(c, sp);
  push(out, ctx, spec.name, r.max_abs(), spec.tol > 0 ? spec.tol : 1e-12,
       Json{{"g", g}, {"theta1", theta1}});
}

void check_cartan_detect(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const double c = spec.params.value("c", 1.0);
  const int g = spec.params.value("g", 3);
  const double theta1 = spec.params.value("theta1", 0.4);
  const double shift = spec.params.value("shift", 0.05);
  const double min_magnitude = spec.params.value("min_magnitude", 1e-3);
  std::vector<int> mults = spec.params.contains("mults")
                               ? spec.params["mults"].get<std::vector<int>>()
                               : std::vector<int>(g, 1);
  CurvatureSpectrum sp = synthetic_spectrum(c, g, theta1, mults, shift);
  CartanResidual r = cartan_residuals(c, sp);
  // detection means the perturbed residual exceeds min_magnitude
  push(out, ctx, spec.name, std::max(0.0, min_magnitude - r.max_abs()), 0.0,
       Json{{"residual", r.max_abs()}, {"required_above", min_magnitude}});
}

void check_isoparam(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const LevelSetSurface& surf = need_surface(ctx, spec);
  std::vector<double> levels = spec.params.contains("levels")
                                   ? spec.params["levels"].get<std::vector<double>>()
                                   : std::vector<double>{surf.level};
  const int samples = spec.params.value("samples", 32);
  const bool expect = spec.params.value("expect", true);
  const std::string law = spec.params.value("law", std::string("none"));
  const double tol = spec.tol > 0 ? spec.tol : 1e-6;
  Rng rng = check_rng(ctx, spec);
  IsoparametricReport rep = verify_isoparametric(m, ctx.model->bh_volume, surf.f, levels, samples,
                                                 tol, rng, ctx.model->interior_radius);
  push(out, ctx, spec.name + "/verdict", rep.isoparametric == expect ? 0.0 : 1.0, 0.0,
       Json{{"transnormal", rep.transnormal},
            {"isoparametric", rep.isoparametric},
            {"a_tilde", rep.a_tilde},
            {"b_tilde", rep.b_tilde}});
  if (expect) {
    double spread = 0.0;
    for (double v : rep.a_spread) spread = std::max(spread, v);
    for (double v : rep.b_spread) spread = std::max(spread, v);
    push(out, ctx, spec.name + "/spread", spread, tol);
  }
  if (law != "none") {
    double worst = 0.0;
    for (size_t i = 0; i < levels.size(); ++i) {
      double expect_b = 0.0;
      if (law == "radial") expect_b = (m.dim() - 1) / levels[i];
      else if (law != "zero") throw SchemaError("isoparam law must be none, zero or radial");
      worst = std::max(worst, std::abs(rep.b_tilde[i] - expect_b));
    }
    push(out, ctx, spec.name + "/btilde-law", worst, tol);
  }
}

void check_spacing_synthetic(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const double c = spec.params.value("c", 1.0);
  const int g = spec.params.value("g", 3);
  const double theta1 = spec.params.value("theta1", 0.35);
  std::vector<int> mults(g, 1);
  CurvatureSpectrum sp = synthetic_spectrum(c, g, theta1, mults);
  SpacingCheck sc = check_spacing(c, sp);
  push(out, ctx, spec.name, sc.deviation, spec.tol > 0 ? spec.tol : 1e-12);
}

void check_multiplicity_cases(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  if (!spec.params.contains("cases")) throw SchemaError("multiplicity-pattern needs 'cases'");
  double mismatches = 0.0;
  for (const Json& c : spec.params["cases"]) {
    std::vector<int> mlist = c.at("m").get<std::vector<int>>();
    bool expect = c.at("expect").get<bool>();
    if (check_multiplicity_pattern(mlist) != expect) mismatches += 1.0;
  }
  push(out, ctx, spec.name, mismatches, 0.0);
}

void check_count_bound(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  if (!spec.params.contains("entries")) throw SchemaError("count-bound needs 'entries'");
  double mismatches = 0.0;
  for (const Json& e : spec.params["entries"]) {
    CurvatureSpectrum sp;
    sp.values = e.at("values").get<std::vector<double>>();
    sp.multiplicities = e.at("mults").get<std::vector<int>>();
    const double c = e.at("c").get<double>();
    const bool expect = e.at("expect").get<bool>();
    if (count_bound_check(c, sp, 1e-9) != expect) mismatches += 1.0;
  }
  push(out, ctx, spec.name, mismatches, 0.0);
}

void check_minimality(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const std::string mode = spec.params.value("mode", std::string("focal"));
  Rng rng = check_rng(ctx, spec);
  if (mode == "control-circle") {
    // synthetic non-minimal control: a circle is not anisotropic-minimal
    const double r = spec.params.value("radius", 1.0);
    const double threshold = spec.params.value("min_trace", 1e-2);
    FocalSample sample;
    sample.dim = 1;
    sample.chart = [r](const Vec& u) {
      Vec p(3);
      p[0] = r * std::cos(u[0] / r);
      p[1] = r * std::sin(u[0] / r);
      p[2] = 0.0;
      return p;
    };
    Vec p0(3);
    p0[0] = r;
    p0[1] = 0.0;
    p0[2] = 0.0;
    Vec inward(3);
    inward << -1.0, 0.0, 0.0;
    sample.normal_seeds.push_back(inward / eval_F(m, p0, inward));
    MinimalityReport rep = minimality_audit(m, {sample});
    push(out, ctx, spec.name, std::max(0.0, threshold - rep.max_trace), 0.0,
         Json{{"max_trace", rep.max_trace}});
    return;
  }
  const LevelSetSurface& surf = need_surface(ctx, spec);
  SpaceFormProfile prof = profile_of(ctx);
  const bool plus = spec.params.value("orientation", std::string("minus")) == "plus";
  const int points = spec.params.value("points", 2);
  const int extra = spec.params.value("extra_normals", 4);
  std::vector<Vec> base;
  for (int p = 0; p < points; ++p)
    base.push_back(project_to_level_set(m, surf, ctx.model->sample_point(rng)));
  // collapse the largest-curvature cluster by default
  Vec probe_x = base.front();
  NormalPair np = unit_normal(m, surf, probe_x);
  CurvatureSpectrum sp0 = principal_curvatures(m, surf, probe_x, plus ? np.n_plus : np.n_minus, 1e-6);
  const int which = spec.params.value("which", sp0.g() - 1);
  std::vector<FocalSample> samples =
      make_focal_samples(m, surf, base, plus, prof.c, which, extra, rng);
  MinimalityReport rep = minimality_audit(m, samples);
  push(out, ctx, spec.name, rep.max_trace, spec.tol > 0 ? spec.tol : 1e-6,
       Json{{"audited", rep.audited}, {"vacuous", rep.vacuous}});
}

void check_bh_cross(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const int points = spec.params.value("points", 8);
  const int order = m.dim() <= 3 ? 48 : 24;
  Rng rng = check_rng(ctx, spec);
  double worst = 0.0;
  for (int p = 0; p < points; ++p) {
    Vec x = ctx.model->sample_point(rng);
    const double quad = bh_density(m, x, order);
    double closed;
    if (auto nav = m.navigation()) {
      closed = bh_density_randers(*nav, x);
    } else if (m.kind() == MetricKind::funk_ball) {
      closed = 1.0;
    } else if (auto h = m.riemann_h()) {
      Mat hm;
      std::vector<Mat> dh;
      matrix_field_partials(*h, x, hm, dh);
      closed = std::sqrt(hm.determinant());
    } else {
      closed = bh_density(m, x, order / 2);  // convergence consistency
    }
    worst = std::max(worst, std::abs(quad - closed) / rel_scale(std::abs(closed)));
  }
  push(out, ctx, spec.name, worst, spec.tol > 0 ? spec.tol : 1e-5);
}

void check_spray_closed(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  auto nav = m.navigation();
  if (!nav) throw SchemaError("spray-closed-vs-ad requires a navigation model");
  const int points = spec.params.value("points", 50);
  Rng rng = check_rng(ctx, spec);
  std::vector<Vec> cls_samples;
  for (int i = 0; i < 16; ++i) cls_samples.push_back(ctx.model->sample_point(rng));
  KillingClassification cls = killing_classify(*nav, cls_samples);
  double worst = 0.0;
  for (int p = 0; p < points; ++p) {
    Vec x = ctx.model->sample_point(rng);
    Vec y = ctx.model->sample_direction(rng);
    y /= eval_F(m, x, y);
    Vec closed = randers_spray_closed(*nav, x, y, cls);
    Vec ad = spray_G(m, x, y);
    worst = std::max(worst, (closed - ad).cwiseAbs().maxCoeff() /
                                rel_scale(ad.cwiseAbs().maxCoeff()));
  }
  push(out, ctx, spec.name, worst, spec.tol > 0 ? spec.tol : 1e-7);
}

void check_killing_classify(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  auto nav = m.navigation();
  if (!nav) throw SchemaError("killing-classify requires a navigation model");
  const std::string expect = spec.params.value("expect", std::string("killing"));
  Rng rng = check_rng(ctx, spec);
  std::vector<Vec> samples;
  for (int i = 0; i < 32; ++i) samples.push_back(ctx.model->sample_point(rng));
  KillingClassification cls = killing_classify(*nav, samples);
  std::string got = cls.verdict == KillingClassification::Verdict::killing       ? "killing"
                    : cls.verdict == KillingClassification::Verdict::homothetic ? "homothetic"
                                                                                : "generic";
  push(out, ctx, spec.name, got == expect ? 0.0 : 1.0, 0.0,
       Json{{"verdict", got}, {"defect", cls.defect}, {"kappa", cls.kappa}});
}

void check_jacobi_agreement(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  const Metric& m = ctx.model->metric;
  const int count = spec.params.value("count", 2);
  const double s_max = spec.params.value("s_max", 0.3 * m.chart().scale());
  Rng rng = check_rng(ctx, spec);
  SpaceFormProfile prof = profile_of(ctx);
  const int n = m.dim();
  double worst = 0.0;
  for (int p = 0; p < count; ++p) {
    Vec x0 = ctx.model->sample_point(rng);
    Vec xi = rng.normal_vec(n);
    xi /= xi.norm();
    auto normal_at = [&](const Vec& q) {
      Vec y = legendre_inverse(m, q, xi);
      return Vec(y / eval_F(m, q, y));
    };
    Vec v = rng.normal_vec(n);
    v -= (xi.dot(v) / xi.dot(xi)) * xi;  // xi(v) = 0 => g_n(n, v) = 0
    v /= v.norm();
    auto curve = [&](double t) { return Vec(x0 + t * v); };
    auto normal_t = [&](double t) { return normal_at(curve(t)); };
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(s_max * k / 10.0);

    // J'(0) = D^n_v n along the curve
    const double h = 1e-5 * m.chart().scale();
    Vec dn = (normal_t(h) - normal_t(-h)) / (2.0 * h);
    Vec n0 = normal_t(0.0);
    SprayData sp = spray_coefficients(m, x0, n0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) dn[i] += sp.Gamma(i, j, k) * v[j] * n0[k];

    JacobiSolution cf = jacobi_closed_form(m, prof.c, x0, n0, s_max, v, dn, grid);
    JacobiSolution num = jacobi_numeric(m, curve, normal_t, s_max, grid);
    for (size_t k = 0; k < grid.size(); ++k)
      worst = std::max(worst, (cf.J[k] - num.J[k]).cwiseAbs().maxCoeff());
  }
  push(out, ctx, spec.name, worst, spec.tol > 0 ? spec.tol : 1e-5);
}

void check_measure_profile(const CheckContext& ctx, const CheckSpec& spec, Results& out) {
  SpaceFormProfile prof = profile_of(ctx);
  // residual: spread of the measured constants (constancy is the claim)
  push(out, ctx, spec.name, std::max(prof.c_residual, prof.cp_residual),
       spec.tol > 0 ? spec.tol : 1e-4,
       Json{{"c", prof.c}, {"c_prime", prof.c_prime}, {"measured", prof.measured}});
}

using CheckFn = void (*)(const CheckContext&, const CheckSpec&, Results&);

const std::map<std::string, std::pair<CheckFn, double>>& registry() {
  static const std::map<std::string, std::pair<CheckFn, double>> reg = {
      {"tensor-oracle", {check_tensor_oracle, 1e-6}},
      {"algebraic-identities", {check_algebraic_identities, 1e-9}},
      {"duality", {check_duality, 1e-8}},
      {"flag-constant", {check_flag_constant, 1e-6}},
      {"geodesic-conservation", {check_geodesic_conservation, 1e-8}},
      {"straight-line", {check_straight_line, 1e-9}},
      {"parallel-transport", {check_parallel_transport, 1e-8}},
      {"focal-detect", {check_focal_detect, 1e-6}},
      {"tube-curvature", {check_tube_curvature, 1e-5}},
      {"torsion-audit", {check_torsion_audit, 1e-7}},
      {"s-curvature", {check_s_curvature, 1e-5}},
      {"cartan-measured", {check_cartan_measured, 1e-7}},
      {"cartan-synthetic", {check_cartan_synthetic, 1e-12}},
      {"cartan-detect", {check_cartan_detect, 0.0}},
      {"isoparam", {check_isoparam, 1e-6}},
      {"spacing-synthetic", {check_spacing_synthetic, 1e-12}},
      {"multiplicity-pattern", {check_multiplicity_cases, 0.0}},
      {"count-bound", {check_count_bound, 0.0}},
      {"minimality", {check_minimality, 1e-6}},
      {"bh-cross-check", {check_bh_cross, 1e-5}},
      {"spray-closed-vs-ad", {check_spray_closed, 1e-7}},
      {"killing-classify", {check_killing_classify, 0.0}},
      {"jacobi-agreement", {check_jacobi_agreement, 1e-5}},
      {"measure-profile", {check_measure_profile, 1e-4}},
  };
  return reg;
}

}  // namespace

std::vector<std::pair<std::string, double>> known_checks() {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [name, entry] : registry()) out.push_back({name, entry.second});
  return out;
}

Scenario scenario_from_json(const Json& j) {
  Scenario sc;
  if (!j.is_object()) throw SchemaError("scenario root must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "id" && key != "seed" && key != "tol_scale" && key != "cases")
      throw SchemaError("unknown scenario field '" + key + "'");
    (void)value;
  }
  sc.id = j.value("id", std::string("scenario"));
  sc.seed = j.value("seed", 1ULL);
  sc.tol_scale = j.value("tol_scale", 1.0);
  if (!j.contains("cases") || !j["cases"].is_array() || j["cases"].empty())
    throw SchemaError("scenario needs a non-empty 'cases' array");
  int idx = 0;
  for (const Json& cj : j["cases"]) {
    CaseSpec cs;
    for (const auto& [key, value] : cj.items()) {
      if (key != "id" && key != "metric" && key != "surface" && key != "checks")
        throw SchemaError("unknown case field '" + key + "'");
      (void)value;
    }
    if (!cj.contains("metric")) throw SchemaError("case missing 'metric'");
    const Json& mj = cj["metric"];
    if (!mj.contains("catalog")) throw SchemaError("metric missing 'catalog'");
    cs.metric_id = mj["catalog"].get<std::string>();
    cs.n = mj.value("n", 3);
    if (mj.contains("params"))
      for (const auto& [k, v] : mj["params"].items()) cs.metric_params[k] = v.get<double>();
    cs.id = cj.value("id", cs.metric_id + "-" + std::to_string(idx));
    if (cj.contains("surface")) {
      SurfaceSpec ss;
      const Json& sj = cj["surface"];
      if (!sj.contains("catalog")) throw SchemaError("surface missing 'catalog'");
      ss.catalog = sj["catalog"].get<std::string>();
      if (sj.contains("params"))
        for (const auto& [k, v] : sj["params"].items()) ss.params[k] = v.get<double>();
      cs.surface = ss;
    }
    if (!cj.contains("checks") || !cj["checks"].is_array())
      throw SchemaError("case missing 'checks' array");
    for (const Json& kj : cj["checks"]) {
      CheckSpec spec;
      if (kj.is_string()) {
        spec.name = kj.get<std::string>();
      } else {
        if (!kj.contains("name")) throw SchemaError("check missing 'name'");
        spec.name = kj["name"].get<std::string>();
        spec.tol = kj.value("tol", 0.0);
        spec.params = kj.value("params", Json::object());
      }
      if (registry().find(spec.name) == registry().end())
        throw SchemaError("unknown check name '" + spec.name + "'");
      cs.checks.push_back(std::move(spec));
    }
    sc.cases.push_back(std::move(cs));
    ++idx;
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open scenario file " + path);
  Json j;
  try {
    j = Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("scenario parse error: ") + e.what());
  }
  Scenario sc = scenario_from_json(j);
  // validate catalog ids eagerly so bad files fail on load
  for (const CaseSpec& cs : sc.cases) {
    CatalogModel model = make_catalog_model(cs.metric_id, cs.n, cs.metric_params);
    if (cs.surface) make_catalog_surface(model, cs.surface->catalog, cs.surface->params);
  }
  return sc;
}

VerificationReport run_scenario(const Scenario& sc) {
  VerificationReport rep;
  rep.scenario_id = sc.id;
  rep.seed = sc.seed;
  Json wall = Json::array();
  for (const CaseSpec& cs : sc.cases) {
    CatalogModel model = make_catalog_model(cs.metric_id, cs.n, cs.metric_params);
    std::optional<LevelSetSurface> surface;
    if (cs.surface) surface = make_catalog_surface(model, cs.surface->catalog, cs.surface->params);
    CheckContext ctx;
    ctx.cs = &cs;
    ctx.model = &model;
    ctx.surface = surface ? &*surface : nullptr;
    ctx.seed = sc.seed;
    ctx.tol_scale = sc.tol_scale;
    for (const CheckSpec& spec : cs.checks) {
      const auto t0 = std::chrono::steady_clock::now();
      Results results;
      try {
        registry().at(spec.name).first(ctx, spec, results);
      } catch (const Error& e) {
        CheckResult r = make_result(cs.id, spec.name, std::numeric_limits<double>::infinity(),
                                    spec.tol);
        r.pass = false;
        r.details = Json{{"error", e.what()}};
        results.push_back(std::move(r));
      }
      const auto t1 = std::chrono::steady_clock::now();
      wall.push_back(Json{
          {"case", cs.id},
          {"check", spec.name},
          {"ms", std::chrono::duration<double, std::milli>(t1 - t0).count()}});
      for (CheckResult& r : results) rep.checks.push_back(std::move(r));
    }
  }
  rep.environment = Json{{"tool", "finlab"},
                         {"version", "0.1.0"},
                         {"timings", wall}};
  return rep;
}

}  // namespace finsler
