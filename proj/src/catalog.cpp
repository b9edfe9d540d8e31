#include "finsler/catalog.hpp"

#include <cmath>

namespace finsler {

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

struct EuclideanF2 {
  template <class S>
  S operator()(const S* /*x*/, const S* y, int n) const {
    S acc = S(0.0);
    for (int i = 0; i < n; ++i) acc += y[i] * y[i];
    return acc;
  }
};

// F = (sum y_i^4)^{1/4}; smooth and strongly convex away from the axes.
struct QuarticF2 {
  template <class S>
  S operator()(const S* /*x*/, const S* y, int n) const {
    S acc = S(0.0);
    for (int i = 0; i < n; ++i) {
      S q = y[i] * y[i];
      acc += q * q;
    }
    return sqrt(acc);
  }
};

struct RiemannianF2 {
  std::shared_ptr<const MatrixField> h;
  template <class S>
  S operator()(const S* x, const S* y, int n) const {
    S hm[kMaxDim * kMaxDim];
    h->eval(x, hm);
    S acc = S(0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += hm[i * n + j] * y[i] * y[j];
    return acc;
  }
};

// Funk metric of the unit ball: F = (sqrt((1-|x|^2)|y|^2 + <x,y>^2) + <x,y>) / (1-|x|^2).
struct FunkF2 {
  template <class S>
  S operator()(const S* x, const S* y, int n) const {
    S xx = S(0.0), yy = S(0.0), xy = S(0.0);
    for (int i = 0; i < n; ++i) {
      xx += x[i] * x[i];
      yy += y[i] * y[i];
      xy += x[i] * y[i];
    }
    S lam = 1.0 - xx;
    S F = (sqrt(lam * yy + xy * xy) + xy) / lam;
    return F * F;
  }
};

// Round-sphere metric in the stereographic chart: h = 4 delta / (1+|x|^2)^2.
struct StereographicH {
  template <class S>
  void operator()(const S* x, S* out, int n) const {
    S xx = S(0.0);
    for (int i = 0; i < n; ++i) xx += x[i] * x[i];
    S den = 1.0 + xx;
    S f = 4.0 / (den * den);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[i * n + j] = (i == j) ? f : S(0.0);
  }
};

struct EuclideanH {
  template <class S>
  void operator()(const S* /*x*/, S* out, int n) const {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[i * n + j] = S(i == j ? 1.0 : 0.0);
  }
};

// W = eps (-x2, x1, 0, ...): rotation in the first coordinate plane.
struct RotationW {
  double eps;
  template <class S>
  void operator()(const S* x, S* out, int n) const {
    out[0] = -eps * x[1];
    out[1] = eps * x[0];
    for (int i = 2; i < n; ++i) out[i] = S(0.0);
  }
};

// W = kappa x: homothetic dilation field.
struct DilationW {
  double kappa;
  template <class S>
  void operator()(const S* x, S* out, int n) const {
    for (int i = 0; i < n; ++i) out[i] = kappa * x[i];
  }
};

struct ZeroMap {
  template <class S>
  S operator()(const S* /*x*/, int) const {
    return S(0.0);
  }
};

// ln sqrt(det h) for the stereographic round metric: n (ln 2 - ln(1+|x|^2)).
struct StereoLogDet {
  int n;
  template <class S>
  S operator()(const S* x, int nn) const {
    S xx = S(0.0);
    for (int i = 0; i < nn; ++i) xx += x[i] * x[i];
    return n * (log(S(2.0)) - log(1.0 + xx));
  }
};

CatalogModel with_bh_quadrature(CatalogModel m, int order) {
  m.bh_volume = make_bh_volume(m.metric, order);
  return m;
}

}  // namespace

Vec CatalogModel::sample_point(Rng& rng) const {
  const int n = metric.dim();
  for (;;) {
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
    if (x.norm() <= 1.0) return metric.chart().center + interior_radius * x;
  }
}

Vec CatalogModel::sample_direction(Rng& rng) const {
  const int n = metric.dim();
  for (;;) {
    Vec y = rng.normal_vec(n);
    double nrm = y.norm();
    if (nrm < 1e-8) continue;
    y /= nrm;
    if (axis_degenerate && y.cwiseAbs().minCoeff() < 0.25 * y.cwiseAbs().maxCoeff()) continue;
    return y;
  }
}

CatalogModel make_catalog_model(const std::string& id, int n,
                                const std::map<std::string, double>& params) {
  if (n < 2 || n > 4) throw SchemaError("catalog models support n in {2,3,4}");
  CatalogModel m;
  m.id = id;
  const int order = static_cast<int>(param(params, "quadrature_order", n <= 3 ? 48 : 24));

  if (id == "euclidean") {
    m.metric = Metric(MetricKind::riemannian, Chart::ball(n, 10.0),
                      make_metric_kernel(n, EuclideanF2{}));
    m.metric.set_reversible(true).set_riemann_h(make_matrix_field(n, EuclideanH{}));
    m.interior_radius = 4.0;
    m.profile = {0.0, 0.0, false, 0.0, 0.0};
    m.profile_known = true;
    VolumeForm v;
    v.density = [](const Vec&) { return 1.0; };
    v.log_density = make_scalar_map(n, ZeroMap{});
    m.bh_volume = v;
    return m;
  }
  if (id == "minkowski-quartic") {
    m.metric = Metric(MetricKind::minkowski_norm, Chart::ball(n, 10.0),
                      make_metric_kernel(n, QuarticF2{}));
    m.metric.set_reversible(true);
    m.interior_radius = 4.0;
    m.axis_degenerate = true;
    m.profile = {0.0, 0.0, false, 0.0, 0.0};
    m.profile_known = true;
    // x-independent: density is the constant computed once at the center
    Metric metric_copy = m.metric;
    const double sigma0 = bh_density(metric_copy, Vec::Zero(n), order);
    VolumeForm v;
    v.density = [sigma0](const Vec&) { return sigma0; };
    v.log_density = make_scalar_map(n, ZeroMap{});
    m.bh_volume = v;
    return m;
  }
  if (id == "riemannian-sphere-stereographic") {
    auto h = make_matrix_field(n, StereographicH{});
    m.metric = Metric(MetricKind::riemannian, Chart::ball(n, 1.6),
                      make_metric_kernel(n, RiemannianF2{h}));
    m.metric.set_reversible(true).set_riemann_h(h);
    m.interior_radius = 0.9;
    m.profile = {1.0, 0.0, false, 0.0, 0.0};
    m.profile_known = true;
    // BH density of a Riemannian metric is sqrt(det h) = (2/(1+|x|^2))^n
    VolumeForm v;
    v.density = [n](const Vec& x) { return std::pow(2.0 / (1.0 + x.squaredNorm()), n); };
    v.log_density = make_scalar_map(n, StereoLogDet{n});
    m.bh_volume = v;
    return m;
  }
  if (id == "funk-ball") {
    m.metric = Metric(MetricKind::funk_ball, Chart::ball(n, 0.8),
                      make_metric_kernel(n, FunkF2{}));
    m.metric.set_reversible(false).set_both_complete(false);
    m.interior_radius = 0.45;
    m.profile = {-0.25, 0.5, false, 0.0, 0.0};
    m.profile_known = true;
    // BH density of the Funk ball is identically 1.
    VolumeForm v;
    v.density = [](const Vec&) { return 1.0; };
    v.log_density = make_scalar_map(n, ZeroMap{});
    m.bh_volume = v;
    return m;
  }

  // Randers navigation entries.
  auto nav = std::make_shared<NavigationData>();
  nav->n = n;
  if (id == "randers-rotation") {
    const double eps = param(params, "eps", 0.4);
    nav->chart = Chart::ball(n, std::min(10.0, 0.85 / std::max(eps, 1e-6)));
    nav->h = make_matrix_field(n, EuclideanH{});
    nav->W = make_vector_field(n, RotationW{eps});
    m.metric = build_randers(nav);
    m.interior_radius = 0.45 * nav->chart.radius;
    m.profile = {0.0, 0.0, false, 0.0, 0.0};
    m.profile_known = true;
    m.bh_volume = make_randers_bh_volume(nav);
    m.id = id;
    return m;
  }
  if (id == "randers-dilation") {
    const double kappa = param(params, "kappa", 0.35);
    nav->chart = Chart::ball(n, std::min(10.0, 0.85 / std::max(std::abs(kappa), 1e-6)));
    nav->h = make_matrix_field(n, EuclideanH{});
    nav->W = make_vector_field(n, DilationW{kappa});
    m.metric = build_randers(nav);
    m.interior_radius = 0.45 * nav->chart.radius;
    // flag and S constants are measured, not declared
    m.profile = {0.0, 0.0, true, 0.0, 0.0};
    m.profile_known = false;
    m.bh_volume = make_randers_bh_volume(nav);
    return m;
  }
  if (id == "randers-sphere-rotation") {
    const double eps = param(params, "eps", 0.35);
    nav->chart = Chart::ball(n, 1.6);
    nav->h = make_matrix_field(n, StereographicH{});
    nav->W = make_vector_field(n, RotationW{eps});
    m.metric = build_randers(nav);
    m.interior_radius = 0.9;
    m.profile = {1.0, 0.0, false, 0.0, 0.0};
    m.profile_known = true;
    m.bh_volume = make_randers_bh_volume(nav);
    return m;
  }
  (void)with_bh_quadrature;
  throw UnknownCatalogId("unknown catalog metric '" + id + "'");
}

std::vector<std::string> catalog_model_ids() {
  return {"euclidean",       "minkowski-quartic", "riemannian-sphere-stereographic",
          "randers-rotation", "randers-dilation",  "randers-sphere-rotation",
          "funk-ball"};
}

LevelSetSurface make_catalog_surface(const CatalogModel& model, const std::string& id,
                                     const std::map<std::string, double>& params) {
  const int n = model.metric.dim();
  if (id == "hyperplane") {
    // direction defaults to (1,...,1)/sqrt(n), which stays inside the strongly
    // convex cone of every catalog norm
    Vec d = Vec::Ones(n);
    if (params.count("axis")) {
      d = Vec::Zero(n);
      d[static_cast<int>(param(params, "axis", 0))] = 1.0;
    }
    d /= d.norm();
    const double level = param(params, "level", 0.25);
    ScalarField f;
    f.value = [d](const Vec& x) { return d.dot(x); };
    f.grad = [d](const Vec&) { return d; };
    return LevelSetSurface{f, level};
  }
  if (id == "sphere") {
    const double r = param(params, "radius", 1.0);
    ScalarField f;
    f.value = [](const Vec& x) { return x.norm(); };
    f.grad = [](const Vec& x) { return Vec(x / x.norm()); };
    return LevelSetSurface{f, r};
  }
  if (id == "f-sphere") {
    if (model.metric.kind() != MetricKind::minkowski_norm)
      throw SchemaError("f-sphere requires a Minkowski-norm model");
    const double r = param(params, "radius", 1.0);
    Metric metric = model.metric;
    ScalarField f;
    f.value = [metric](const Vec& x) {
      return std::sqrt(metric.kernel().f2(x.data(), x.data()));
    };
    // df = L(x/F(x)) by 1-homogeneity of the norm in the position argument
    f.grad = [metric](const Vec& x) {
      Vec xi = legendre(metric, Vec(Vec::Zero(x.size())), x);
      return Vec(xi / std::sqrt(metric.kernel().f2(x.data(), x.data())));
    };
    return LevelSetSurface{f, r};
  }
  if (id == "cylinder") {
    if (n < 3) throw SchemaError("cylinder surface needs n >= 3");
    const double r = param(params, "radius", 1.0);
    ScalarField f;
    f.value = [](const Vec& x) { return std::hypot(x[0], x[1]); };
    f.grad = [n](const Vec& x) {
      Vec g = Vec::Zero(n);
      const double rho = std::hypot(x[0], x[1]);
      g[0] = x[0] / rho;
      g[1] = x[1] / rho;
      return g;
    };
    return LevelSetSurface{f, r};
  }
  if (id == "tilted-parabola") {
    // constructed non-isoparametric control: f = x1 + x2^2
    const double level = param(params, "level", 0.25);
    ScalarField f;
    f.value = [](const Vec& x) { return x[0] + x[1] * x[1]; };
    f.grad = [n](const Vec& x) {
      Vec g = Vec::Zero(n);
      g[0] = 1.0;
      g[1] = 2.0 * x[1];
      return g;
    };
    return LevelSetSurface{f, level};
  }
  throw UnknownCatalogId("unknown catalog surface '" + id + "'");
}

std::vector<std::string> catalog_surface_ids() {
  return {"hyperplane", "sphere", "f-sphere", "cylinder", "tilted-parabola"};
}

}  // namespace finsler
