#include <doctest.h>

#include "finsler/oracles.hpp"
#include "support.hpp"

using namespace finsler;
using namespace finsler::testing;

namespace {

struct IdentityH {
  template <class S>
  void operator()(const S* /*x*/, S* out, int n) const {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[i * n + j] = S(i == j ? 1.0 : 0.0);
  }
};

struct HalfLeftW {
  template <class S>
  void operator()(const S* /*x*/, S* out, int n) const {
    out[0] = S(-0.5);
    for (int i = 1; i < n; ++i) out[i] = S(0.0);
  }
};

Metric make_shifted_disk_metric() {
  auto nav = std::make_shared<NavigationData>();
  nav->n = 2;
  nav->chart = Chart::ball(2, 1.0);
  nav->h = make_matrix_field(2, IdentityH{});
  nav->W = make_vector_field(2, HalfLeftW{});
  return build_randers(nav);
}

}  // namespace

TEST_CASE("eval_F on the spot-check metrics") {
  CatalogModel eu = make_catalog_model("euclidean", 2);
  Vec x = Vec::Zero(2), y(2);
  y << 3.0, 4.0;
  CHECK(eval_F(eu.metric, x, y) == doctest::Approx(5.0));

  CatalogModel q = make_catalog_model("minkowski-quartic", 2);
  y << 1.0, 1.0;
  CHECK(eval_F(q.metric, x, y) == doctest::Approx(std::pow(2.0, 0.25)));

  // navigation with W = (-1/2, 0): y = (1, 0) gives F = 2, y = (-1, 0) gives 2/3
  Metric r = make_shifted_disk_metric();
  y << 1.0, 0.0;
  CHECK(eval_F(r, x, y) == doctest::Approx(2.0));
  y << -1.0, 0.0;
  CHECK(eval_F(r, x, y) == doctest::Approx(2.0 / 3.0));

  // navigation consistency: F(x, u + W) = 1 for h-unit u
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    Vec u = rng.normal_vec(2);
    u /= u.norm();
    Vec w(2);
    w << -0.5, 0.0;
    CHECK(eval_F(r, x, Vec(u + w)) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("error contracts: chart, zero vector, degenerate tensor") {
  CatalogModel eu = make_catalog_model("euclidean", 2);
  Vec far(2), x = Vec::Zero(2);
  far << 100.0, 0.0;
  CHECK_THROWS_AS(eval_F(eu.metric, far, Vec(Vec::Ones(2))), OutsideChart);
  CHECK_THROWS_AS(eval_F(eu.metric, x, Vec(Vec::Zero(2))), ZeroVector);

  CatalogModel q = make_catalog_model("minkowski-quartic", 2);
  Vec axis(2);
  axis << 1.0, 0.0;
  CHECK_THROWS_AS(fundamental_tensor(q.metric, x, axis), NotPositiveDefinite);
}

TEST_CASE("fundamental tensor: identity, quartic value, FD oracle") {
  CatalogModel eu = make_catalog_model("euclidean", 3);
  Rng rng(3);
  Vec x, y;
  sample_xy(eu, rng, x, y);
  CHECK(max_abs_diff(fundamental_tensor(eu.metric, x, y), Mat(Mat::Identity(3, 3))) < 1e-14);

  CatalogModel q = make_catalog_model("minkowski-quartic", 2);
  Vec y11(2);
  y11 << 1.0, 1.0;
  Mat g = fundamental_tensor(q.metric, Vec(Vec::Zero(2)), y11);
  // closed form at (1,1): g = [[sqrt2, -sqrt2/2], [-sqrt2/2, sqrt2]]
  CHECK(g(0, 0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(g(0, 1) == doctest::Approx(-std::sqrt(2.0) / 2));
  const double F2 = eval_F2(q.metric, Vec(Vec::Zero(2)), y11);
  CHECK(y11.dot(g * y11) == doctest::Approx(F2).epsilon(1e-12));

  CatalogModel rr = make_catalog_model("randers-rotation", 3);
  for (int i = 0; i < 5; ++i) {
    sample_xy(rr, rng, x, y);
    Mat ga = fundamental_tensor(rr.metric, x, y);
    Mat go = oracle_fundamental_tensor(rr.metric, x, y);
    CHECK(max_abs_diff(ga, go) / std::max(1.0, ga.cwiseAbs().maxCoeff()) < 1e-6);
  }
}

TEST_CASE("cartan tensor: riemannian zero, oracle, y-annihilation") {
  Rng rng(11);
  CatalogModel sph = make_catalog_model("riemannian-sphere-stereographic", 3);
  Vec x, y;
  sample_xy(sph, rng, x, y);
  CHECK(cartan_tensor(sph.metric, x, y).max_abs() < 1e-12);

  CatalogModel q = make_catalog_model("minkowski-quartic", 2);
  Vec y11(2);
  y11 << 1.0, 1.0;
  Tensor3 C = cartan_tensor(q.metric, Vec(Vec::Zero(2)), y11);
  Tensor3 Co = oracle_cartan(q.metric, Vec(Vec::Zero(2)), y11);
  CHECK(max_abs_diff(C, Co) < 1e-6);

  for (const std::string& id : {"funk-ball", "randers-rotation"}) {
    CatalogModel cm = make_catalog_model(id, 3);
    for (int i = 0; i < 20; ++i) {
      sample_xy(cm, rng, x, y);
      Tensor3 Cc = cartan_tensor(cm.metric, x, y);
      double contr = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          double acc = 0.0;
          for (int k = 0; k < 3; ++k) acc += Cc(a, b, k) * y[k];
          contr = std::max(contr, std::abs(acc));
        }
      CHECK(contr < 1e-9);
    }
  }
}

TEST_CASE("spray: Minkowski zero, Riemannian Levi-Civita, FD oracle") {
  Rng rng(17);
  CatalogModel q = make_catalog_model("minkowski-quartic", 3);
  Vec x, y;
  sample_xy(q, rng, x, y);
  SprayData s = spray_coefficients(q.metric, x, y);
  CHECK(s.G.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(s.N.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(s.Gamma.max_abs() < 1e-14);

  CatalogModel sph = make_catalog_model("riemannian-sphere-stereographic", 3);
  sample_xy(sph, rng, x, y);
  SprayData ss = spray_coefficients(sph.metric, x, y);
  Tensor3 lc = levi_civita_christoffel(*sph.metric.riemann_h(), x);
  CHECK(max_abs_diff(ss.Gamma, lc) < 1e-8);
  // y-independence of Gamma for a Riemannian metric
  Vec y2 = sph.sample_direction(rng);
  SprayData ss2 = spray_coefficients(sph.metric, x, y2);
  CHECK(max_abs_diff(ss.Gamma, ss2.Gamma) < 1e-8);

  CatalogModel fb = make_catalog_model("funk-ball", 3);
  for (int i = 0; i < 5; ++i) {
    sample_xy(fb, rng, x, y);
    Vec G = spray_G(fb.metric, x, y);
    Vec Go = oracle_spray_G(fb.metric, x, y);
    CHECK((G - Go).cwiseAbs().maxCoeff() / std::max(1.0, G.cwiseAbs().maxCoeff()) < 1e-6);
    // Funk closed form G^i = 1/2 F y^i
    const double F = eval_F(fb.metric, x, y);
    CHECK((G - 0.5 * F * y).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("landsberg: riemannian and minkowski zero, funk third-derivative oracle") {
  Rng rng(23);
  Vec x, y;
  CatalogModel sph = make_catalog_model("riemannian-sphere-stereographic", 3);
  sample_xy(sph, rng, x, y);
  CHECK(landsberg_tensor(sph.metric, x, y).max_abs() < 1e-10);

  CatalogModel q = make_catalog_model("minkowski-quartic", 3);
  sample_xy(q, rng, x, y);
  CHECK(landsberg_tensor(q.metric, x, y).max_abs() < 1e-12);

  CatalogModel fb = make_catalog_model("funk-ball", 2);
  sample_xy(fb, rng, x, y);
  Tensor3 L = landsberg_tensor(fb.metric, x, y);
  Tensor3 Lo = oracle_landsberg(fb.metric, x, y);
  CHECK(max_abs_diff(L, Lo) / std::max(1.0, L.max_abs()) < 1e-6);
  Tensor3 L3 = oracle_landsberg_third_diff(fb.metric, x, y);
  CHECK(max_abs_diff(L, L3) / std::max(1.0, L.max_abs()) < 1e-5);
}

TEST_CASE("flag curvature constants") {
  Rng rng(29);
  Vec x, y;
  CatalogModel eu = make_catalog_model("euclidean", 3);
  sample_xy(eu, rng, x, y);
  CHECK(std::abs(flag_curvature(eu.metric, x, y, rng.normal_vec(3))) < 1e-8);

  CatalogModel sph = make_catalog_model("riemannian-sphere-stereographic", 3);
  for (int i = 0; i < 10; ++i) {
    sample_xy(sph, rng, x, y);
    CHECK(flag_curvature(sph.metric, x, y, rng.normal_vec(3)) == doctest::Approx(1.0).epsilon(1e-6));
  }
  CatalogModel fb = make_catalog_model("funk-ball", 3);
  for (int i = 0; i < 10; ++i) {
    sample_xy(fb, rng, x, y);
    CHECK(flag_curvature(fb.metric, x, y, rng.normal_vec(3)) ==
          doctest::Approx(-0.25).epsilon(1e-5));
  }
  // rescaling the pole and the flag leaves K unchanged
  sample_xy(fb, rng, x, y);
  Vec V = rng.normal_vec(3);
  double K1 = flag_curvature(fb.metric, x, y, V);
  double K2 = flag_curvature(fb.metric, x, Vec(3.0 * y), Vec(-2.0 * V));
  CHECK(K1 == doctest::Approx(K2).epsilon(1e-10));
  CHECK_THROWS_AS(flag_curvature(fb.metric, x, y, Vec(2.0 * y)), DegenerateFlag);
}

TEST_CASE("reference covariant derivative on model fields") {
  CatalogModel eu = make_catalog_model("euclidean", 2);
  Vec x(2), e1(2), w(2);
  x << 0.3, -0.2;
  e1 << 1.0, 0.0;
  w << 0.5, 0.5;
  auto constant = [](const Vec&) { Vec v(2); v << 2.0, -1.0; return v; };
  CHECK(reference_covariant_derivative(eu.metric, x, constant, e1, w).cwiseAbs().maxCoeff() <
        1e-10);
  auto identity = [](const Vec& q) { return q; };
  Vec d = reference_covariant_derivative(eu.metric, x, identity, e1, w);
  CHECK((d - e1).cwiseAbs().maxCoeff() < 1e-9);
  CHECK_THROWS_AS(reference_covariant_derivative(eu.metric, x, identity, e1, Vec(Vec::Zero(2))),
                  ZeroReference);
}

TEST_CASE("s-curvature: minkowski zero, killing rotation zero, dilation constant ratio") {
  Rng rng(31);
  Vec x, y;
  CatalogModel q = make_catalog_model("minkowski-quartic", 3);
  for (int i = 0; i < 10; ++i) {
    sample_xy(q, rng, x, y);
    CHECK(std::abs(s_curvature(q.metric, q.bh_volume, x, y)) < 1e-6);
  }
  CatalogModel rr = make_catalog_model("randers-rotation", 3);
  for (int i = 0; i < 10; ++i) {
    sample_xy(rr, rng, x, y);
    CHECK(std::abs(s_curvature(rr.metric, rr.bh_volume, x, y)) < 1e-5);
  }
  CatalogModel rd = make_catalog_model("randers-dilation", 3);
  double mn = 1e300, mx = -1e300;
  for (int i = 0; i < 20; ++i) {
    sample_xy(rd, rng, x, y);
    double ratio = s_curvature(rd.metric, rd.bh_volume, x, y);  // = S/F at F = 1
    mn = std::min(mn, ratio);
    mx = std::max(mx, ratio);
  }
  CHECK(mx - mn < 1e-4);
  CHECK(std::abs(mx) > 1e-3);  // genuinely nonzero S

  // 1-homogeneity of S in y
  sample_xy(rd, rng, x, y);
  double s1 = s_curvature(rd.metric, rd.bh_volume, x, y);
  double s2 = s_curvature(rd.metric, rd.bh_volume, x, Vec(2.0 * y));
  CHECK(s2 == doctest::Approx(2.0 * s1).epsilon(1e-10));
}

TEST_CASE("BH density: euclidean one, riemannian sqrt-det, randers closed form") {
  CatalogModel eu = make_catalog_model("euclidean", 3);
  CHECK(bh_density(eu.metric, Vec(Vec::Zero(3))) == doctest::Approx(1.0).epsilon(1e-8));

  Rng rng(37);
  CatalogModel sph = make_catalog_model("riemannian-sphere-stereographic", 3);
  Vec x = sph.sample_point(rng);
  const double expect = std::pow(2.0 / (1.0 + x.squaredNorm()), 3);
  CHECK(bh_density(sph.metric, x) == doctest::Approx(expect).epsilon(1e-6));

  CatalogModel rr = make_catalog_model("randers-rotation", 3);
  x = rr.sample_point(rng);
  CHECK(bh_density(rr.metric, x) ==
        doctest::Approx(bh_density_randers(*rr.metric.navigation(), x)).epsilon(1e-5));

  CatalogModel fb = make_catalog_model("funk-ball", 2);
  x = fb.sample_point(rng);
  CHECK(bh_density(fb.metric, x) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("homogeneity invariants at random samples") {
  Rng rng(41);
  for (const std::string& id : all_model_ids()) {
    CatalogModel cm = make_catalog_model(id, 3);
    for (int i = 0; i < 10; ++i) {
      Vec x, y;
      sample_xy(cm, rng, x, y);
      const double lam = rng.uniform(0.2, 4.0);
      CHECK(std::abs(eval_F(cm.metric, x, Vec(lam * y)) - lam) <= 1e-10 * lam);
      Vec G1 = spray_G(cm.metric, x, y);
      Vec G2 = spray_G(cm.metric, x, Vec(2.0 * y));
      CHECK((G2 - 4.0 * G1).cwiseAbs().maxCoeff() <=
            1e-8 * std::max(1.0, 4.0 * G1.cwiseAbs().maxCoeff()));
    }
  }
}
