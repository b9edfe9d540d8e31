#include <doctest.h>

#include "finsler/legendre.hpp"
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

Metric shifted_disk() {
  auto nav = std::make_shared<NavigationData>();
  nav->n = 2;
  nav->chart = Chart::ball(2, 1.0);
  nav->h = make_matrix_field(2, IdentityH{});
  nav->W = make_vector_field(2, HalfLeftW{});
  return build_randers(nav);
}

}  // namespace

TEST_CASE("legendre transform basics") {
  CatalogModel eu = make_catalog_model("euclidean", 2);
  Vec x = Vec::Zero(2), y(2);
  y << 3.0, 4.0;
  Vec xi = legendre(eu.metric, x, y);
  CHECK((xi - y).cwiseAbs().maxCoeff() < 1e-12);  // self-dual metric
  CHECK(legendre(eu.metric, x, Vec(Vec::Zero(2))).cwiseAbs().maxCoeff() == 0.0);

  // xi(y) = F(y)^2 (at F = 1) and homogeneity L(2y) = 2 L(y)
  Rng rng(5);
  for (const std::string& id : all_model_ids()) {
    CatalogModel cm = make_catalog_model(id, 3);
    for (int i = 0; i < 10; ++i) {
      Vec xx, yy;
      sample_xy(cm, rng, xx, yy);
      Vec xi2 = legendre(cm.metric, xx, yy);
      CHECK(xi2.dot(yy) == doctest::Approx(1.0).epsilon(1e-10));
      Vec xi3 = legendre(cm.metric, xx, Vec(2.0 * yy));
      CHECK((xi3 - 2.0 * xi2).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("legendre inverse: round trip across the catalog") {
  Rng rng(9);
  NewtonOptions generic;
  generic.use_model_initial_guess = false;
  for (const std::string& id : all_model_ids()) {
    CatalogModel cm = make_catalog_model(id, 3);
    for (int i = 0; i < 20; ++i) {
      Vec x, y;
      sample_xy(cm, rng, x, y);
      Vec xi = legendre(cm.metric, x, y);
      Vec back = legendre_inverse(cm.metric, x, xi, generic);
      CHECK((back - y).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, y.cwiseAbs().maxCoeff()));
      CHECK(dual_norm(cm.metric, x, xi, generic) == doctest::Approx(1.0).epsilon(1e-8));
    }
  }
  CHECK(legendre_inverse(make_catalog_model("euclidean", 2).metric, Vec(Vec::Zero(2)),
                         Vec(Vec::Zero(2)))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("shifted-disk navigation: closed-form inverse and dual") {
  Metric m = shifted_disk();
  Vec x = Vec::Zero(2), xi(2);
  xi << 1.0, 0.0;
  // F*(xi) = |xi| + W.xi = 1 - 1/2; y = F* ([xi]_raised/|xi| + W) = (1/4, 0)
  CHECK(dual_norm(m, x, xi) == doctest::Approx(0.5));
  Vec y = legendre_inverse(m, x, xi);
  CHECK(y[0] == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(std::abs(y[1]) < 1e-12);
  // the Newton route from the generic start agrees
  NewtonOptions generic;
  generic.use_model_initial_guess = false;
  Vec yn = legendre_inverse(m, x, xi, generic);
  CHECK((y - yn).cwiseAbs().maxCoeff() < 1e-10);
  // dual of the coordinate differential: F*(dx1) = 1 + W^1
  CHECK(randers_dual(*m.navigation(), x, xi) == doctest::Approx(0.5));
}

TEST_CASE("dual norm examples and reverse-dual identity") {
  CatalogModel eu = make_catalog_model("euclidean", 2);
  Vec x = Vec::Zero(2), xi(2);
  xi << 3.0, 4.0;
  CHECK(dual_norm(eu.metric, x, xi) == doctest::Approx(5.0));

  // F*(-xi) equals the reverse-model dual norm at xi
  Rng rng(13);
  CatalogModel fb = make_catalog_model("funk-ball", 2);
  Metric rev = reverse_model(fb.metric);
  for (int i = 0; i < 10; ++i) {
    Vec xx, yy;
    sample_xy(fb, rng, xx, yy);
    Vec zeta = rng.normal_vec(2);
    CHECK(dual_norm(fb.metric, xx, Vec(-zeta)) ==
          doctest::Approx(dual_norm(rev, xx, zeta)).epsilon(1e-8));
  }
}

TEST_CASE("reverse model: involution, pointwise flip, spray relation") {
  Rng rng(17);
  CatalogModel eu = make_catalog_model("euclidean", 3);
  CHECK(&reverse_model(eu.metric).kernel() == &eu.metric.kernel());  // fixed point

  CatalogModel fb = make_catalog_model("funk-ball", 3);
  Metric rev = reverse_model(fb.metric);
  Metric revrev = reverse_model(rev);
  for (int i = 0; i < 10; ++i) {
    Vec x, y;
    sample_xy(fb, rng, x, y);
    CHECK(eval_F(rev, x, y) == doctest::Approx(eval_F(fb.metric, x, Vec(-y))).epsilon(1e-14));
    CHECK(eval_F(revrev, x, y) == doctest::Approx(eval_F(fb.metric, x, y)).epsilon(1e-14));
    Vec Gr = spray_G(rev, x, y);
    Vec Gm = spray_G(fb.metric, x, Vec(-y));
    CHECK((Gr - Gm).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, Gm.cwiseAbs().maxCoeff()));
    Mat grev = fundamental_tensor(rev, x, y);
    Mat gm = fundamental_tensor(fb.metric, x, Vec(-y));
    CHECK(max_abs_diff(grev, gm) < 1e-12);
  }

  // navigation reverse keeps the fast paths: (h, -W)
  CatalogModel rr = make_catalog_model("randers-rotation", 3);
  Metric rrev = reverse_model(rr.metric);
  REQUIRE(rrev.navigation() != nullptr);
  Vec x = rr.sample_point(rng);
  CHECK((rr.metric.navigation()->W_at(x) + rrev.navigation()->W_at(x)).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("eta_minus: reversible negation, involution, defining residual") {
  Rng rng(19);
  CatalogModel eu = make_catalog_model("euclidean", 2);
  Vec x = Vec::Zero(2), eta(2);
  eta << 1.0, 0.0;
  CHECK((eta_minus(eu.metric, x, eta) + eta).cwiseAbs().maxCoeff() < 1e-12);

  for (const std::string& id : {"funk-ball", "randers-rotation"}) {
    CatalogModel cm = make_catalog_model(id, 3);
    for (int i = 0; i < 15; ++i) {
      Vec xx, yy;
      sample_xy(cm, rng, xx, yy);
      Vec em = eta_minus(cm.metric, xx, yy);
      CHECK(eval_F(cm.metric, xx, em) == doctest::Approx(1.0).epsilon(1e-10));
      Vec xi_p = legendre(cm.metric, xx, yy);
      Vec xi_m = legendre(cm.metric, xx, em);
      Vec unit_p = xi_p / xi_p.norm(), unit_m = xi_m / xi_m.norm();
      CHECK((unit_p + unit_m).cwiseAbs().maxCoeff() < 1e-9);
      Vec back = eta_minus(cm.metric, xx, em);
      CHECK((back - yy).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("gradient examples and reversal identities") {
  CatalogModel eu = make_catalog_model("euclidean", 3);
  ScalarField coord;
  coord.value = [](const Vec& q) { return q[0]; };
  coord.grad = [](const Vec& q) {
    Vec g = Vec::Zero(q.size());
    g[0] = 1.0;
    return g;
  };
  Vec x(3);
  x << 0.3, -0.1, 0.2;
  CHECK((gradient(eu.metric, coord, x) - Vec(Vec::Unit(3, 0))).cwiseAbs().maxCoeff() < 1e-12);

  Rng rng(23);
  for (const std::string& id : {"funk-ball", "randers-rotation"}) {
    CatalogModel cm = make_catalog_model(id, 3);
    Metric rev = reverse_model(cm.metric);
    ScalarField f;
    f.value = [](const Vec& q) { return q.norm(); };
    f.grad = [](const Vec& q) { return Vec(q / q.norm()); };
    ScalarField nf;
    nf.value = [](const Vec& q) { return -q.norm(); };
    nf.grad = [](const Vec& q) { return Vec(-q / q.norm()); };
    for (int i = 0; i < 5; ++i) {
      Vec xx = cm.sample_point(rng);
      if (xx.norm() < 0.2 * cm.interior_radius) continue;
      Vec g1 = gradient(cm.metric, f, xx);
      Vec g2 = gradient(rev, nf, xx);
      CHECK((g1 + g2).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, g1.cwiseAbs().maxCoeff()));
      double l1 = laplacian(cm.metric, cm.bh_volume, f, xx);
      double l2 = laplacian(rev, cm.bh_volume, nf, xx);
      CHECK(std::abs(l1 + l2) < 1e-7 * std::max(1.0, std::abs(l1)));
    }
  }
}

TEST_CASE("hessian and laplacian closed forms") {
  CatalogModel eu = make_catalog_model("euclidean", 3);
  ScalarField half_r2;
  half_r2.value = [](const Vec& q) { return 0.5 * q.squaredNorm(); };
  half_r2.grad = [](const Vec& q) { return q; };
  Vec x(3);
  x << 0.4, 0.1, -0.3;
  Mat H = hessian(eu.metric, half_r2, x);
  CHECK(max_abs_diff(H, Mat(Mat::Identity(3, 3))) < 1e-8);
  CHECK(laplacian(eu.metric, eu.bh_volume, half_r2, x) == doctest::Approx(3.0).epsilon(1e-8));

  ScalarField coord;
  coord.value = [](const Vec& q) { return q[0]; };
  coord.grad = [](const Vec& q) {
    Vec g = Vec::Zero(q.size());
    g[0] = 1.0;
    return g;
  };
  CHECK(hessian(eu.metric, coord, x).cwiseAbs().maxCoeff() < 1e-9);

  // distance function: Laplacian (n-1)/r, cross-checked by the divergence oracle
  ScalarField dist;
  dist.value = [](const Vec& q) { return q.norm(); };
  dist.grad = [](const Vec& q) { return Vec(q / q.norm()); };
  const double r = x.norm();
  const double lap = laplacian(eu.metric, eu.bh_volume, dist, x);
  CHECK(lap == doctest::Approx(2.0 / r).epsilon(1e-7));
  CHECK(oracle_divergence_laplacian(eu.metric, eu.bh_volume, dist, x) ==
        doctest::Approx(lap).epsilon(1e-5));

  // quartic Minkowski, f = x1: constant gradient field, zero Hessian and Laplacian
  CatalogModel q = make_catalog_model("minkowski-quartic", 3);
  CHECK(hessian(q.metric, coord, x).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(laplacian(q.metric, q.bh_volume, coord, x)) < 1e-7);

  ScalarField constant;
  constant.value = [](const Vec&) { return 1.0; };
  CHECK_THROWS_AS(gradient(eu.metric, constant, x), VanishingGradient);
}

TEST_CASE("newton handles the quartic axis covector via the exact start") {
  CatalogModel q = make_catalog_model("minkowski-quartic", 3);
  Vec x = Vec::Zero(3), xi(3);
  xi << 1.0, 0.0, 0.0;
  Vec y = legendre_inverse(q.metric, x, xi);
  CHECK((y - Vec(Vec::Unit(3, 0))).cwiseAbs().maxCoeff() < 1e-10);
}
