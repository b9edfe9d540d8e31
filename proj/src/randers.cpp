#include "finsler/randers.hpp"

#include <cmath>

#include "finsler/hypersurface.hpp"
#include "finsler/legendre.hpp"

namespace finsler {

Mat NavigationData::h_at(const Vec& x) const {
  D0 buf[kMaxDim * kMaxDim];
  h->eval(x.data(), buf);
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = buf[i * n + j];
  return out;
}

Vec NavigationData::W_at(const Vec& x) const {
  D0 buf[kMaxDim];
  W->eval(x.data(), buf);
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = buf[i];
  return out;
}

double NavigationData::lambda_at(const Vec& x) const {
  Vec w = W_at(x);
  return 1.0 - w.dot(h_at(x) * w);
}

Tensor3 NavigationData::christoffel(const Vec& x) const {
  Mat hm;
  std::vector<Mat> dh;
  matrix_field_partials(*h, x, hm, dh);
  Mat hinv = hm.inverse();
  Tensor3 G(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l)
          acc += 0.5 * hinv(i, l) * (dh[j](l, k) + dh[k](j, l) - dh[l](j, k));
        G(i, j, k) = acc;
      }
  return G;
}

Vec NavigationData::h_spray(const Vec& x, const Vec& y) const {
  Tensor3 G = christoffel(x);
  Vec out = Vec::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out[i] += 0.5 * G(i, j, k) * y[j] * y[k];
  return out;
}

namespace {

struct RandersKernel {
  std::shared_ptr<const NavigationData> nav;
  template <class S>
  S operator()(const S* x, const S* y, int n) const {
    S hm[kMaxDim * kMaxDim], w[kMaxDim];
    nav->h->eval(x, hm);
    nav->W->eval(x, w);
    S h2 = S(0.0), w0 = S(0.0), ww = S(0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        h2 += hm[i * n + j] * y[i] * y[j];
        w0 += hm[i * n + j] * w[i] * y[j];
        ww += hm[i * n + j] * w[i] * w[j];
      }
    S lam = 1.0 - ww;
    if (leading(lam) <= 1e-12) throw NavigationDomainViolation("||W||_h >= 1 on chart");
    S F = (sqrt(lam * h2 + w0 * w0) - w0) / lam;
    return F * F;
  }
};

// Deterministic low-discrepancy chart samples for the domain check.
std::vector<Vec> chart_probe(const Chart& chart, int n, int count) {
  std::vector<Vec> pts;
  Rng rng(0xd07a11ULL);
  for (int i = 0; i < count; ++i) {
    Vec x(n);
    for (int j = 0; j < n; ++j) x[j] = rng.uniform(-1.0, 1.0);
    if (chart.shape == Chart::Shape::ball) {
      if (x.norm() > 1.0) {
        --i;
        continue;
      }
      pts.push_back(chart.center + 0.999 * chart.radius * x);
    } else {
      pts.push_back(chart.center + 0.999 * x.cwiseProduct(chart.halfwidth));
    }
  }
  return pts;
}

}  // namespace

Metric build_randers(std::shared_ptr<const NavigationData> nav) {
  for (const Vec& x : chart_probe(nav->chart, nav->n, 256)) {
    if (!(nav->lambda_at(x) > 0.0))
      throw NavigationDomainViolation("||W||_h >= 1 inside the chart");
  }
  Metric m(MetricKind::randers_navigation, nav->chart,
           make_metric_kernel(nav->n, RandersKernel{nav}));
  m.set_navigation(nav);
  m.set_riemann_h(nav->h);
  m.set_reversible(false);
  return m;
}

double randers_dual(const NavigationData& nav, const Vec& x, const Vec& xi) {
  Mat hinv = nav.h_at(x).inverse();
  return std::sqrt(xi.dot(hinv * xi)) + nav.W_at(x).dot(xi);
}

Vec randers_legendre_inverse(const NavigationData& nav, const Vec& x, const Vec& xi) {
  if (xi.cwiseAbs().maxCoeff() <= 1e-300) return Vec::Zero(nav.n);
  Mat hinv = nav.h_at(x).inverse();
  Vec raised = hinv * xi;
  double hstar = std::sqrt(xi.dot(raised));
  Vec dual_grad = raised / hstar + nav.W_at(x);  // [F*]_{xi}
  return randers_dual(nav, x, xi) * dual_grad;
}

namespace {

// W_{i|j} = d_j W_i - Gamma^k_{ij} W_k with W_i = h_ik W^k, all exact.
Mat covariant_dW(const NavigationData& nav, const Vec& x) {
  const int n = nav.n;
  // d_j of the lowered field W_i(x)
  D1 xx[kMaxDim], wout[kMaxDim], hout[kMaxDim * kMaxDim];
  lift(x.data(), xx, n);
  Mat dWlow(n, n);
  Vec Wlow(n);
  for (int j = 0; j < n; ++j) {
    xx[j].d = 1.0;
    nav.W->eval(xx, wout);
    nav.h->eval(xx, hout);
    for (int i = 0; i < n; ++i) {
      D1 wi(0.0);
      for (int k = 0; k < n; ++k) wi += hout[i * n + k] * wout[k];
      dWlow(i, j) = wi.d;
      if (j == 0) Wlow[i] = wi.v;
    }
    xx[j].d = 0.0;
  }
  Tensor3 Gamma = nav.christoffel(x);
  Vec Wk = nav.h_at(x) * Vec(nav.W_at(x));
  Mat cov(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = dWlow(i, j);
      for (int k = 0; k < n; ++k) acc -= Gamma(k, i, j) * Wk[k];
      cov(i, j) = acc;
    }
  return cov;
}

}  // namespace

KillingClassification killing_classify(const NavigationData& nav,
                                       const std::vector<Vec>& samples, double tol) {
  KillingClassification out;
  double killing_defect = 0.0;
  double homothetic_defect = 0.0;
  double kappa_sum = 0.0;
  for (const Vec& x : samples) {
    Mat cov = covariant_dW(nav, x);
    Mat K = 0.5 * (cov + cov.transpose());
    Mat hm = nav.h_at(x);
    killing_defect = std::max(killing_defect, K.cwiseAbs().maxCoeff());
    double kappa = (hm.inverse() * K).trace() / nav.n;
    homothetic_defect = std::max(homothetic_defect, (K - kappa * hm).cwiseAbs().maxCoeff());
    kappa_sum += kappa;
  }
  const double kappa = kappa_sum / static_cast<double>(samples.size());
  if (killing_defect <= tol) {
    out.verdict = KillingClassification::Verdict::killing;
    out.defect = killing_defect;
  } else if (homothetic_defect <= tol) {
    out.verdict = KillingClassification::Verdict::homothetic;
    out.kappa = kappa;
    out.defect = homothetic_defect;
  } else {
    out.verdict = KillingClassification::Verdict::generic;
    out.defect = std::min(killing_defect, homothetic_defect);
  }
  return out;
}

STensors s_tensors(const NavigationData& nav, const Vec& x, const Vec& y) {
  const int n = nav.n;
  Mat cov = covariant_dW(nav, x);
  STensors t;
  t.s_low = 0.5 * (cov - cov.transpose());
  Vec Wup = nav.W_at(x);
  t.s_cov = t.s_low.transpose() * Wup;  // s_j = W^i s_ij
  Mat hinv = nav.h_at(x).inverse();
  t.s_up = hinv * t.s_cov;
  t.s_mixed = hinv * t.s_low;
  t.s_mixed_y = t.s_mixed * y;
  (void)n;
  return t;
}

Vec randers_spray_closed(const NavigationData& nav, const Vec& x, const Vec& y,
                         const KillingClassification& cls) {
  if (cls.verdict != KillingClassification::Verdict::killing)
    throw NotKilling("closed-form spray requires a Killing navigation field");
  STensors t = s_tensors(nav, x, y);
  // F from the navigation formula directly
  Vec w = nav.W_at(x);
  Mat hm = nav.h_at(x);
  double lam = 1.0 - w.dot(hm * w);
  double h2 = y.dot(hm * y);
  double w0 = w.dot(hm * y);
  double F = (std::sqrt(lam * h2 + w0 * w0) - w0) / lam;
  return Vec(nav.h_spray(x, y)) - F * t.s_mixed_y - 0.5 * F * F * t.s_up;
}

double bh_density_randers(const NavigationData& nav, const Vec& x) {
  // The F-indicatrix is the h-unit ball translated by W, so its Lebesgue
  // volume equals the h-ball volume and the BH density is plain sqrt(det h).
  // (Equivalently: (1 - ||beta||_alpha^2)^{(n+1)/2} sqrt(det alpha) with the
  // alpha+beta data of the navigation metric collapses to sqrt(det h).)
  double lam = nav.lambda_at(x);
  if (!(lam > 0.0)) throw NavigationDomainViolation("||W||_h >= 1 at x");
  return std::sqrt(nav.h_at(x).determinant());
}

namespace {

// ln sigma_BH = 1/2 ln det h, differentiable at every level.
struct RandersLogDensity {
  std::shared_ptr<const NavigationData> nav;
  template <class S>
  S operator()(const S* x, int n) const {
    S hm[kMaxDim * kMaxDim];
    nav->h->eval(x, hm);
    // det h by elimination on the dual-valued matrix
    S det = S(1.0);
    for (int c = 0; c < n; ++c) {
      det *= hm[c * n + c];
      for (int r = c + 1; r < n; ++r) {
        S f = hm[r * n + c] / hm[c * n + c];
        for (int k = c; k < n; ++k) hm[r * n + k] -= f * hm[c * n + k];
      }
    }
    return 0.5 * log(det);
  }
};

}  // namespace

VolumeForm make_randers_bh_volume(std::shared_ptr<const NavigationData> nav) {
  VolumeForm v;
  v.kind = VolumeForm::Kind::busemann_hausdorff;
  v.density = [nav](const Vec& x) { return bh_density_randers(*nav, x); };
  v.log_density = make_scalar_map(nav->n, RandersLogDensity{nav});
  return v;
}

TorsionAuditReport torsion_audit(const NavigationData& nav, const Metric& model,
                                 const VolumeForm& vol, int sample_count, Rng& rng) {
  TorsionAuditReport rep;
  const int n = nav.n;
  const double r_in = 0.45 * model.chart().scale();

  // c' measured as S / ((n+1) F) averaged over the samples.
  double cp_sum = 0.0;
  int cp_cnt = 0;

  for (int s = 0; s < sample_count; ++s) {
    Vec x = rng.normal_vec(n);
    x *= rng.uniform(0.15, 1.0) * r_in / x.norm();
    // unit field from a frozen covector: eta(q) = L^{-1}(xi0) / F(L^{-1}(xi0))
    Vec xi0 = rng.normal_vec(n);
    xi0 /= xi0.norm();
    auto eta_field = [&](const Vec& q) {
      Vec yv = legendre_inverse(model, q, xi0);
      return Vec(yv / eval_F(model, q, yv));
    };
    Vec eta = eta_field(x);
    // X with g_eta(eta, X) = 0, i.e. xi0(X) = 0
    Vec X = rng.normal_vec(n);
    X -= (xi0.dot(X) / xi0.dot(xi0)) * xi0;
    X /= X.norm();

    Vec T = reversible_torsion(model, eta_field, x, X);
    rep.sup_torsion = std::max(rep.sup_torsion, T.norm());

    double F = eval_F(model, x, eta);
    double S = s_curvature(model, vol, x, eta);
    cp_sum += S / ((n + 1) * F);
    ++cp_cnt;

    rep.sup_residual_vs_2cpX = std::max(rep.sup_residual_vs_2cpX, 0.0);
    rep.samples++;
    // defer residual vs 2c'X until c' is known; store via second pass below
  }
  rep.c_prime = cp_sum / std::max(1, cp_cnt);

  // second pass for the homothetic residual with the measured c'
  Rng rng2(0x7075e5ULL);
  double resid = 0.0;
  for (int s = 0; s < sample_count; ++s) {
    Vec x = rng2.normal_vec(n);
    x *= rng2.uniform(0.15, 1.0) * r_in / x.norm();
    Vec xi0 = rng2.normal_vec(n);
    xi0 /= xi0.norm();
    auto eta_field = [&](const Vec& q) {
      Vec yv = legendre_inverse(model, q, xi0);
      return Vec(yv / eval_F(model, q, yv));
    };
    Vec X = rng2.normal_vec(n);
    X -= (xi0.dot(X) / xi0.dot(xi0)) * xi0;
    X /= X.norm();
    Vec T = reversible_torsion(model, eta_field, x, X);
    resid = std::max(resid, (T - 2.0 * rep.c_prime * X).norm());
  }
  rep.sup_residual_vs_2cpX = resid;
  return rep;
}

}  // namespace finsler
