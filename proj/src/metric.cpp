#include "finsler/metric.hpp"

#include <cmath>

namespace finsler {

std::string to_string(MetricKind k) {
  switch (k) {
    case MetricKind::riemannian: return "riemannian";
    case MetricKind::minkowski_norm: return "minkowski_norm";
    case MetricKind::randers_navigation: return "randers_navigation";
    case MetricKind::funk_ball: return "funk_ball";
    case MetricKind::reverse: return "reverse";
  }
  return "?";
}

void require_in_chart(const Metric& m, const Vec& x) {
  if (x.size() != m.dim() || !m.chart().contains(x))
    throw OutsideChart("point outside chart domain");
}

void require_admissible(const Metric& m, const Vec& x, const Vec& y) {
  require_in_chart(m, x);
  if (y.size() != m.dim() || !y.allFinite() || y.cwiseAbs().maxCoeff() <= 1e-300)
    throw ZeroVector("inadmissible (zero) tangent vector");
}

double eval_F2(const Metric& m, const Vec& x, const Vec& y) {
  require_admissible(m, x, y);
  return m.kernel().f2(x.data(), y.data());
}

double eval_F(const Metric& m, const Vec& x, const Vec& y) {
  return std::sqrt(eval_F2(m, x, y));
}

namespace {

// g_ij = 1/2 d^2 F^2 / dy^i dy^j at scalar type S.
template <class S>
void fundamental_at(const MetricKernel& k, const S* x, const S* y, int n, S* g) {
  using T1 = Dual<S>;
  using T2 = Dual<T1>;
  T2 xx[kMaxDim], yy[kMaxDim];
  for (int t = 0; t < n; ++t) {
    xx[t] = T2(T1(x[t], S(0.0)), T1());
    yy[t] = T2(T1(y[t], S(0.0)), T1());
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      yy[i].v.d = S(1.0);
      yy[j].d.v = S(1.0);
      S hij = 0.5 * k.f2(xx, yy).d.d;
      g[i * n + j] = hij;
      g[j * n + i] = hij;
      yy[i].v.d = S(0.0);
      yy[j].d.v = S(0.0);
    }
  }
}

// Geodesic coefficients G^i = 1/4 g^{il} ( [F^2]_{x^k y^l} y^k - [F^2]_{x^l} )
// at scalar type S (both x and y may carry derivative parts).
template <class S>
void spray_at(const MetricKernel& k, const S* x, const S* y, int n, S* G) {
  using T1 = Dual<S>;
  using T2 = Dual<T1>;
  S B[kMaxDim];
  {
    // directional x-derivative along y of [F^2]_{y^l} in one pass
    T2 xx[kMaxDim], yy[kMaxDim];
    for (int t = 0; t < n; ++t) {
      xx[t] = T2(T1(x[t], y[t]), T1());
      yy[t] = T2(T1(y[t], S(0.0)), T1());
    }
    for (int l = 0; l < n; ++l) {
      yy[l].d.v = S(1.0);
      B[l] = k.f2(xx, yy).d.d;
      yy[l].d.v = S(0.0);
    }
  }
  {
    T1 xx[kMaxDim], yy[kMaxDim];
    for (int t = 0; t < n; ++t) {
      xx[t] = T1(x[t], S(0.0));
      yy[t] = T1(y[t], S(0.0));
    }
    for (int l = 0; l < n; ++l) {
      xx[l].d = S(1.0);
      B[l] -= k.f2(xx, yy).d;
      xx[l].d = S(0.0);
    }
  }
  // x-independent norms have B identically zero as a jet; G = 0 is the
  // continuous extension even where g degenerates (quartic axes)
  double bnorm = 0.0;
  for (int l = 0; l < n; ++l) bnorm = std::max(bnorm, max_abs_parts(B[l]));
  if (bnorm <= 1e-250) {
    for (int i = 0; i < n; ++i) G[i] = S(0.0);
    return;
  }
  S g[kMaxDim * kMaxDim];
  fundamental_at(k, x, y, n, g);
  solve_linear(g, B, n);
  for (int i = 0; i < n; ++i) G[i] = 0.25 * B[i];
}

}  // namespace

Mat fundamental_tensor_unchecked(const Metric& m, const Vec& x, const Vec& y) {
  require_admissible(m, x, y);
  const int n = m.dim();
  double g[kMaxDim * kMaxDim];
  fundamental_at<double>(m.kernel(), x.data(), y.data(), n, g);
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = g[i * n + j];
  return out;
}

Mat fundamental_tensor(const Metric& m, const Vec& x, const Vec& y) {
  Mat g = fundamental_tensor_unchecked(m, x, y);
  require_positive_definite(g);
  return g;
}

Tensor3 cartan_tensor(const Metric& m, const Vec& x, const Vec& y) {
  require_admissible(m, x, y);
  const int n = m.dim();
  const MetricKernel& k = m.kernel();
  D3 xx[kMaxDim], yy[kMaxDim];
  for (int t = 0; t < n; ++t) {
    xx[t] = D3(D2(D1(x[t], 0.0), D1()), D2());
    yy[t] = D3(D2(D1(y[t], 0.0), D1()), D2());
  }
  Tensor3 C(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int l = j; l < n; ++l) {
        yy[i].v.v.d = 1.0;
        yy[j].v.d.v = 1.0;
        yy[l].d.v.v = 1.0;
        double c = 0.25 * k.f2(xx, yy).d.d.d;
        C(i, j, l) = C(i, l, j) = C(j, i, l) = C(j, l, i) = C(l, i, j) = C(l, j, i) = c;
        yy[i].v.v.d = 0.0;
        yy[j].v.d.v = 0.0;
        yy[l].d.v.v = 0.0;
      }
  return C;
}

Vec spray_G(const Metric& m, const Vec& x, const Vec& y) {
  require_admissible(m, x, y);
  const int n = m.dim();
  double G[kMaxDim];
  spray_at<double>(m.kernel(), x.data(), y.data(), n, G);
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = G[i];
  return out;
}

SprayData spray_coefficients(const Metric& m, const Vec& x, const Vec& y) {
  require_admissible(m, x, y);
  const int n = m.dim();
  const MetricKernel& k = m.kernel();
  SprayData s;
  s.G = spray_G(m, x, y);
  s.N = Mat(n, n);
  {
    D1 xx[kMaxDim], yy[kMaxDim], G[kMaxDim];
    lift(x.data(), xx, n);
    lift(y.data(), yy, n);
    for (int j = 0; j < n; ++j) {
      yy[j].d = 1.0;
      spray_at<D1>(k, xx, yy, n, G);
      for (int i = 0; i < n; ++i) s.N(i, j) = G[i].d;
      yy[j].d = 0.0;
    }
  }
  s.Gamma = Tensor3(n);
  {
    D2 xx[kMaxDim], yy[kMaxDim], G[kMaxDim];
    lift(x.data(), xx, n);
    lift(y.data(), yy, n);
    for (int j = 0; j < n; ++j)
      for (int l = j; l < n; ++l) {
        yy[j].v.d = 1.0;
        yy[l].d.v = 1.0;
        spray_at<D2>(k, xx, yy, n, G);
        for (int i = 0; i < n; ++i) s.Gamma(i, j, l) = s.Gamma(i, l, j) = G[i].d.d;
        yy[j].v.d = 0.0;
        yy[l].d.v = 0.0;
      }
  }
  return s;
}

Vec legendre_covector(const Metric& m, const Vec& x, const Vec& y);  // below

Tensor3 landsberg_tensor(const Metric& m, const Vec& x, const Vec& y) {
  require_admissible(m, x, y);
  const int n = m.dim();
  const MetricKernel& k = m.kernel();
  // L_ijk = -1/2 g_lm y^l d^3 G^m / dy^i dy^j dy^k  (spray identity)
  Vec w = legendre_covector(m, x, y);  // w_m = g_lm y^l
  Tensor3 L(n);
  D3 xx[kMaxDim], yy[kMaxDim], G[kMaxDim];
  lift(x.data(), xx, n);
  lift(y.data(), yy, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int l = j; l < n; ++l) {
        yy[i].v.v.d = 1.0;
        yy[j].v.d.v = 1.0;
        yy[l].d.v.v = 1.0;
        spray_at<D3>(k, xx, yy, n, G);
        double acc = 0.0;
        for (int mm = 0; mm < n; ++mm) acc += w[mm] * G[mm].d.d.d;
        double val = -0.5 * acc;
        L(i, j, l) = L(i, l, j) = L(j, i, l) = L(j, l, i) = L(l, i, j) = L(l, j, i) = val;
        yy[i].v.v.d = 0.0;
        yy[j].v.d.v = 0.0;
        yy[l].d.v.v = 0.0;
      }
  return L;
}

Mat spray_curvature(const Metric& m, const Vec& x, const Vec& y) {
  require_admissible(m, x, y);
  const int n = m.dim();
  const MetricKernel& k = m.kernel();
  SprayData s = spray_coefficients(m, x, y);

  Mat dGdx(n, n);  // dG^i/dx^k
  {
    D1 xx[kMaxDim], yy[kMaxDim], G[kMaxDim];
    lift(x.data(), xx, n);
    lift(y.data(), yy, n);
    for (int c = 0; c < n; ++c) {
      xx[c].d = 1.0;
      spray_at<D1>(k, xx, yy, n, G);
      for (int i = 0; i < n; ++i) dGdx(i, c) = G[i].d;
      xx[c].d = 0.0;
    }
  }
  Mat M(n, n);  // y^j d^2 G^i / dx^j dy^k
  {
    D2 xx[kMaxDim], yy[kMaxDim], G[kMaxDim];
    for (int t = 0; t < n; ++t) {
      xx[t] = D2(D1(x[t], y[t]), D1());
      yy[t] = D2(D1(y[t], 0.0), D1());
    }
    for (int c = 0; c < n; ++c) {
      yy[c].d.v = 1.0;
      spray_at<D2>(k, xx, yy, n, G);
      for (int i = 0; i < n; ++i) M(i, c) = G[i].d.d;
      yy[c].d.v = 0.0;
    }
  }
  Mat R(n, n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < n; ++c) {
      double acc = 2.0 * dGdx(i, c) - M(i, c);
      for (int j = 0; j < n; ++j) acc += 2.0 * s.G[j] * s.Gamma(i, j, c) - s.N(i, j) * s.N(j, c);
      R(i, c) = acc;
    }
  return R;
}

double flag_curvature(const Metric& m, const Vec& x, const Vec& y, const Vec& V) {
  Mat g = fundamental_tensor(m, x, y);
  Mat R = spray_curvature(m, x, y);
  const double F2 = m.kernel().f2(x.data(), y.data());
  const double gVV = V.dot(g * V);
  const double gyV = y.dot(g * V);
  const double den = F2 * gVV - gyV * gyV;
  if (!(gVV > 0.0) || den <= 1e-12 * F2 * gVV)
    throw DegenerateFlag("flag vector parallel to the pole");
  const double num = V.dot(g * (R * V));
  return num / den;
}

Vec reference_covariant_derivative(const Metric& m, const Vec& x,
                                   const std::function<Vec(const Vec&)>& field,
                                   const Vec& v, const Vec& w, double fd_step_scale) {
  require_in_chart(m, x);
  if (w.cwiseAbs().maxCoeff() <= 1e-300) throw ZeroReference();
  const int n = m.dim();
  const double vn = v.norm();
  Vec dX = Vec::Zero(n);
  if (vn > 0.0) {
    const double h = fd_step_scale * m.chart().scale();
    Vec dir = v / vn;
    dX = (field(x + h * dir) - field(x - h * dir)) * (vn / (2.0 * h));
  }
  SprayData s = spray_coefficients(m, x, w);
  Vec X0 = field(x);
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    double acc = dX[i];
    for (int j = 0; j < n; ++j)
      for (int kk = 0; kk < n; ++kk) acc += s.Gamma(i, j, kk) * v[j] * X0[kk];
    out[i] = acc;
  }
  return out;
}

double s_curvature(const Metric& m, const VolumeForm& vol, const Vec& x, const Vec& y) {
  require_admissible(m, x, y);
  const int n = m.dim();
  const MetricKernel& k = m.kernel();
  // dG^i/dy^i
  double trN = 0.0;
  {
    D1 xx[kMaxDim], yy[kMaxDim], G[kMaxDim];
    lift(x.data(), xx, n);
    lift(y.data(), yy, n);
    for (int j = 0; j < n; ++j) {
      yy[j].d = 1.0;
      spray_at<D1>(k, xx, yy, n, G);
      trN += G[j].d;
      yy[j].d = 0.0;
    }
  }
  // y^i d(ln sigma)/dx^i
  double drift = 0.0;
  if (vol.log_density) {
    D1 xx[kMaxDim];
    for (int t = 0; t < n; ++t) xx[t] = D1(x[t], y[t]);
    drift = vol.log_density->eval(xx).d;
  } else {
    const double yn = y.norm();
    const double h = 1e-5 * m.chart().scale();
    Vec dir = y / yn;
    const double sp = vol.density(x + h * dir);
    const double sm = vol.density(x - h * dir);
    if (!(sp > 0.0) || !(sm > 0.0)) throw QuadratureFailure("nonpositive volume density");
    drift = yn * (std::log(sp) - std::log(sm)) / (2.0 * h);
  }
  return trN - drift;
}

double unit_ball_volume(int n) {
  return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_M.
void gauss_legendre(int M, std::vector<double>& t, std::vector<double>& w) {
  t.resize(M);
  w.resize(M);
  for (int i = 0; i < M; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (M + 0.5));
    double p1 = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      p1 = x;
      for (int k = 2; k <= M; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = M * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    t[i] = x;
    w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

// Product quadrature on S^{n-1}: uniform midpoints in the azimuth, Gaussian
// rules in t = cos(phi) for the polar levels (Legendre for the sin weight,
// Chebyshev second kind for sin^2). Weights sum to the sphere area.
void sphere_nodes(int n, int order, std::vector<Vec>& pts, std::vector<double>& wts) {
  if (n == 2) {
    const int M = 2 * order;
    for (int j = 0; j < M; ++j) {
      const double th = 2.0 * M_PI * (j + 0.5) / M;
      Vec p(2);
      p[0] = std::cos(th);
      p[1] = std::sin(th);
      pts.push_back(p);
      wts.push_back(2.0 * M_PI / M);
    }
    return;
  }
  std::vector<Vec> sub;
  std::vector<double> subw;
  sphere_nodes(n - 1, order, sub, subw);
  std::vector<double> t, w;
  const int k = n - 2;  // sin^k weight
  if (k == 1) {
    gauss_legendre(order, t, w);
  } else if (k == 2) {
    const int M = order;
    for (int j = 1; j <= M; ++j) {
      const double phi = j * M_PI / (M + 1);
      t.push_back(std::cos(phi));
      w.push_back(M_PI / (M + 1) * sq(std::sin(phi)));
    }
  } else {
    throw QuadratureFailure("sphere quadrature supports n <= 4");
  }
  for (size_t j = 0; j < t.size(); ++j) {
    const double s = std::sqrt(std::max(0.0, 1.0 - t[j] * t[j]));
    for (size_t q = 0; q < sub.size(); ++q) {
      Vec p(n);
      p[0] = t[j];
      for (int a = 0; a < n - 1; ++a) p[a + 1] = s * sub[q][a];
      pts.push_back(p);
      wts.push_back(w[j] * subw[q]);
    }
  }
}

}  // namespace

double bh_density(const Metric& m, const Vec& x, int quadrature_order) {
  require_in_chart(m, x);
  const int n = m.dim();
  std::vector<Vec> pts;
  std::vector<double> wts;
  sphere_nodes(n, quadrature_order, pts, wts);
  double vol = 0.0;
  for (size_t q = 0; q < pts.size(); ++q) {
    const double F2 = m.kernel().f2(x.data(), pts[q].data());
    if (!(F2 > 0.0) || !std::isfinite(F2)) throw QuadratureFailure("indicatrix integrand not positive");
    vol += wts[q] * std::pow(F2, -0.5 * n);
  }
  vol /= n;
  if (!(vol > 0.0) || !std::isfinite(vol)) throw QuadratureFailure("indicatrix volume not positive");
  return unit_ball_volume(n) / vol;
}

VolumeForm make_bh_volume(const Metric& m, int quadrature_order) {
  VolumeForm v;
  v.kind = VolumeForm::Kind::busemann_hausdorff;
  v.quadrature_order = quadrature_order;
  Metric copy = m;
  v.density = [copy, quadrature_order](const Vec& x) { return bh_density(copy, x, quadrature_order); };
  return v;
}

Vec legendre_covector(const Metric& m, const Vec& x, const Vec& y) {
  const int n = m.dim();
  const MetricKernel& k = m.kernel();
  D1 xx[kMaxDim], yy[kMaxDim];
  lift(x.data(), xx, n);
  lift(y.data(), yy, n);
  Vec xi(n);
  for (int i = 0; i < n; ++i) {
    yy[i].d = 1.0;
    xi[i] = 0.5 * k.f2(xx, yy).d;
    yy[i].d = 0.0;
  }
  return xi;
}

}  // namespace finsler
