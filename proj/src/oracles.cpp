#include "finsler/oracles.hpp"

#include "finsler/legendre.hpp"

namespace finsler {

namespace {

double f2_at(const Metric& m, const Vec& x, const Vec& y) {
  return m.kernel().f2(x.data(), y.data());
}

}  // namespace

Mat oracle_fundamental_tensor(const Metric& m, const Vec& x, const Vec& y, double h) {
  const int n = m.dim();
  Mat g(n, n);
  const double f0 = f2_at(m, x, y);
  for (int i = 0; i < n; ++i) {
    Vec yp = y, ym = y;
    yp[i] += h;
    ym[i] -= h;
    g(i, i) = 0.5 * (f2_at(m, x, yp) - 2.0 * f0 + f2_at(m, x, ym)) / (h * h);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Vec ypp = y, ypm = y, ymp = y, ymm = y;
      ypp[i] += h; ypp[j] += h;
      ypm[i] += h; ypm[j] -= h;
      ymp[i] -= h; ymp[j] += h;
      ymm[i] -= h; ymm[j] -= h;
      double v = 0.5 * (f2_at(m, x, ypp) - f2_at(m, x, ypm) - f2_at(m, x, ymp) + f2_at(m, x, ymm)) /
                 (4.0 * h * h);
      g(i, j) = g(j, i) = v;
    }
  return g;
}

Tensor3 oracle_cartan(const Metric& m, const Vec& x, const Vec& y, double h) {
  const int n = m.dim();
  Tensor3 C(n);
  for (int k = 0; k < n; ++k) {
    Vec yp = y, ym = y;
    yp[k] += h;
    ym[k] -= h;
    Mat gp = fundamental_tensor_unchecked(m, x, yp);
    Mat gm = fundamental_tensor_unchecked(m, x, ym);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) C(i, j, k) = 0.5 * (gp(i, j) - gm(i, j)) / (2.0 * h);
  }
  return C;
}

Vec oracle_spray_G(const Metric& m, const Vec& x, const Vec& y, double h) {
  const int n = m.dim();
  Vec B(n);
  for (int l = 0; l < n; ++l) {
    // [F^2]_{x^k y^l} y^k: directional x-shift along y, cross stencil with e_l
    Vec xp = x + h * y, xm = x - h * y;
    Vec yp = y, ym = y;
    yp[l] += h;
    ym[l] -= h;
    const double mixed = (f2_at(m, xp, yp) - f2_at(m, xp, ym) - f2_at(m, xm, yp) +
                          f2_at(m, xm, ym)) /
                         (4.0 * h * h);
    Vec xpl = x, xml = x;
    xpl[l] += h;
    xml[l] -= h;
    const double fx = (f2_at(m, xpl, y) - f2_at(m, xml, y)) / (2.0 * h);
    B[l] = mixed - fx;
  }
  Mat g = oracle_fundamental_tensor(m, x, y, h);
  return 0.25 * g.ldlt().solve(B);
}

Mat oracle_spray_N(const Metric& m, const Vec& x, const Vec& y, double h) {
  const int n = m.dim();
  Mat N(n, n);
  for (int j = 0; j < n; ++j) {
    Vec yp = y, ym = y;
    yp[j] += h;
    ym[j] -= h;
    N.col(j) = (spray_G(m, x, yp) - spray_G(m, x, ym)) / (2.0 * h);
  }
  return N;
}

Tensor3 oracle_spray_Gamma(const Metric& m, const Vec& x, const Vec& y, double h) {
  const int n = m.dim();
  Tensor3 G3(n);
  const Vec G0 = spray_G(m, x, y);
  for (int j = 0; j < n; ++j) {
    Vec yp = y, ym = y;
    yp[j] += h;
    ym[j] -= h;
    Vec d = (spray_G(m, x, yp) - 2.0 * G0 + spray_G(m, x, ym)) / (h * h);
    for (int i = 0; i < n; ++i) G3(i, j, j) = d[i];
  }
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      Vec ypp = y, ypm = y, ymp = y, ymm = y;
      ypp[j] += h; ypp[k] += h;
      ypm[j] += h; ypm[k] -= h;
      ymp[j] -= h; ymp[k] += h;
      ymm[j] -= h; ymm[k] -= h;
      Vec d = (spray_G(m, x, ypp) - spray_G(m, x, ypm) - spray_G(m, x, ymp) +
               spray_G(m, x, ymm)) /
              (4.0 * h * h);
      for (int i = 0; i < n; ++i) G3(i, j, k) = G3(i, k, j) = d[i];
    }
  return G3;
}

Vec legendre_covector(const Metric& m, const Vec& x, const Vec& y);  // metric.cpp

Tensor3 oracle_landsberg(const Metric& m, const Vec& x, const Vec& y, double h) {
  const int n = m.dim();
  Vec w = legendre_covector(m, x, y);
  Tensor3 L(n);
  for (int i = 0; i < n; ++i) {
    Vec yp = y, ym = y;
    yp[i] += h;
    ym[i] -= h;
    SprayData sp = spray_coefficients(m, x, yp);
    SprayData sm = spray_coefficients(m, x, ym);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int mm = 0; mm < n; ++mm)
          acc += w[mm] * (sp.Gamma(mm, j, k) - sm.Gamma(mm, j, k)) / (2.0 * h);
        L(i, j, k) = -0.5 * acc;
      }
  }
  return L;
}

Tensor3 oracle_landsberg_third_diff(const Metric& m, const Vec& x, const Vec& y, double h) {
  const int n = m.dim();
  Vec w = legendre_covector(m, x, y);
  Tensor3 L(n);
  auto G = [&](const Vec& yy) { return spray_G(m, x, yy); };
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        // nested central differences d^3 G / dy^i dy^j dy^k
        auto d1 = [&](const Vec& yy) {
          Vec yp = yy, ym = yy;
          yp[k] += h;
          ym[k] -= h;
          return Vec((G(yp) - G(ym)) / (2.0 * h));
        };
        auto d2 = [&](const Vec& yy) {
          Vec yp = yy, ym = yy;
          yp[j] += h;
          ym[j] -= h;
          return Vec((d1(yp) - d1(ym)) / (2.0 * h));
        };
        Vec yp = y, ym = y;
        yp[i] += h;
        ym[i] -= h;
        Vec third = (d2(yp) - d2(ym)) / (2.0 * h);
        double val = -0.5 * w.dot(third);
        L(i, j, k) = L(i, k, j) = L(j, i, k) = L(j, k, i) = L(k, i, j) = L(k, j, i) = val;
      }
  return L;
}

double oracle_divergence_laplacian(const Metric& m, const VolumeForm& vol, const ScalarField& f,
                                   const Vec& x, double h_scale) {
  const int n = m.dim();
  const double h = h_scale * m.chart().scale();
  auto flux = [&](const Vec& q, int i) {
    Vec gf = gradient(m, f, q);
    return vol.density(q) * gf[i];
  };
  double div = 0.0;
  for (int i = 0; i < n; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    div += (flux(xp, i) - flux(xm, i)) / (2.0 * h);
  }
  return div / vol.density(x);
}

Tensor3 levi_civita_christoffel(const MatrixField& h, const Vec& x) {
  const int n = h.dim();
  Mat hm;
  std::vector<Mat> dh;
  matrix_field_partials(h, x, hm, dh);
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

}  // namespace finsler
