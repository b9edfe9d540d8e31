#include "finsler/legendre.hpp"

#include <cmath>

#include "finsler/randers.hpp"

namespace finsler {

Vec legendre_covector(const Metric& m, const Vec& x, const Vec& y);  // metric.cpp

Vec legendre(const Metric& m, const Vec& x, const Vec& y) {
  require_in_chart(m, x);
  if (y.cwiseAbs().maxCoeff() <= 1e-300) return Vec::Zero(m.dim());  // L(0) = 0
  return legendre_covector(m, x, y);
}

namespace {

// Raise xi to the starting tangent for the Newton solve: Randers data gives
// the exact answer, a Riemannian h gives h^{-1} xi, else the Euclidean raise.
Vec initial_raise(const Metric& m, const Vec& x, const Vec& xi, bool use_model_guess) {
  if (use_model_guess) {
    if (auto nav = m.navigation()) return randers_legendre_inverse(*nav, x, xi);
  }
  if (auto h = m.riemann_h()) {
    D0 buf[kMaxDim * kMaxDim];
    h->eval(x.data(), buf);
    Mat hm(m.dim(), m.dim());
    for (int i = 0; i < m.dim(); ++i)
      for (int j = 0; j < m.dim(); ++j) hm(i, j) = buf[i * m.dim() + j];
    return hm.ldlt().solve(xi);
  }
  return xi;
}

}  // namespace

Vec legendre_inverse(const Metric& m, const Vec& x, const Vec& xi, const NewtonOptions& opt) {
  require_in_chart(m, x);
  const int n = m.dim();
  if (xi.cwiseAbs().maxCoeff() <= 1e-300) return Vec::Zero(n);  // L^{-1}(0) = 0

  // Solving L(y) = xi is the stationarity condition of the strictly convex
  // psi(y) = 1/2 F(y)^2 - <xi, y>; damped Newton with an Armijo backtrack on
  // psi converges from any admissible start.
  const double xin = xi.cwiseAbs().maxCoeff();
  Vec y = initial_raise(m, x, xi, opt.use_model_initial_guess);
  if (y.cwiseAbs().maxCoeff() <= 1e-300) y = xi;
  auto psi = [&](const Vec& z) -> double {
    return 0.5 * m.kernel().f2(x.data(), z.data()) - xi.dot(z);
  };
  Vec r = legendre_covector(m, x, y) - xi;
  double p0 = psi(y);
  double res = r.cwiseAbs().maxCoeff();
  double best_res = res;
  Vec best_y = y;
  for (int it = 0; it < opt.max_iters; ++it) {
    if (best_res <= opt.tol_rel * xin) return best_y;
    Mat g = fundamental_tensor_unchecked(m, x, y);
    Vec step = g.ldlt().solve(-r);
    double t = 1.0;
    Vec y_new, r_new;
    double p_new = 0.0, res_new = 0.0;
    bool ok = false;
    for (int h = 0; h < opt.max_halvings; ++h) {
      y_new = y + t * step;
      if (y_new.cwiseAbs().maxCoeff() > 1e-300) {
        p_new = psi(y_new);
        r_new = legendre_covector(m, x, y_new) - xi;
        res_new = r_new.cwiseAbs().maxCoeff();
        // near the optimum psi stagnates at machine precision; the residual
        // keeps contracting, so accept on either criterion
        if (p_new < p0 || res_new < 0.9 * res) {
          ok = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!ok) break;
    y = y_new;
    p0 = p_new;
    r = r_new;
    res = res_new;
    if (res < best_res) {
      best_res = res;
      best_y = y;
    }
  }
  if (best_res <= opt.accept_rel * xin) return best_y;
  throw NewtonDivergence("legendre inverse did not converge");
}

double dual_norm(const Metric& m, const Vec& x, const Vec& xi, const NewtonOptions& opt) {
  if (xi.cwiseAbs().maxCoeff() <= 1e-300) return 0.0;
  Vec y = legendre_inverse(m, x, xi, opt);
  return eval_F(m, x, y);
}

namespace {

struct ReverseKernel {
  std::shared_ptr<const MetricKernel> inner;
  template <class S>
  S operator()(const S* x, const S* y, int n) const {
    S ny[kMaxDim];
    for (int i = 0; i < n; ++i) ny[i] = -y[i];
    return inner->f2(x, ny);
  }
};

struct NegatedField {
  std::shared_ptr<const VectorField> w;
  template <class S>
  void operator()(const S* x, S* out, int n) const {
    S buf[kMaxDim];
    w->eval(x, buf);
    for (int i = 0; i < n; ++i) out[i] = -buf[i];
  }
};

}  // namespace

Metric reverse_model(const Metric& m) {
  if (m.reversible()) return m;
  Metric out;
  if (auto nav = m.navigation()) {
    // The reverse of a navigation metric is navigation by (h, -W).
    auto rev = std::make_shared<NavigationData>(*nav);
    rev->W = make_vector_field(nav->n, NegatedField{nav->W});
    Metric built = build_randers(rev);
    built.set_both_complete(m.both_complete());
    return built;
  }
  out = Metric(MetricKind::reverse, m.chart(),
               make_metric_kernel(m.dim(), ReverseKernel{m.kernel_ptr()}));
  out.set_both_complete(m.both_complete());
  out.set_riemann_h(m.riemann_h());
  return out;
}

Vec eta_minus(const Metric& m, const Vec& x, const Vec& eta) {
  Vec xi = legendre(m, x, eta);
  Vec y = legendre_inverse(m, x, -xi);
  return y / eval_F(m, x, y);
}

Vec gradient(const Metric& m, const ScalarField& f, const Vec& x) {
  require_in_chart(m, x);
  Vec df = f.differential(x, m.chart().scale());
  if (df.cwiseAbs().maxCoeff() <= 1e-12) throw VanishingGradient();
  return legendre_inverse(m, x, df);
}

Mat hessian(const Metric& m, const ScalarField& f, const Vec& x, double fd_step_scale) {
  require_in_chart(m, x);
  const int n = m.dim();
  Vec gf = gradient(m, f, x);
  auto grad_field = [&](const Vec& q) { return gradient(m, f, q); };
  const double h = fd_step_scale * m.chart().scale();
  SprayData s = spray_coefficients(m, x, gf);
  Mat H(n, n);
  Vec xp = x, xm = x;
  for (int j = 0; j < n; ++j) {
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    Vec d = (grad_field(xp) - grad_field(xm)) / (2.0 * h);
    for (int i = 0; i < n; ++i) {
      double acc = d[i];
      for (int kk = 0; kk < n; ++kk) acc += s.Gamma(i, j, kk) * gf[kk];
      H(i, j) = acc;
    }
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return H;
}

double laplacian(const Metric& m, const VolumeForm& vol, const ScalarField& f, const Vec& x,
                 double fd_step_scale) {
  Mat H = hessian(m, f, x, fd_step_scale);
  Vec gf = gradient(m, f, x);
  return H.trace() - s_curvature(m, vol, x, gf);
}

}  // namespace finsler
