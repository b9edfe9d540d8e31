#include "finsler/hypersurface.hpp"

#include <Eigen/QR>
#include <cmath>

namespace finsler {

Mat ParametricPatch::jacobian_at(const Vec& u) const {
  if (jac) return jac(u);
  const int m = mdim;
  Vec up = u, um = u;
  Mat J;
  for (int a = 0; a < m; ++a) {
    up[a] = u[a] + fd_step;
    um[a] = u[a] - fd_step;
    Vec col = (chart_map(up) - chart_map(um)) / (2.0 * fd_step);
    if (a == 0) J = Mat(col.size(), m);
    J.col(a) = col;
    up[a] = u[a];
    um[a] = u[a];
  }
  return J;
}

Vec project_to_level_set(const Metric& m, const LevelSetSurface& surf, const Vec& x0,
                         double tol, int max_iters) {
  require_in_chart(m, x0);
  Vec d = surf.f.differential(x0, m.chart().scale());
  if (d.norm() <= 1e-12) throw IrregularPoint("df = 0 at projection seed");
  d /= d.norm();
  double t = 0.0;
  double val = surf.f(x0) - surf.level;
  const double scale = std::max(1.0, std::abs(surf.level));
  for (int it = 0; it < max_iters; ++it) {
    if (std::abs(val) <= tol * scale) {
      Vec x = x0 + t * d;
      require_in_chart(m, x);
      return x;
    }
    Vec x = x0 + t * d;
    double slope = surf.f.differential(x, m.chart().scale()).dot(d);
    if (std::abs(slope) <= 1e-14) throw IrregularPoint("level-set projection stalled");
    double step = -val / slope;
    // damped Newton on the 1-D section
    for (int h = 0; h < 50; ++h) {
      double cand = surf.f(x0 + (t + step) * d) - surf.level;
      if (std::abs(cand) < std::abs(val)) {
        t += step;
        val = cand;
        break;
      }
      step *= 0.5;
      if (h == 49) throw IrregularPoint("level-set projection did not converge");
    }
  }
  throw IrregularPoint("level-set projection iteration cap");
}

Mat annihilator_basis(const Vec& row) {
  const int n = static_cast<int>(row.size());
  // Householder QR of the single column row^T: the trailing n-1 columns of Q
  // are an orthonormal basis of ker(row).
  Mat col(n, 1);
  col.col(0) = row / row.norm();
  Eigen::HouseholderQR<Mat> qr(col);
  Mat Q = qr.householderQ();
  return Q.rightCols(n - 1);
}

Mat tangent_basis(const Metric& m, const LevelSetSurface& surf, const Vec& x, const Vec& n) {
  Vec xi = legendre(m, x, n);
  Mat T0 = annihilator_basis(xi);  // Euclidean kernel of L(n)
  Mat g = fundamental_tensor(m, x, n);
  // g_n-orthonormalize (modified Gram-Schmidt)
  const int mdim = static_cast<int>(T0.cols());
  Mat T = T0;
  for (int a = 0; a < mdim; ++a) {
    Vec v = T.col(a);
    for (int b = 0; b < a; ++b) v -= (T.col(b).dot(g * v)) * T.col(b);
    double nv = std::sqrt(v.dot(g * v));
    if (!(nv > 1e-12)) throw EigenFailure("degenerate tangent Gram matrix");
    T.col(a) = v / nv;
  }
  (void)surf;
  return T;
}

NormalPair unit_normal(const Metric& m, const LevelSetSurface& surf, const Vec& x) {
  require_in_chart(m, x);
  if (std::abs(surf.f(x) - surf.level) > 1e-8 * std::max(1.0, std::abs(surf.level)))
    throw IrregularPoint("point not on the level set");
  Vec df = surf.f.differential(x, m.chart().scale());
  if (df.norm() <= 1e-12) throw IrregularPoint("df = 0: irregular level-set point");
  NormalPair out;
  Vec gf = legendre_inverse(m, x, df);
  out.n_plus = gf / eval_F(m, x, gf);
  out.n_minus = eta_minus(m, x, out.n_plus);
  return out;
}

NormalPair unit_normal(const Metric& m, const ParametricPatch& patch, const Vec& u) {
  Vec x = patch.chart_map(u);
  require_in_chart(m, x);
  Mat J = patch.jacobian_at(u);
  if (J.cols() != m.dim() - 1)
    throw IrregularPoint("unit_normal on a patch needs codimension 1");
  Eigen::ColPivHouseholderQR<Mat> qr(J);
  if (qr.rank() < J.cols()) throw IrregularPoint("rank-deficient patch Jacobian");
  // covector annihilating the columns of J: kernel of J^T
  Eigen::HouseholderQR<Mat> full(J);
  Mat Q = full.householderQ();
  Vec nu = Q.col(m.dim() - 1);
  // deterministic sign: first nonzero component positive
  for (int i = 0; i < nu.size(); ++i) {
    if (std::abs(nu[i]) > 1e-12) {
      if (nu[i] < 0.0) nu = -nu;
      break;
    }
  }
  NormalPair out;
  Vec y = legendre_inverse(m, x, nu);
  out.n_plus = y / eval_F(m, x, y);
  out.n_minus = eta_minus(m, x, out.n_plus);
  return out;
}

std::function<Vec(const Vec&)> level_set_normal_field(const Metric& m, const LevelSetSurface& surf,
                                                      bool plus_orientation) {
  Metric model = m;
  ScalarField f = surf.f;
  return [model, f, plus_orientation](const Vec& q) -> Vec {
    Vec df = f.differential(q, model.chart().scale());
    if (plus_orientation) {
      Vec y = legendre_inverse(model, q, df);
      return Vec(y / eval_F(model, q, y));
    }
    Vec y = legendre_inverse(model, q, Vec(-df));
    return Vec(y / eval_F(model, q, y));
  };
}

namespace {

// Common Weingarten assembly: tangent basis, -P(D^n_X n) columns, eigen data.
ShapeOperator weingarten(const Metric& m, const Vec& x, const Vec& n, const Mat& T,
                         const std::function<Vec(int)>& Dn_along_basis) {
  const int mdim = static_cast<int>(T.cols());
  Mat g = fundamental_tensor(m, x, n);
  ShapeOperator out;
  out.basis = T;
  out.normal = n;
  Mat AX(m.dim(), mdim);
  for (int a = 0; a < mdim; ++a) {
    Vec D = Dn_along_basis(a);
    // g_n-tangential part: subtract the normal component (g_n(n,n) = 1)
    Vec proj = D - (n.dot(g * D)) * n;
    AX.col(a) = -proj;
  }
  // coordinates in the orthonormal basis: A_ab = g_n(A(t_a), t_b)
  out.matrix = Mat(mdim, mdim);
  for (int a = 0; a < mdim; ++a)
    for (int b = 0; b < mdim; ++b) out.matrix(a, b) = T.col(b).dot(g * AX.col(a));
  return out;
}

}  // namespace

ShapeOperator shape_operator(const Metric& m, const LevelSetSurface& surf, const Vec& x,
                             const Vec& n, double fd_step_scale) {
  NormalPair np = unit_normal(m, surf, x);
  bool plus;
  if ((n - np.n_plus).norm() <= 1e-8 * std::max(1.0, np.n_plus.norm()))
    plus = true;
  else if ((n - np.n_minus).norm() <= 1e-8 * std::max(1.0, np.n_minus.norm()))
    plus = false;
  else
    throw NotANormal("n does not match either unit normal at x");
  auto field = level_set_normal_field(m, surf, plus);
  Vec n0 = plus ? np.n_plus : np.n_minus;
  Mat T = tangent_basis(m, surf, x, n0);
  const double h = fd_step_scale * m.chart().scale();
  SprayData sp = spray_coefficients(m, x, n0);
  auto Dn = [&](int a) -> Vec {
    Vec dir = T.col(a);
    Vec d = (field(x + h * dir) - field(x - h * dir)) / (2.0 * h);
    for (int i = 0; i < m.dim(); ++i) {
      double acc = 0.0;
      for (int j = 0; j < m.dim(); ++j)
        for (int k = 0; k < m.dim(); ++k) acc += sp.Gamma(i, j, k) * dir[j] * n0[k];
      d[i] += acc;
    }
    return d;
  };
  return weingarten(m, x, n0, T, Dn);
}

ShapeOperator shape_operator(const Metric& m, const ParametricPatch& patch, const Vec& u,
                             double fd_step_scale) {
  Vec x = patch.chart_map(u);
  NormalPair np = unit_normal(m, patch, u);
  Vec n0 = np.n_plus;
  Mat J = patch.jacobian_at(u);
  // g_n-orthonormalize the patch tangent columns
  Mat g = fundamental_tensor(m, x, n0);
  Mat T = J;
  for (int a = 0; a < T.cols(); ++a) {
    Vec v = T.col(a);
    for (int b = 0; b < a; ++b) v -= (T.col(b).dot(g * v)) * T.col(b);
    double nv = std::sqrt(v.dot(g * v));
    if (!(nv > 1e-12)) throw EigenFailure("degenerate patch tangent Gram");
    T.col(a) = v / nv;
  }
  // normal field along parameter curves, differentiated in u
  const double h = fd_step_scale;
  SprayData sp = spray_coefficients(m, x, n0);
  // patch tangent directions expressed in parameters: T = J * coef
  Mat coef = (J.transpose() * J).ldlt().solve(J.transpose() * T);
  auto Dn = [&](int a) -> Vec {
    Vec du = coef.col(a);
    Vec up = u + h * du, um = u - h * du;
    Vec npu = unit_normal(m, patch, up).n_plus;
    Vec nmu = unit_normal(m, patch, um).n_plus;
    if ((npu + nmu).norm() < npu.norm()) npu = -npu;  // orientation continuity
    Vec d = (npu - nmu) / (2.0 * h);
    Vec X = T.col(a);
    for (int i = 0; i < m.dim(); ++i) {
      double acc = 0.0;
      for (int j = 0; j < m.dim(); ++j)
        for (int k = 0; k < m.dim(); ++k) acc += sp.Gamma(i, j, k) * X[j] * n0[k];
      d[i] += acc;
    }
    return d;
  };
  return weingarten(m, x, n0, T, Dn);
}

CurvatureSpectrum cluster_eigenvalues(const Vec& eig, double cluster_tol) {
  CurvatureSpectrum s;
  s.cluster_tol = cluster_tol;
  std::vector<double> v(eig.data(), eig.data() + eig.size());
  std::sort(v.begin(), v.end());
  size_t i = 0;
  while (i < v.size()) {
    size_t j = i + 1;
    double sum = v[i];
    while (j < v.size() && v[j] - v[j - 1] <= cluster_tol) {
      sum += v[j];
      ++j;
    }
    s.values.push_back(sum / static_cast<double>(j - i));
    s.multiplicities.push_back(static_cast<int>(j - i));
    i = j;
  }
  return s;
}

CurvatureSpectrum principal_curvatures(const ShapeOperator& A, double cluster_tol) {
  Mat sym = 0.5 * (A.matrix + A.matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) throw EigenFailure("shape operator eigensolve failed");
  return cluster_eigenvalues(es.eigenvalues(), cluster_tol);
}

CurvatureSpectrum principal_curvatures(const Metric& m, const LevelSetSurface& surf, const Vec& x,
                                       const Vec& n, double cluster_tol) {
  return principal_curvatures(shape_operator(m, surf, x, n), cluster_tol);
}

double anisotropic_mean_curvature(const Metric& m, const LevelSetSurface& surf, const Vec& x,
                                  const Vec& n) {
  return shape_operator(m, surf, x, n).matrix.trace();
}

double second_fundamental_form(const Metric& m, const LevelSetSurface& surf, const Vec& x,
                               const Vec& n, const Vec& X, const Vec& Y) {
  Mat g = fundamental_tensor(m, x, n);
  const double scale = std::max({1.0, X.norm(), Y.norm()});
  if (std::abs(n.dot(g * X)) > 1e-8 * scale || std::abs(n.dot(g * Y)) > 1e-8 * scale)
    throw NotTangent("X or Y not tangent at x");
  ShapeOperator A = shape_operator(m, surf, x, n);
  // h(X,Y) = g_n(A X, Y) through the basis representation
  Vec cx = A.basis.transpose() * (g * X);  // coordinates of X in the orthonormal basis
  Vec cy = A.basis.transpose() * (g * Y);
  return cx.dot(A.matrix * cy);
}

Vec reversible_torsion(const Metric& m, const std::function<Vec(const Vec&)>& eta_field,
                       const Vec& x, const Vec& X, double fd_step_scale) {
  require_in_chart(m, x);
  Vec eta = eta_field(x);
  Mat g = fundamental_tensor(m, x, eta);
  if (std::abs(eta.dot(g * X)) > 1e-6 * std::max(1.0, X.norm()))
    throw NotOrthogonal("g_eta(eta, X) != 0");
  auto eta_minus_field = [&](const Vec& q) { return eta_minus(m, q, eta_field(q)); };
  Vec em = eta_minus_field(x);
  const double h = fd_step_scale * m.chart().scale();
  const double Xn = X.norm();
  Vec dir = X / Xn;
  Vec d_eta = (eta_field(x + h * dir) - eta_field(x - h * dir)) * (Xn / (2.0 * h));
  Vec d_em = (eta_minus_field(x + h * dir) - eta_minus_field(x - h * dir)) * (Xn / (2.0 * h));
  SprayData sp_p = spray_coefficients(m, x, eta);
  SprayData sp_m = spray_coefficients(m, x, em);
  Vec out(m.dim());
  for (int i = 0; i < m.dim(); ++i) {
    double acc = d_eta[i] + d_em[i];
    for (int j = 0; j < m.dim(); ++j)
      for (int k = 0; k < m.dim(); ++k)
        acc += sp_p.Gamma(i, j, k) * X[j] * eta[k] + sp_m.Gamma(i, j, k) * X[j] * em[k];
    out[i] = acc;
  }
  return out;
}

}  // namespace finsler
