#include "finsler/focal.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace finsler {

SCValues sc_eval(double c, double s) {
  SCValues v;
  if (c == 0.0) {
    v.sc = s;
    v.scp = 1.0;
    v.scpp = 0.0;
  } else if (c > 0.0) {
    const double r = std::sqrt(c);
    v.sc = std::sin(r * s) / r;
    v.scp = std::cos(r * s);
    v.scpp = -r * std::sin(r * s);
  } else {
    const double r = std::sqrt(-c);
    v.sc = std::sinh(r * s) / r;
    v.scp = std::cosh(r * s);
    v.scpp = r * std::sinh(r * s);
  }
  return v;
}

std::vector<double> focal_distances(double c, double lambda, double s_lo, double s_hi) {
  std::vector<double> out;
  if (c > 0.0) {
    const double r = std::sqrt(c);
    const double theta = M_PI / 2.0 - std::atan(lambda / r);  // arccot in (0, pi)
    const double base = theta / r;
    const double period = M_PI / r;
    long k_lo = static_cast<long>(std::floor((s_lo - base) / period)) - 1;
    long k_hi = static_cast<long>(std::ceil((s_hi - base) / period)) + 1;
    for (long k = k_lo; k <= k_hi; ++k) {
      double s = base + k * period;
      if (s >= s_lo && s <= s_hi) out.push_back(s);
    }
  } else if (c == 0.0) {
    if (lambda > 0.0) {
      double s = 1.0 / lambda;
      if (s >= s_lo && s <= s_hi) out.push_back(s);
    }
  } else {
    const double r = std::sqrt(-c);
    if (lambda > r) {
      double s = std::atanh(r / lambda) / r;
      if (s >= s_lo && s <= s_hi) out.push_back(s);
    }
  }
  return out;
}

namespace {

// Columns of d(phi_s) at x in surface directions, by central differences of
// the varied normal geodesics. Curves stay on the surface via projection.
Mat tube_jacobian(const Metric& m, const LevelSetSurface& surf, const Vec& x,
                  bool plus_orientation, double s, double h, Vec* center_vel = nullptr,
                  Vec* center_pos = nullptr) {
  NormalPair np = unit_normal(m, surf, x);
  Vec n0 = plus_orientation ? np.n_plus : np.n_minus;
  Mat T = tangent_basis(m, surf, x, n0);
  auto n_field = level_set_normal_field(m, surf, plus_orientation);
  const int n = m.dim(), mdim = static_cast<int>(T.cols());
  Mat J(n, mdim);
  for (int a = 0; a < mdim; ++a) {
    Vec xp = project_to_level_set(m, surf, x + h * T.col(a));
    Vec xm = project_to_level_set(m, surf, x - h * T.col(a));
    Vec Pp = normal_exp(m, xp, n_field(xp), s);
    Vec Pm = normal_exp(m, xm, n_field(xm), s);
    J.col(a) = (Pp - Pm) / (2.0 * h);
  }
  if (center_vel || center_pos) {
    Vec p, v;
    normal_exp_state(m, x, n0, s, p, v);
    if (center_vel) *center_vel = v;
    if (center_pos) *center_pos = p;
  }
  return J;
}

}  // namespace

std::vector<Vec> tube_map(const Metric& m, const LevelSetSurface& surf, bool plus_orientation,
                          double s, const std::vector<Vec>& samples, bool check_immersion) {
  auto n_field = level_set_normal_field(m, surf, plus_orientation);
  std::vector<Vec> out;
  out.reserve(samples.size());
  const double h = 1e-4 * m.chart().scale();
  for (const Vec& x : samples) {
    out.push_back(normal_exp(m, x, n_field(x), s));
    if (check_immersion) {
      Mat J = tube_jacobian(m, surf, x, plus_orientation, s, h);
      Eigen::JacobiSVD<Mat> svd(J);
      const double lead = svd.singularValues()[0];
      if (!(lead > 0.0) || svd.singularValues().minCoeff() < 1e-6 * lead)
        throw FocalSingularity("tube map degenerate at a sample");
    }
  }
  return out;
}

CurvatureSpectrum tube_principal_curvatures(double c, const CurvatureSpectrum& base, double s,
                                            int codim, double guard_tol) {
  SCValues v = sc_eval(c, s);
  CurvatureSpectrum raw;
  raw.cluster_tol = base.cluster_tol;
  std::vector<std::pair<double, int>> vals;
  for (size_t i = 0; i < base.values.size(); ++i) {
    const double lam = base.values[i];
    const double den = v.scp - lam * v.sc;
    if (std::abs(den) <= guard_tol) throw FocalSingularity("s is a focal distance of the base");
    vals.push_back({(-v.scpp + lam * v.scp) / den, base.multiplicities[i]});
  }
  if (codim > 1) {
    if (std::abs(v.sc) <= guard_tol) throw FocalSingularity("s_c(s) = 0 with codim > 1");
    vals.push_back({-v.scp / v.sc, codim - 1});
  }
  std::sort(vals.begin(), vals.end());
  // merge clusters that collide after the transport
  for (const auto& [val, mult] : vals) {
    if (!raw.values.empty() && std::abs(val - raw.values.back()) <= raw.cluster_tol) {
      raw.multiplicities.back() += mult;
    } else {
      raw.values.push_back(val);
      raw.multiplicities.push_back(mult);
    }
  }
  return raw;
}

std::vector<std::pair<double, int>> focal_submanifold_curvatures(double c, int i,
                                                                 const CurvatureSpectrum& spec) {
  const int g = spec.g();
  for (int a = 0; a < g; ++a)
    for (int b = a + 1; b < g; ++b)
      if (std::abs(spec.values[a] - spec.values[b]) <= 1e-9)
        throw DuplicateCurvature("spectrum values not pairwise distinct");
  std::vector<std::pair<double, int>> out;
  for (int j = 0; j < g; ++j) {
    if (j == i) continue;
    const double li = spec.values[i], lj = spec.values[j];
    out.push_back({(c + li * lj) / (li - lj), spec.multiplicities[j]});
  }
  return out;
}

std::vector<FocalPoint> detect_focal_numeric(const Metric& m, const LevelSetSurface& surf,
                                             const Vec& x, bool plus_orientation, double s_lo,
                                             double s_hi, int grid, double fd_step_scale) {
  NormalPair np = unit_normal(m, surf, x);
  Vec n0 = plus_orientation ? np.n_plus : np.n_minus;
  Mat T = tangent_basis(m, surf, x, n0);
  auto n_field = level_set_normal_field(m, surf, plus_orientation);
  const int n = m.dim(), mdim = static_cast<int>(T.cols());
  const double h = fd_step_scale * m.chart().scale();

  // one dense path per varied start; every sigma_min(s) query is interpolation
  std::vector<GeodesicPath> paths;
  paths.reserve(2 * mdim);
  for (int a = 0; a < mdim; ++a) {
    Vec xp = project_to_level_set(m, surf, x + h * T.col(a));
    Vec xm = project_to_level_set(m, surf, x - h * T.col(a));
    paths.push_back(integrate_geodesic(m, xp, n_field(xp), s_hi));
    paths.push_back(integrate_geodesic(m, xm, n_field(xm), s_hi));
  }
  auto singulars = [&](double s) -> Vec {
    Mat J(n, mdim);
    for (int a = 0; a < mdim; ++a)
      J.col(a) = (paths[2 * a].position(s) - paths[2 * a + 1].position(s)) / (2.0 * h);
    Eigen::JacobiSVD<Mat> svd(J);
    return svd.singularValues();
  };

  std::vector<double> sg(grid + 1), smin(grid + 1);
  double lead = 0.0;
  const double lo = std::max(s_lo, 1e-6 * (s_hi - s_lo));
  for (int k = 0; k <= grid; ++k) {
    sg[k] = lo + (s_hi - lo) * k / grid;
    Vec sv = singulars(sg[k]);
    smin[k] = sv.minCoeff();
    lead = std::max(lead, sv[0]);
  }

  std::vector<FocalPoint> out;
  for (int k = 1; k < grid; ++k) {
    if (!(smin[k] <= smin[k - 1] && smin[k] <= smin[k + 1])) continue;
    if (smin[k] > 0.05 * lead) continue;
    // parabolic refinement of q(s) = sigma_min(s)^2
    double a = sg[k - 1], b = sg[k], c2 = sg[k + 1];
    double qa = sq(smin[k - 1]), qb = sq(smin[k]), qc = sq(smin[k + 1]);
    for (int it = 0; it < 80 && (c2 - a) > 1e-11; ++it) {
      const double d1 = (qa - qb) * (c2 - b), d2 = (qc - qb) * (b - a);
      const double denom = 2.0 * (d1 + d2);
      double vertex = denom != 0.0 ? b + (d1 * (c2 - b) - d2 * (b - a)) / denom : 0.5 * (a + c2);
      if (!(vertex > a && vertex < c2) || vertex == b)
        vertex = (b - a > c2 - b) ? 0.5 * (a + b) : 0.5 * (b + c2);
      const double qv = sq(singulars(vertex).minCoeff());
      if (vertex < b) {
        if (qv <= qb) {
          c2 = b;
          qc = qb;
          b = vertex;
          qb = qv;
        } else {
          a = vertex;
          qa = qv;
        }
      } else {
        if (qv <= qb) {
          a = b;
          qa = qb;
          b = vertex;
          qb = qv;
        } else {
          c2 = vertex;
          qc = qv;
        }
      }
    }
    FocalPoint fp;
    fp.s = b;
    Vec sv = singulars(b);
    fp.smallest_singular = sv.minCoeff();
    int mult = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] < std::max(1e-4 * lead, 1e-9)) ++mult;
    fp.multiplicity = mult;
    if (!out.empty() && std::abs(out.back().s - fp.s) < 1e-6 * (s_hi - lo)) continue;
    out.push_back(fp);
  }
  return out;
}

MeasuredTubeSpectrum measured_tube_spectrum(const Metric& m, const LevelSetSurface& surf,
                                            const Vec& x, bool plus_orientation, double s,
                                            double cluster_tol, double fd_step_scale) {
  NormalPair np = unit_normal(m, surf, x);
  Vec n0 = plus_orientation ? np.n_plus : np.n_minus;
  Mat T = tangent_basis(m, surf, x, n0);
  auto n_field = level_set_normal_field(m, surf, plus_orientation);
  const int n = m.dim(), mdim = static_cast<int>(T.cols());
  const double h = fd_step_scale * m.chart().scale();

  Vec p0, eta;
  normal_exp_state(m, x, n0, s, p0, eta);
  Mat X(n, mdim), dEta(n, mdim);
  for (int a = 0; a < mdim; ++a) {
    Vec xp = project_to_level_set(m, surf, x + h * T.col(a));
    Vec xm = project_to_level_set(m, surf, x - h * T.col(a));
    Vec pp, vp, pm, vm;
    normal_exp_state(m, xp, n_field(xp), s, pp, vp);
    normal_exp_state(m, xm, n_field(xm), s, pm, vm);
    X.col(a) = (pp - pm) / (2.0 * h);
    dEta.col(a) = (vp - vm) / (2.0 * h);
  }

  Mat g = fundamental_tensor(m, p0, eta);
  SprayData sp = spray_coefficients(m, p0, eta);
  MeasuredTubeSpectrum out;
  Vec xi = g * eta;  // L(eta) since F(eta) = 1
  Mat op(mdim, mdim), gram(mdim, mdim);
  Mat AX(n, mdim);
  for (int a = 0; a < mdim; ++a) {
    // D^eta_{X_a} eta = d(eta)/dt + Gamma(eta)(X_a, eta); the latter is N(eta) X_a
    Vec D = dEta.col(a) + sp.N * X.col(a);
    AX.col(a) = -(D - (eta.dot(g * D)) * eta);
    out.gauss_residual = std::max(out.gauss_residual, std::abs(xi.dot(X.col(a))) / X.col(a).norm());
  }
  for (int a = 0; a < mdim; ++a)
    for (int b = 0; b < mdim; ++b) {
      op(a, b) = X.col(b).dot(g * AX.col(a));
      gram(a, b) = X.col(a).dot(g * X.col(b));
    }
  GeneralizedEig eig = whitened_eig(op, gram);
  out.spectrum = cluster_eigenvalues(eig.values, cluster_tol);
  return out;
}

MeasuredTubeSpectrum measured_tube_spectrum_codim(
    const Metric& m, const ParametricPatch& base,
    const std::function<Vec(const Vec& u, const Vec& omega)>& normal_family, const Vec& u0,
    const Vec& omega0, int fibre_dim, double s, double cluster_tol, double fd_step_scale) {
  const int n = m.dim();
  const int mdim = base.mdim + fibre_dim;  // tube dimension = n-1 expected
  const double h = fd_step_scale * std::max(1.0, m.chart().scale());

  auto endpoint = [&](const Vec& u, const Vec& om, Vec& p, Vec& v) {
    Vec x = base.chart_map(u);
    normal_exp_state(m, x, normal_family(u, om), s, p, v);
  };

  Vec p0, eta;
  endpoint(u0, omega0, p0, eta);
  Mat X(n, mdim), dEta(n, mdim);
  int col = 0;
  for (int a = 0; a < base.mdim; ++a, ++col) {
    Vec up = u0, um = u0;
    up[a] += h;
    um[a] -= h;
    Vec pp, vp, pm, vm;
    endpoint(up, omega0, pp, vp);
    endpoint(um, omega0, pm, vm);
    X.col(col) = (pp - pm) / (2.0 * h);
    dEta.col(col) = (vp - vm) / (2.0 * h);
  }
  for (int b = 0; b < fibre_dim; ++b, ++col) {
    Vec op_ = omega0, om_ = omega0;
    op_[b] += h;
    om_[b] -= h;
    Vec pp, vp, pm, vm;
    endpoint(u0, op_, pp, vp);
    endpoint(u0, om_, pm, vm);
    X.col(col) = (pp - pm) / (2.0 * h);
    dEta.col(col) = (vp - vm) / (2.0 * h);
  }

  Mat g = fundamental_tensor(m, p0, eta);
  SprayData sp = spray_coefficients(m, p0, eta);
  MeasuredTubeSpectrum out;
  Vec xi = g * eta;
  Mat op(mdim, mdim), gram(mdim, mdim), AX(n, mdim);
  for (int a = 0; a < mdim; ++a) {
    Vec D = dEta.col(a) + sp.N * X.col(a);
    AX.col(a) = -(D - (eta.dot(g * D)) * eta);
    out.gauss_residual = std::max(out.gauss_residual, std::abs(xi.dot(X.col(a))) / X.col(a).norm());
  }
  for (int a = 0; a < mdim; ++a)
    for (int b = 0; b < mdim; ++b) {
      op(a, b) = X.col(b).dot(g * AX.col(a));
      gram(a, b) = X.col(a).dot(g * X.col(b));
    }
  GeneralizedEig eig = whitened_eig(op, gram);
  out.spectrum = cluster_eigenvalues(eig.values, cluster_tol);
  return out;
}

}  // namespace finsler
