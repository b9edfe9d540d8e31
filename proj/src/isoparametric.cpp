#include "finsler/isoparametric.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace finsler {

namespace {

std::vector<Vec> level_samples(const Metric& m, const ScalarField& f, double level, int count,
                               Rng& rng, double radius) {
  std::vector<Vec> out;
  LevelSetSurface surf{f, level};
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > 50 * count) throw IrregularPoint("could not sample the level set");
    Vec seed = rng.normal_vec(m.dim());
    seed *= rng.uniform(0.1, 1.0) * radius / seed.norm();
    seed += m.chart().center;
    try {
      Vec x = project_to_level_set(m, surf, seed);
      if ((x - m.chart().center).norm() > 0.95 * m.chart().scale()) continue;
      out.push_back(x);
    } catch (const Error&) {
      continue;
    }
  }
  return out;
}

void spread_stats(const std::vector<double>& vals, double& mean, double& rel_spread) {
  mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double dev = 0.0;
  for (double v : vals) dev = std::max(dev, std::abs(v - mean));
  rel_spread = dev / std::max(1.0, std::abs(mean));
}

}  // namespace

IsoparametricReport verify_transnormal(const Metric& m, const ScalarField& f,
                                       const std::vector<double>& levels, int samples_per_level,
                                       double tol, Rng& rng, double sample_radius) {
  IsoparametricReport rep;
  rep.levels = levels;
  rep.tolerance = tol;
  rep.samples_per_level = samples_per_level;
  rep.transnormal = true;
  for (double t : levels) {
    std::vector<Vec> pts = level_samples(m, f, t, samples_per_level, rng, sample_radius);
    std::vector<double> vals;
    for (const Vec& x : pts) vals.push_back(eval_F(m, x, gradient(m, f, x)));
    double mean, spread;
    spread_stats(vals, mean, spread);
    rep.a_tilde.push_back(mean);
    rep.a_spread.push_back(spread);
    if (spread > tol) rep.transnormal = false;
  }
  return rep;
}

IsoparametricReport verify_isoparametric(const Metric& m, const VolumeForm& vol,
                                         const ScalarField& f, const std::vector<double>& levels,
                                         int samples_per_level, double tol, Rng& rng,
                                         double sample_radius) {
  IsoparametricReport rep = verify_transnormal(m, f, levels, samples_per_level, tol, rng,
                                               sample_radius);
  rep.isoparametric = rep.transnormal;
  Rng rng2(0x15e7a11eULL);
  for (double t : levels) {
    std::vector<Vec> pts = level_samples(m, f, t, samples_per_level, rng2, sample_radius);
    std::vector<double> vals;
    for (const Vec& x : pts) vals.push_back(laplacian(m, vol, f, x));
    double mean, spread;
    spread_stats(vals, mean, spread);
    rep.b_tilde.push_back(mean);
    rep.b_spread.push_back(spread);
    if (spread > tol) rep.isoparametric = false;
  }
  return rep;
}

CartanResidual cartan_residuals(double c, const CurvatureSpectrum& spec) {
  const int g = spec.g();
  for (int a = 0; a < g; ++a)
    for (int b = a + 1; b < g; ++b)
      if (std::abs(spec.values[a] - spec.values[b]) <= 1e-9)
        throw DuplicateCurvature("spectrum values not pairwise distinct");
  CartanResidual out;
  for (int i = 0; i < g; ++i) {
    double acc = 0.0;
    for (int j = 0; j < g; ++j) {
      if (j == i) continue;
      acc += spec.multiplicities[j] * (c + spec.values[i] * spec.values[j]) /
             (spec.values[i] - spec.values[j]);
    }
    out.r.push_back(acc);
  }
  return out;
}

SpacingCheck check_spacing(double c, const CurvatureSpectrum& spec) {
  if (!(c > 0.0)) throw NotPositiveCurvature("spacing check requires c > 0");
  const double r = std::sqrt(c);
  SpacingCheck out;
  // descending curvatures -> ascending theta = arccot(lambda/sqrt(c))
  std::vector<double> lam(spec.values.rbegin(), spec.values.rend());
  for (double l : lam) out.theta.push_back(M_PI / 2.0 - std::atan(l / r));
  const int g = static_cast<int>(out.theta.size());
  for (int i = 0; i < g; ++i) {
    double expect = out.theta[0] + i * M_PI / g;
    out.deviation = std::max(out.deviation, std::abs(out.theta[i] - expect));
  }
  return out;
}

bool check_multiplicity_pattern(const std::vector<int>& m) {
  const int g = static_cast<int>(m.size());
  for (int i = 0; i < g; ++i)
    if (m[i] != m[(i + 2) % g]) return false;
  return true;
}

bool count_bound_check(double c, const CurvatureSpectrum& spec, double spacing_tol) {
  if (c <= 0.0) return spec.g() <= 2;
  return check_spacing(c, spec).deviation <= spacing_tol &&
         check_multiplicity_pattern(spec.multiplicities);
}

MinimalityReport minimality_audit(const Metric& m, const std::vector<FocalSample>& samples,
                                  double fd_step_scale) {
  MinimalityReport rep;
  rep.vacuous = true;
  const int n = m.dim();
  const double h = fd_step_scale * std::max(1.0, m.chart().scale());
  for (const FocalSample& sample : samples) {
    if (sample.dim == 0) continue;  // nothing to trace over
    rep.vacuous = false;
    const Vec u0 = Vec::Zero(sample.dim);
    const Vec p0 = sample.chart(u0);

    // tangent columns at u (central differences of the chart)
    auto tangent_at = [&](const Vec& u) {
      Mat T(n, sample.dim);
      Vec up = u, um = u;
      for (int a = 0; a < sample.dim; ++a) {
        up[a] = u[a] + h;
        um[a] = u[a] - h;
        T.col(a) = (sample.chart(up) - sample.chart(um)) / (2.0 * h);
        up[a] = u[a];
        um[a] = u[a];
      }
      return T;
    };
    const Mat T0 = tangent_at(u0);

    for (const Vec& eta0 : sample.normal_seeds) {
      // smooth unit normal field: freeze the seed covector, project it onto
      // the annihilator of the moving tangent space, invert and normalize
      Vec xi0 = legendre(m, p0, eta0);
      auto eta_field = [&](const Vec& u) -> Vec {
        Mat T = tangent_at(u);
        Vec p = sample.chart(u);
        Vec xi = xi0 - T * (T.transpose() * T).ldlt().solve(T.transpose() * xi0);
        Vec y = legendre_inverse(m, p, xi);
        return Vec(y / eval_F(m, p, y));
      };
      Vec eta = eta_field(u0);
      Mat g = fundamental_tensor(m, p0, eta);
      SprayData sp = spray_coefficients(m, p0, eta);

      // A eta over the tangent basis; trace via the Gram inverse
      Mat gram(sample.dim, sample.dim);
      Mat coords(sample.dim, sample.dim);
      Mat AX(n, sample.dim);
      for (int a = 0; a < sample.dim; ++a) {
        Vec up = u0, um = u0;
        up[a] += h;
        um[a] -= h;
        Vec d = (eta_field(up) - eta_field(um)) / (2.0 * h);
        for (int i = 0; i < n; ++i) {
          double acc = 0.0;
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) acc += sp.Gamma(i, j, k) * T0(j, a) * eta[k];
          d[i] += acc;
        }
        AX.col(a) = -(d - (eta.dot(g * d)) * eta);
      }
      for (int a = 0; a < sample.dim; ++a)
        for (int b = 0; b < sample.dim; ++b) {
          gram(a, b) = T0.col(a).dot(g * T0.col(b));
          coords(a, b) = T0.col(b).dot(g * AX.col(a));
        }
      const double trace = (gram.ldlt().solve(coords.transpose())).trace();
      rep.max_trace = std::max(rep.max_trace, std::abs(trace));
      rep.audited++;
    }
  }
  return rep;
}

std::vector<FocalSample> make_focal_samples(const Metric& m, const LevelSetSurface& surf,
                                            const std::vector<Vec>& base_points,
                                            bool plus_orientation, double c, int which,
                                            int extra_normals, Rng& rng) {
  std::vector<FocalSample> out;
  const int n = m.dim();
  auto n_field = level_set_normal_field(m, surf, plus_orientation);
  for (const Vec& x : base_points) {
    NormalPair np = unit_normal(m, surf, x);
    Vec n0 = plus_orientation ? np.n_plus : np.n_minus;
    ShapeOperator A = shape_operator(m, surf, x, n0);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A.matrix + A.matrix.transpose()));
    CurvatureSpectrum spec = cluster_eigenvalues(es.eigenvalues(), 1e-6);
    if (which < 0 || which >= spec.g()) throw RankEstimationFailure("no such curvature cluster");
    const double lam = spec.values[which];
    std::vector<double> ss = focal_distances(c, lam, 1e-9, 50.0);
    if (ss.empty()) throw RankEstimationFailure("selected curvature has no focal distance");
    const double s_i = ss.front();

    // non-collapsing eigen-directions span the focal tangent space image
    std::vector<int> keep;
    for (int q = 0; q < es.eigenvalues().size(); ++q)
      if (std::abs(es.eigenvalues()[q] - lam) > 1e-6) keep.push_back(q);

    FocalSample sample;
    sample.dim = static_cast<int>(keep.size());
    Metric model = m;
    LevelSetSurface surf_copy = surf;
    Mat dirs(n, std::max<int>(1, sample.dim));
    for (size_t q = 0; q < keep.size(); ++q) dirs.col(q) = A.basis * es.eigenvectors().col(keep[q]);
    auto nf = n_field;
    sample.chart = [model, surf_copy, x, dirs, nf, s_i](const Vec& u) -> Vec {
      Vec seed = x;
      for (int a = 0; a < u.size(); ++a) seed += u[a] * dirs.col(a);
      Vec q = project_to_level_set(model, surf_copy, seed);
      return normal_exp(model, q, nf(q), s_i);
    };

    // verify the estimated rank against the image of d(phi_s)
    const double h = 1e-4 * m.chart().scale();
    Mat J(n, n - 1);
    {
      Mat T = tangent_basis(m, surf, x, n0);
      for (int a = 0; a < n - 1; ++a) {
        Vec xp = project_to_level_set(m, surf, x + h * T.col(a));
        Vec xm = project_to_level_set(m, surf, x - h * T.col(a));
        J.col(a) = (normal_exp(m, xp, n_field(xp), s_i) - normal_exp(m, xm, n_field(xm), s_i)) /
                   (2.0 * h);
      }
    }
    Eigen::JacobiSVD<Mat> svd(J);
    int rank = 0;
    const double lead = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    for (int q = 0; q < svd.singularValues().size(); ++q)
      if (svd.singularValues()[q] > std::max(1e-6 * lead, 1e-9)) ++rank;
    if (rank != sample.dim)
      throw RankEstimationFailure("tube-image rank disagrees with the collapsing multiplicity");

    // mapped normal: the geodesic velocity at the focal point
    Vec p, v;
    normal_exp_state(m, x, n0, s_i, p, v);
    sample.normal_seeds.push_back(v / eval_F(m, p, v));
    // random completions in the annihilator of the focal tangent space
    if (sample.dim > 0) {
      Mat T0(n, sample.dim);
      const Vec u0 = Vec::Zero(sample.dim);
      Vec up = u0, um = u0;
      for (int a = 0; a < sample.dim; ++a) {
        up[a] += h;
        um[a] -= h;
        T0.col(a) = (sample.chart(up) - sample.chart(um)) / (2.0 * h);
        up[a] = 0.0;
        um[a] = 0.0;
      }
      for (int e = 0; e < extra_normals; ++e) {
        Vec xi = rng.normal_vec(n);
        xi -= T0 * (T0.transpose() * T0).ldlt().solve(T0.transpose() * xi);
        if (xi.norm() < 1e-6) continue;
        Vec y = legendre_inverse(m, p, xi);
        sample.normal_seeds.push_back(y / eval_F(m, p, y));
      }
    }
    out.push_back(std::move(sample));
  }
  return out;
}

}  // namespace finsler
