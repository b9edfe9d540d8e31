#include "finsler/geodesic.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/focal.hpp"

namespace finsler {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;

using Rhs = std::function<void(const Vec&, Vec&)>;

struct DenseNodes {
  std::vector<double> s;
  std::vector<Vec> z, dz;
  IntegratorStats stats;
};

// Generic adaptive DOPRI5 with per-node storage; `inside` guards the position
// part of the state against chart exit.
DenseNodes integrate_ode(const Rhs& rhs, const Vec& z0, double s_end,
                         const std::function<bool(const Vec&)>& inside,
                         const IntegratorOptions& opt) {
  DenseNodes out;
  const int dim = static_cast<int>(z0.size());
  Vec z = z0;
  Vec k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), zt(dim), z5(dim), err(dim);
  double s = 0.0;
  rhs(z, k1);
  out.stats.rhs_evals++;
  out.s.push_back(0.0);
  out.z.push_back(z);
  out.dz.push_back(k1);

  double h = opt.fixed_step > 0.0 ? opt.fixed_step : std::min(opt.initial_step, s_end);
  if (s_end <= 0.0) return out;

  int steps = 0;
  while (s < s_end) {
    if (++steps > opt.max_steps) throw StepFailure("integrator exceeded max step count");
    h = std::min(h, s_end - s);
    try {
      zt = z + h * (A21 * k1);
      rhs(zt, k2);
      zt = z + h * (A31 * k1 + A32 * k2);
      rhs(zt, k3);
      zt = z + h * (A41 * k1 + A42 * k2 + A43 * k3);
      rhs(zt, k4);
      zt = z + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4);
      rhs(zt, k5);
      zt = z + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5);
      rhs(zt, k6);
      z5 = z + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
      rhs(z5, k7);
    } catch (const OutsideChart&) {
      // a stage left the chart: treat as a rejected step and shrink
      out.stats.rejected++;
      h *= 0.5;
      if (h < opt.min_step) throw PathExitsChart(s);
      continue;
    }
    out.stats.rhs_evals += 6;

    double err_norm = 0.0;
    if (opt.fixed_step <= 0.0) {
      err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
      for (int i = 0; i < dim; ++i) {
        double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(z[i]), std::abs(z5[i]));
        err_norm += sq(err[i] / sc);
      }
      err_norm = std::sqrt(err_norm / dim);
    }

    if (err_norm <= 1.0) {
      if (!inside(z5)) {
        // shrink toward the boundary; report the exit parameter
        double lo = 0.0, hi = h;
        for (int b = 0; b < 60 && hi - lo > 1e-13 * std::max(1.0, s); ++b) {
          double mid = 0.5 * (lo + hi);
          Vec zm = z + mid * k1;  // Euler probe is enough to localize the exit
          if (inside(zm))
            lo = mid;
          else
            hi = mid;
        }
        throw PathExitsChart(s + lo);
      }
      s += h;
      z = z5;
      k1 = k7;  // FSAL
      out.s.push_back(s);
      out.z.push_back(z);
      out.dz.push_back(k1);
      out.stats.accepted++;
      if (opt.fixed_step <= 0.0) {
        double fac = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
      }
    } else {
      out.stats.rejected++;
      h *= std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 1.0);
      if (h < opt.min_step) throw StepFailure("step size underflow");
    }
  }
  return out;
}

int find_interval(const std::vector<double>& s, double q) {
  if (q <= s.front()) return 0;
  if (q >= s.back()) return static_cast<int>(s.size()) - 2;
  auto it = std::upper_bound(s.begin(), s.end(), q);
  return static_cast<int>(it - s.begin()) - 1;
}

Vec hermite(const std::vector<double>& s, const std::vector<Vec>& z, const std::vector<Vec>& dz,
            double q) {
  if (s.size() == 1) return z.front();
  int k = find_interval(s, q);
  const double h = s[k + 1] - s[k];
  const double t = (q - s[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * z[k] + (t3 - 2 * t2 + t) * h * dz[k] +
         (-2 * t3 + 3 * t2) * z[k + 1] + (t3 - t2) * h * dz[k + 1];
}

}  // namespace

int GeodesicPath::interval(double s) const { return find_interval(s_, s); }

Vec GeodesicPath::position(double s) const {
  int k = interval(s);
  const double h = s_[k + 1] - s_[k];
  const double t = (s - s_[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * pos_[k] + (t3 - 2 * t2 + t) * h * vel_[k] +
         (-2 * t3 + 3 * t2) * pos_[k + 1] + (t3 - t2) * h * vel_[k + 1];
}

Vec GeodesicPath::velocity(double s) const {
  int k = interval(s);
  const double h = s_[k + 1] - s_[k];
  const double t = (s - s_[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * vel_[k] + (t3 - 2 * t2 + t) * h * acc_[k] +
         (-2 * t3 + 3 * t2) * vel_[k + 1] + (t3 - t2) * h * acc_[k + 1];
}

GeodesicPath integrate_geodesic(const Metric& m, const Vec& x0, const Vec& y0, double s_max,
                                const IntegratorOptions& opt) {
  require_admissible(m, x0, y0);
  const int n = m.dim();
  const double F0 = eval_F(m, x0, y0);
  Vec z0(2 * n);
  z0.head(n) = x0;
  z0.tail(n) = y0 / F0;  // unit speed

  Metric model = m;
  auto rhs = [model, n](const Vec& z, Vec& dz) {
    Vec x = z.head(n);
    Vec y = z.tail(n);
    Vec G = spray_G(model, x, y);
    dz.resize(2 * n);
    dz.head(n) = y;
    dz.tail(n) = -2.0 * G;
  };
  auto inside = [model, n](const Vec& z) { return model.chart().contains(z.head(n)); };

  DenseNodes nodes = integrate_ode(rhs, z0, s_max, inside, opt);
  GeodesicPath path;
  path.stats_ = nodes.stats;
  path.s_ = nodes.s;
  path.pos_.reserve(nodes.z.size());
  for (size_t i = 0; i < nodes.z.size(); ++i) {
    path.pos_.push_back(nodes.z[i].head(n));
    path.vel_.push_back(nodes.z[i].tail(n));
    path.acc_.push_back(nodes.dz[i].tail(n));
  }
  return path;
}

Vec exp_map(const Metric& m, const Vec& x, const Vec& v, const IntegratorOptions& opt) {
  require_in_chart(m, x);
  if (v.cwiseAbs().maxCoeff() <= 1e-300) return x;
  const double F = eval_F(m, x, v);
  GeodesicPath p = integrate_geodesic(m, x, v, F, opt);
  return p.position(F);
}

void normal_exp_state(const Metric& m, const Vec& x, const Vec& n, double s, Vec& pos, Vec& vel,
                      const IntegratorOptions& opt) {
  const double F = eval_F(m, x, n);
  if (std::abs(F - 1.0) > 1e-8) throw NotANormal("normal vector is not F-unit");
  if (s == 0.0) {
    pos = x;
    vel = n;
    return;
  }
  if (s > 0.0) {
    GeodesicPath p = integrate_geodesic(m, x, n, s, opt);
    pos = p.position(s);
    vel = p.velocity(s);
    return;
  }
  if (!m.both_complete()) throw BackwardUnsupported("model is forward-complete only");
  // reversed parameterization: du = -ds
  const int dim = m.dim();
  Metric model = m;
  auto rhs = [model, dim](const Vec& z, Vec& dz) {
    Vec xx = z.head(dim);
    Vec yy = z.tail(dim);
    Vec G = spray_G(model, xx, yy);
    dz.resize(2 * dim);
    dz.head(dim) = -yy;
    dz.tail(dim) = 2.0 * G;
  };
  auto inside = [model, dim](const Vec& z) { return model.chart().contains(z.head(dim)); };
  Vec z0(2 * dim);
  z0.head(dim) = x;
  z0.tail(dim) = n;
  DenseNodes nodes = integrate_ode(rhs, z0, -s, inside, opt);
  pos = nodes.z.back().head(dim);
  vel = nodes.z.back().tail(dim);
}

Vec normal_exp(const Metric& m, const Vec& x, const Vec& n, double s, const IntegratorOptions& opt) {
  Vec pos, vel;
  normal_exp_state(m, x, n, s, pos, vel, opt);
  return pos;
}

TransportedFrame::TransportedFrame(const Metric& m, const Vec& x0, const Vec& y0, double s_max,
                                   std::vector<Vec> frame, const IntegratorOptions& opt) {
  const int n = m.dim();
  k_ = static_cast<int>(frame.size());
  const double F0 = eval_F(m, x0, y0);
  Vec z0((2 + k_) * n);
  z0.head(n) = x0;
  z0.segment(n, n) = y0 / F0;
  for (int q = 0; q < k_; ++q) z0.segment((2 + q) * n, n) = frame[q];

  Metric model = m;
  int k = k_;
  auto rhs = [model, n, k](const Vec& z, Vec& dz) {
    Vec x = z.head(n);
    Vec y = z.segment(n, n);
    dz.resize((2 + k) * n);
    dz.head(n) = y;
    // N^i_j at (x, y): n dual sprays; Gamma(y)(y, X) = N(y) X
    Mat N(n, n);
    {
      SprayData s = spray_coefficients(model, x, y);
      dz.segment(n, n) = -2.0 * s.G;
      N = s.N;
    }
    for (int q = 0; q < k; ++q) {
      Vec X = z.segment((2 + q) * n, n);
      dz.segment((2 + q) * n, n) = -(N * X);
    }
  };
  auto inside = [model, n](const Vec& z) { return model.chart().contains(z.head(n)); };
  DenseNodes nodes = integrate_ode(rhs, z0, s_max, inside, opt);

  base_.s_ = nodes.s;
  base_.stats_ = nodes.stats;
  vecs_.assign(k_, {});
  dvecs_.assign(k_, {});
  for (size_t i = 0; i < nodes.z.size(); ++i) {
    base_.pos_.push_back(nodes.z[i].head(n));
    base_.vel_.push_back(nodes.z[i].segment(n, n));
    base_.acc_.push_back(nodes.dz[i].segment(n, n));
    for (int q = 0; q < k_; ++q) {
      vecs_[q].push_back(nodes.z[i].segment((2 + q) * n, n));
      dvecs_[q].push_back(nodes.dz[i].segment((2 + q) * n, n));
    }
  }
}

Vec TransportedFrame::vector(int which, double s) const {
  return hermite(base_.s_, vecs_[which], dvecs_[which], s);
}

JacobiSolution jacobi_closed_form(const Metric& m, double c, const Vec& x0, const Vec& y0,
                                  double s_max, const Vec& J0, const Vec& J0p,
                                  const std::vector<double>& s_grid) {
  Mat g = fundamental_tensor(m, x0, y0);
  Vec T0 = y0 / eval_F(m, x0, y0);
  const double tol = 1e-8 * std::max({1.0, J0.norm(), J0p.norm()});
  if (std::abs(T0.dot(g * J0)) > tol || std::abs(T0.dot(g * J0p)) > tol)
    throw NotOrthogonal("Jacobi initial data must be g_T-orthogonal to the velocity");
  auto frame = std::make_shared<TransportedFrame>(m, x0, y0, s_max, std::vector<Vec>{J0, J0p});
  JacobiSolution sol;
  sol.mode = JacobiSolution::Mode::closed_form_space_form;
  sol.c = c;
  sol.s_grid = s_grid;
  sol.eval = [frame, c](double s) -> Vec {
    SCValues v = sc_eval(c, s);
    return v.scp * frame->vector(0, s) + v.sc * frame->vector(1, s);
  };
  for (double s : s_grid) sol.J.push_back(sol.eval(s));
  return sol;
}

JacobiSolution jacobi_numeric(const Metric& m, const std::function<Vec(double)>& curve,
                              const std::function<Vec(double)>& normal_of_t, double s_max,
                              const std::vector<double>& s_grid, double t_step) {
  const double h = t_step;
  auto path_p = std::make_shared<GeodesicPath>(
      integrate_geodesic(m, curve(h), normal_of_t(h), s_max));
  auto path_m = std::make_shared<GeodesicPath>(
      integrate_geodesic(m, curve(-h), normal_of_t(-h), s_max));
  JacobiSolution sol;
  sol.mode = JacobiSolution::Mode::numeric_variation;
  sol.s_grid = s_grid;
  sol.eval = [path_p, path_m, h](double s) -> Vec {
    return (path_p->position(s) - path_m->position(s)) / (2.0 * h);
  };
  for (double s : s_grid) sol.J.push_back(sol.eval(s));
  return sol;
}

}  // namespace finsler
