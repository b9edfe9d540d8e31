#pragma once

#include <functional>
#include <vector>

#include "finsler/metric.hpp"

namespace finsler {

struct IntegratorOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  int max_steps = 2000000;
  // > 0 switches to fixed-step mode with this step (order tests).
  double fixed_step = 0.0;
};

struct IntegratorStats {
  int accepted = 0;
  int rejected = 0;
  long rhs_evals = 0;
};

// Solution of gamma'' + 2 G(gamma, gamma') = 0 with dense cubic-Hermite
// output on the accepted steps. Immutable after construction.
class GeodesicPath {
 public:
  double s_max() const { return s_.back(); }
  int dim() const { return static_cast<int>(pos_.front().size()); }
  Vec position(double s) const;
  Vec velocity(double s) const;
  const std::vector<double>& nodes() const { return s_; }
  const IntegratorStats& stats() const { return stats_; }

 private:
  friend GeodesicPath integrate_geodesic(const Metric&, const Vec&, const Vec&, double,
                                         const IntegratorOptions&);
  friend class TransportedFrame;
  std::vector<double> s_;
  std::vector<Vec> pos_, vel_, acc_;
  IntegratorStats stats_;
  int interval(double s) const;
};

// Unit-speed geodesic from (x0, y0/F(y0)) over [0, s_max]. Throws
// PathExitsChart (with the exit parameter) or StepFailure.
GeodesicPath integrate_geodesic(const Metric& m, const Vec& x0, const Vec& y0, double s_max,
                                const IntegratorOptions& opt = {});

// exp_x(v): endpoint of the geodesic with initial velocity v at parameter 1.
Vec exp_map(const Metric& m, const Vec& x, const Vec& v, const IntegratorOptions& opt = {});

// E(x, s n) for a unit normal n. s < 0 requires a both-complete model and
// integrates the reversed parameterization.
Vec normal_exp(const Metric& m, const Vec& x, const Vec& n, double s,
               const IntegratorOptions& opt = {});
// Endpoint position and velocity together (velocity of the forward geodesic).
void normal_exp_state(const Metric& m, const Vec& x, const Vec& n, double s, Vec& pos, Vec& vel,
                      const IntegratorOptions& opt = {});

// Berwald parallel transport of a frame along a geodesic:
// dX^i/ds + N^i_k(gamma, gamma') X^k = 0.
class TransportedFrame {
 public:
  TransportedFrame(const Metric& m, const Vec& x0, const Vec& y0, double s_max,
                   std::vector<Vec> frame, const IntegratorOptions& opt = {});
  Vec position(double s) const { return base_.position(s); }
  Vec velocity(double s) const { return base_.velocity(s); }
  Vec vector(int which, double s) const;
  int frame_size() const { return k_; }

 private:
  GeodesicPath base_;
  int k_ = 0;
  std::vector<std::vector<Vec>> vecs_;  // [which][node]
  std::vector<std::vector<Vec>> dvecs_;
};

struct JacobiSolution {
  enum class Mode { closed_form_space_form, numeric_variation };
  Mode mode = Mode::numeric_variation;
  double c = 0.0;
  std::vector<double> s_grid;
  std::vector<Vec> J;       // J(s) on the grid
  std::function<Vec(double)> eval;  // dense evaluation
};

// Closed form J(s) = E1(s) sc'(s) + E2(s) sc(s) with E1, E2 parallel. The
// model must be a declared/measured space form with constant c; J0, J0p must
// be g_T-orthogonal to the velocity.
JacobiSolution jacobi_closed_form(const Metric& m, double c, const Vec& x0, const Vec& y0,
                                  double s_max, const Vec& J0, const Vec& J0p,
                                  const std::vector<double>& s_grid);

// Central-difference variation J(s) = d/dt E(x(t), s n(x(t))) |_{t=0}.
JacobiSolution jacobi_numeric(const Metric& m, const std::function<Vec(double)>& curve,
                              const std::function<Vec(double)>& normal_of_t, double s_max,
                              const std::vector<double>& s_grid, double t_step = 1e-4);

}  // namespace finsler
