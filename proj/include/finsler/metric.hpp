#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "finsler/fields.hpp"
#include "finsler/linalg.hpp"

namespace finsler {

struct NavigationData;  // randers.hpp

// F^2(x, y), the squared metric function, evaluatable at every dual level.
class MetricKernel {
 public:
  virtual ~MetricKernel() = default;
  virtual int dim() const = 0;
#define FINSLER_DECL(S) virtual S f2(const S* x, const S* y) const = 0;
  FINSLER_FOR_EACH_LEVEL(FINSLER_DECL)
#undef FINSLER_DECL
};

template <class F>
class MetricKernelOf final : public MetricKernel {
 public:
  MetricKernelOf(int n, F f) : n_(n), f_(std::move(f)) {}
  int dim() const override { return n_; }
#define FINSLER_IMPL(S) \
  S f2(const S* x, const S* y) const override { return f_(x, y, n_); }
  FINSLER_FOR_EACH_LEVEL(FINSLER_IMPL)
#undef FINSLER_IMPL
 private:
  int n_;
  F f_;
};

template <class F>
std::shared_ptr<const MetricKernel> make_metric_kernel(int n, F f) {
  return std::make_shared<MetricKernelOf<F>>(n, std::move(f));
}

// Open chart domain: a ball or an axis-aligned box.
struct Chart {
  enum class Shape { ball, box };
  Shape shape = Shape::ball;
  Vec center;
  double radius = 1.0;
  Vec halfwidth;  // box only

  static Chart ball(int n, double r) {
    Chart c;
    c.shape = Shape::ball;
    c.center = Vec::Zero(n);
    c.radius = r;
    return c;
  }
  bool contains(const Vec& x) const {
    if (!x.allFinite()) return false;
    if (shape == Shape::ball) return (x - center).norm() < radius;
    return ((x - center).cwiseAbs().array() < halfwidth.array()).all();
  }
  double scale() const {
    return shape == Shape::ball ? radius : halfwidth.maxCoeff();
  }
};

enum class MetricKind { riemannian, minkowski_norm, randers_navigation, funk_ball, reverse };

std::string to_string(MetricKind k);

// A Finsler metric on a single coordinate chart: the root object of every
// computation. Immutable and cheap to copy (shared internals).
class Metric {
 public:
  Metric() = default;
  Metric(MetricKind kind, Chart chart, std::shared_ptr<const MetricKernel> kernel)
      : kind_(kind), chart_(std::move(chart)), kernel_(std::move(kernel)) {}

  int dim() const { return kernel_->dim(); }
  MetricKind kind() const { return kind_; }
  const Chart& chart() const { return chart_; }
  const MetricKernel& kernel() const { return *kernel_; }
  std::shared_ptr<const MetricKernel> kernel_ptr() const { return kernel_; }

  bool reversible() const { return reversible_; }
  bool both_complete() const { return both_complete_; }
  Metric& set_reversible(bool b) { reversible_ = b; return *this; }
  Metric& set_both_complete(bool b) { both_complete_ = b; return *this; }

  // Optional structure used for fast paths and Newton initial guesses.
  std::shared_ptr<const NavigationData> navigation() const { return nav_; }
  std::shared_ptr<const MatrixField> riemann_h() const { return riemann_h_; }
  Metric& set_navigation(std::shared_ptr<const NavigationData> nav) { nav_ = std::move(nav); return *this; }
  Metric& set_riemann_h(std::shared_ptr<const MatrixField> h) { riemann_h_ = std::move(h); return *this; }

 private:
  MetricKind kind_ = MetricKind::riemannian;
  Chart chart_;
  std::shared_ptr<const MetricKernel> kernel_;
  std::shared_ptr<const NavigationData> nav_;
  std::shared_ptr<const MatrixField> riemann_h_;
  bool reversible_ = false;
  bool both_complete_ = true;
};

// Geodesic coefficients and the connection data derived from them at one
// point-direction pair.
struct SprayData {
  Vec G;          // geodesic coefficients G^i
  Mat N;          // nonlinear connection N^i_j = dG^i/dy^j
  Tensor3 Gamma;  // Berwald coefficients Gamma^i_jk = d^2 G^i / dy^j dy^k
};

struct VolumeForm {
  enum class Kind { busemann_hausdorff, prescribed };
  Kind kind = Kind::busemann_hausdorff;
  int quadrature_order = 48;
  std::function<double(const Vec&)> density;        // sigma(x) > 0
  std::shared_ptr<const ScalarMap> log_density;     // optional analytic ln(sigma)
};

// (flag curvature constant, S-curvature constant) for a model, either declared
// from construction or measured with attached residual bounds.
struct SpaceFormProfile {
  double c = 0.0;
  double c_prime = 0.0;
  bool measured = false;
  double c_residual = 0.0;
  double cp_residual = 0.0;
};

// --- metric_core operations ------------------------------------------------

double eval_F(const Metric& m, const Vec& x, const Vec& y);
double eval_F2(const Metric& m, const Vec& x, const Vec& y);

Mat fundamental_tensor(const Metric& m, const Vec& x, const Vec& y);
// g without the positive-definiteness gate (used where degeneracy is handled
// by the caller, e.g. oracles).
Mat fundamental_tensor_unchecked(const Metric& m, const Vec& x, const Vec& y);

Tensor3 cartan_tensor(const Metric& m, const Vec& x, const Vec& y);
Tensor3 landsberg_tensor(const Metric& m, const Vec& x, const Vec& y);

Vec spray_G(const Metric& m, const Vec& x, const Vec& y);
SprayData spray_coefficients(const Metric& m, const Vec& x, const Vec& y);
// G and N only (transport right-hand sides don't need Gamma).
void spray_GN(const Metric& m, const Vec& x, const Vec& y, Vec& G, Mat& N);

// Spray curvature R^i_k assembled from first x-derivatives and mixed
// derivatives of G^i; flag curvature contracts it against the flag vector.
Mat spray_curvature(const Metric& m, const Vec& x, const Vec& y);
double flag_curvature(const Metric& m, const Vec& x, const Vec& y, const Vec& V);

// Covariant derivative of a vector field along v with reference vector w.
Vec reference_covariant_derivative(const Metric& m, const Vec& x,
                                   const std::function<Vec(const Vec&)>& field,
                                   const Vec& v, const Vec& w,
                                   double fd_step_scale = 1e-5);

double s_curvature(const Metric& m, const VolumeForm& vol, const Vec& x, const Vec& y);

// Busemann-Hausdorff density at x by spherical quadrature of the indicatrix
// volume. order = nodes per angle.
double bh_density(const Metric& m, const Vec& x, int quadrature_order = 48);
VolumeForm make_bh_volume(const Metric& m, int quadrature_order = 48);

// Shared guards.
void require_in_chart(const Metric& m, const Vec& x);
void require_admissible(const Metric& m, const Vec& x, const Vec& y);

// Euclidean-ball volume, used by the BH normalization.
double unit_ball_volume(int n);

}  // namespace finsler
