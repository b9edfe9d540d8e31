#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "finsler/dual.hpp"
#include "finsler/linalg.hpp"

// Type-erased smooth maps evaluatable at every dual-nesting level. A concrete
// field is written once as a functor templated on the scalar type; the
// adapters below instantiate it for D0..D5 behind a virtual interface so that
// runtime-polymorphic objects (metrics, navigation data) stay differentiable
// to the order the tensor calculus needs.

namespace finsler {

#define FINSLER_FOR_EACH_LEVEL(M) M(D0) M(D1) M(D2) M(D3) M(D4) M(D5)

// R^n -> R
class ScalarMap {
 public:
  virtual ~ScalarMap() = default;
  virtual int dim() const = 0;
#define FINSLER_DECL(S) virtual S eval(const S* x) const = 0;
  FINSLER_FOR_EACH_LEVEL(FINSLER_DECL)
#undef FINSLER_DECL
};

template <class F>
class ScalarMapOf final : public ScalarMap {
 public:
  ScalarMapOf(int n, F f) : n_(n), f_(std::move(f)) {}
  int dim() const override { return n_; }
#define FINSLER_IMPL(S) \
  S eval(const S* x) const override { return f_(x, n_); }
  FINSLER_FOR_EACH_LEVEL(FINSLER_IMPL)
#undef FINSLER_IMPL
 private:
  int n_;
  F f_;
};

template <class F>
std::shared_ptr<const ScalarMap> make_scalar_map(int n, F f) {
  return std::make_shared<ScalarMapOf<F>>(n, std::move(f));
}

// R^n -> R^n
class VectorField {
 public:
  virtual ~VectorField() = default;
  virtual int dim() const = 0;
#define FINSLER_DECL(S) virtual void eval(const S* x, S* out) const = 0;
  FINSLER_FOR_EACH_LEVEL(FINSLER_DECL)
#undef FINSLER_DECL
};

template <class F>
class VectorFieldOf final : public VectorField {
 public:
  VectorFieldOf(int n, F f) : n_(n), f_(std::move(f)) {}
  int dim() const override { return n_; }
#define FINSLER_IMPL(S) \
  void eval(const S* x, S* out) const override { f_(x, out, n_); }
  FINSLER_FOR_EACH_LEVEL(FINSLER_IMPL)
#undef FINSLER_IMPL
 private:
  int n_;
  F f_;
};

template <class F>
std::shared_ptr<const VectorField> make_vector_field(int n, F f) {
  return std::make_shared<VectorFieldOf<F>>(n, std::move(f));
}

// R^n -> R^{n x n} (row major), used for Riemannian metric coefficients.
class MatrixField {
 public:
  virtual ~MatrixField() = default;
  virtual int dim() const = 0;
#define FINSLER_DECL(S) virtual void eval(const S* x, S* out) const = 0;
  FINSLER_FOR_EACH_LEVEL(FINSLER_DECL)
#undef FINSLER_DECL
};

template <class F>
class MatrixFieldOf final : public MatrixField {
 public:
  MatrixFieldOf(int n, F f) : n_(n), f_(std::move(f)) {}
  int dim() const override { return n_; }
#define FINSLER_IMPL(S) \
  void eval(const S* x, S* out) const override { f_(x, out, n_); }
  FINSLER_FOR_EACH_LEVEL(FINSLER_IMPL)
#undef FINSLER_IMPL
 private:
  int n_;
  F f_;
};

template <class F>
std::shared_ptr<const MatrixField> make_matrix_field(int n, F f) {
  return std::make_shared<MatrixFieldOf<F>>(n, std::move(f));
}

// Promote a double vector to scalar type S (constant, zero derivative parts).
template <class S>
inline void lift(const double* x, S* out, int n) {
  for (int i = 0; i < n; ++i) out[i] = S(x[i]);
}

// First derivatives of erased fields, exact through the dual level.
Mat jacobian(const VectorField& f, const Vec& x);                  // J(i,j) = dF^i/dx^j
void matrix_field_partials(const MatrixField& h, const Vec& x,
                           Mat& value, std::vector<Mat>& dh);      // dh[k](i,j) = dh_ij/dx^k
Vec scalar_map_gradient(const ScalarMap& f, const Vec& x);

// A scalar function of position as the higher modules consume it: plain
// evaluation plus a differential that is either closed-form or central
// finite differences with step fd_step * scale.
struct ScalarField {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;  // may be empty -> finite differences
  double fd_step = 1e-6;

  double operator()(const Vec& x) const { return value(x); }
  Vec differential(const Vec& x, double scale = 1.0) const {
    if (grad) return grad(x);
    const double h = fd_step * scale;
    Vec d(x.size());
    Vec xp = x, xm = x;
    for (int i = 0; i < x.size(); ++i) {
      xp[i] = x[i] + h;
      xm[i] = x[i] - h;
      d[i] = (value(xp) - value(xm)) / (2.0 * h);
      xp[i] = x[i];
      xm[i] = x[i];
    }
    return d;
  }
};

}  // namespace finsler
