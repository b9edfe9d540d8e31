#include "finsler/fields.hpp"

namespace finsler {

Mat jacobian(const VectorField& f, const Vec& x) {
  const int n = f.dim();
  D1 xx[kMaxDim], out[kMaxDim];
  lift(x.data(), xx, n);
  Mat J(n, n);
  for (int j = 0; j < n; ++j) {
    xx[j].d = 1.0;
    f.eval(xx, out);
    for (int i = 0; i < n; ++i) J(i, j) = out[i].d;
    xx[j].d = 0.0;
  }
  return J;
}

void matrix_field_partials(const MatrixField& h, const Vec& x, Mat& value, std::vector<Mat>& dh) {
  const int n = h.dim();
  D1 xx[kMaxDim], out[kMaxDim * kMaxDim];
  lift(x.data(), xx, n);
  value = Mat(n, n);
  dh.assign(n, Mat(n, n));
  for (int k = 0; k < n; ++k) {
    xx[k].d = 1.0;
    h.eval(xx, out);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (k == 0) value(i, j) = out[i * n + j].v;
        dh[k](i, j) = out[i * n + j].d;
      }
    xx[k].d = 0.0;
  }
}

Vec scalar_map_gradient(const ScalarMap& f, const Vec& x) {
  const int n = f.dim();
  D1 xx[kMaxDim];
  lift(x.data(), xx, n);
  Vec g(n);
  for (int j = 0; j < n; ++j) {
    xx[j].d = 1.0;
    g[j] = f.eval(xx).d;
    xx[j].d = 0.0;
  }
  return g;
}

}  // namespace finsler
