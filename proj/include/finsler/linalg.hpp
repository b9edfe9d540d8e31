#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "finsler/dual.hpp"
#include "finsler/errors.hpp"

namespace finsler {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Charts never exceed this dimension; stack buffers in the dual-number code
// are sized accordingly.
constexpr int kMaxDim = 6;

// Symmetric 3-tensor storage (dense, n^3 entries).
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), data_(static_cast<size_t>(n) * n * n, 0.0) {}
  int dim() const { return n_; }
  double& operator()(int i, int j, int k) { return data_[(static_cast<size_t>(i) * n_ + j) * n_ + k]; }
  double operator()(int i, int j, int k) const { return data_[(static_cast<size_t>(i) * n_ + j) * n_ + k]; }
  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  int n_ = 0;
  std::vector<double> data_;
};

// In-place solve of A z = b by Gaussian elimination with partial pivoting on
// the leading (order-zero) values. Works for any nested dual scalar, which is
// what lets g^{ij} enter differentiated expressions exactly.
template <class S>
void solve_linear(S* A, S* b, int n) {
  for (int c = 0; c < n; ++c) {
    int piv = c;
    double best = std::abs(leading(A[c * n + c]));
    for (int r = c + 1; r < n; ++r) {
      double cand = std::abs(leading(A[r * n + c]));
      if (cand > best) {
        best = cand;
        piv = r;
      }
    }
    if (!(best > 1e-300)) throw SingularTensor("singular matrix in dual-valued solve");
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(A[c * n + k], A[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (int r = c + 1; r < n; ++r) {
      S f = A[r * n + c] / A[c * n + c];
      for (int k = c; k < n; ++k) A[r * n + k] -= f * A[c * n + k];
      b[r] -= f * b[c];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    S acc = b[r];
    for (int k = r + 1; k < n; ++k) acc -= A[r * n + k] * b[k];
    b[r] = acc / A[r * n + r];
  }
}

template <class S>
void invert_matrix(const S* A, S* Ainv, int n) {
  S work[kMaxDim * kMaxDim];
  S cols[kMaxDim * kMaxDim];
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n * n; ++k) work[k] = A[k];
    S rhs[kMaxDim];
    for (int i = 0; i < n; ++i) rhs[i] = S(i == j ? 1.0 : 0.0);
    solve_linear(work, rhs, n);
    for (int i = 0; i < n; ++i) cols[i * n + j] = rhs[i];
  }
  for (int k = 0; k < n * n; ++k) Ainv[k] = cols[k];
}

// Positive-definiteness via LDL^T pivots (tolerance relative to the diagonal
// scale). Throws NotPositiveDefinite otherwise.
void require_positive_definite(const Mat& g, double pivot_tol = 1e-12);

// Eigenvalues of a self-adjoint operator given in a basis with Gram matrix
// `gram` (generalized symmetric problem solved by Cholesky whitening).
// `op(a,b) = <A t_a, t_b>` need only be symmetric up to roundoff.
struct GeneralizedEig {
  Vec values;   // ascending
  Mat vectors;  // columns: coordinates in the t-basis
};
GeneralizedEig whitened_eig(const Mat& op, const Mat& gram);

// Deterministic uniform doubles in [0,1) from a 64-bit generator state, so
// reports are byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(unsigned long long seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Marsaglia polar normal, deterministic.
  double normal() {
    for (;;) {
      double u = 2.0 * uniform() - 1.0;
      double v = 2.0 * uniform() - 1.0;
      double r = u * u + v * v;
      if (r > 0.0 && r < 1.0) return u * std::sqrt(-2.0 * std::log(r) / r);
    }
  }
  Vec normal_vec(int n) {
    Vec z(n);
    for (int i = 0; i < n; ++i) z[i] = normal();
    return z;
  }

 private:
  unsigned long long next() {  // splitmix64
    unsigned long long z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  unsigned long long s_;
};

}  // namespace finsler
