#include "finsler/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace finsler {

void require_positive_definite(const Mat& g, double pivot_tol) {
  Eigen::LDLT<Mat> ldlt(g);
  const double scale = std::max(1.0, g.diagonal().cwiseAbs().maxCoeff());
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= pivot_tol * scale)
    throw NotPositiveDefinite("fundamental tensor not positive definite");
}

GeneralizedEig whitened_eig(const Mat& op, const Mat& gram) {
  Eigen::LLT<Mat> llt(gram);
  if (llt.info() != Eigen::Success)
    throw EigenFailure("tangent Gram matrix not positive definite");
  Mat L = llt.matrixL();
  Mat B = L.triangularView<Eigen::Lower>().solve(op.transpose());
  B = L.triangularView<Eigen::Lower>().solve(B.transpose());
  B = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(B);
  if (es.info() != Eigen::Success) throw EigenFailure("symmetric eigensolve failed");
  GeneralizedEig out;
  out.values = es.eigenvalues();
  out.vectors = L.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors());
  return out;
}

}  // namespace finsler
