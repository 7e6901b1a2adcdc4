#pragma once

#include <Eigen/Dense>

namespace dualsvd::detail {

template <typename Mat>
struct SvdFactors {
  Mat u, v;
  Eigen::VectorXd sigma;
};

/// Thin SVD with a verified backend: Eigen's divide-and-conquer kernel can
/// deflate wrongly on clustered singular values and hand back factors that
/// do not reproduce the input. Every decomposition is therefore checked by
/// reconstruction and recomputed with the (slow, reliable) one-sided Jacobi
/// algorithm when the residual is out of line with backward stability.
template <typename Mat>
SvdFactors<Mat> checked_thin_svd(const Mat& a) {
  SvdFactors<Mat> out;
  const Eigen::Index m = a.rows(), n = a.cols();
  if (m == 0 || n == 0) {
    out.u = Mat::Zero(m, 0);
    out.v = Mat::Zero(n, 0);
    out.sigma.resize(0);
    return out;
  }
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  out.sigma = svd.singularValues();

  const double anorm = a.norm();
  double residual = (a - out.u * out.sigma.asDiagonal() * out.v.adjoint()).norm();
  if (residual > 1e-10 * anorm) {
    Eigen::JacobiSVD<Mat> jacobi(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = jacobi.matrixU();
    out.v = jacobi.matrixV();
    out.sigma = jacobi.singularValues();
  }
  return out;
}

}  // namespace dualsvd::detail
