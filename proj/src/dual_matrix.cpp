#include "dualsvd/dual_matrix.hpp"

#include <stdexcept>

namespace dualsvd {

namespace {

void require_same_shape(const ComplexMatrix& s, const ComplexMatrix& i) {
  if (s.rows() != i.rows() || s.cols() != i.cols()) {
    throw std::invalid_argument("dual matrix parts must share one shape");
  }
}

void require_finite(const ComplexMatrix& m, const char* part) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string("dual matrix ") + part + " part has non-finite entries");
  }
}

}  // namespace

DualMatrix::DualMatrix(ComplexMatrix standard, ComplexMatrix infinitesimal)
    : standard_(std::move(standard)), infinitesimal_(std::move(infinitesimal)) {
  require_same_shape(standard_, infinitesimal_);
  require_finite(standard_, "standard");
  require_finite(infinitesimal_, "infinitesimal");
}

DualMatrix::DualMatrix(ComplexMatrix standard)
    : DualMatrix(std::move(standard),
                 ComplexMatrix::Zero(standard.rows(), standard.cols())) {}

DualMatrix DualMatrix::FromReal(const RealMatrix& standard, const RealMatrix& infinitesimal) {
  return DualMatrix(standard.cast<std::complex<double>>(),
                    infinitesimal.cast<std::complex<double>>());
}

DualMatrix DualMatrix::Zero(Index rows, Index cols) {
  return DualMatrix(ComplexMatrix::Zero(rows, cols), ComplexMatrix::Zero(rows, cols));
}

DualMatrix DualMatrix::Identity(Index n) {
  return DualMatrix(ComplexMatrix::Identity(n, n), ComplexMatrix::Zero(n, n));
}

bool DualMatrix::is_real() const {
  return standard_.imag().isZero(0.0) && infinitesimal_.imag().isZero(0.0);
}

DualMatrix operator+(const DualMatrix& a, const DualMatrix& b) {
  require_same_shape(a.standard_, b.standard_);
  return DualMatrix(a.standard_ + b.standard_, a.infinitesimal_ + b.infinitesimal_);
}

DualMatrix operator-(const DualMatrix& a, const DualMatrix& b) {
  require_same_shape(a.standard_, b.standard_);
  return DualMatrix(a.standard_ - b.standard_, a.infinitesimal_ - b.infinitesimal_);
}

DualMatrix operator*(const DualMatrix& a, const DualMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("dual matrix product: inner dimensions disagree");
  }
  return DualMatrix(a.standard_ * b.standard_,
                    a.standard_ * b.infinitesimal_ + a.infinitesimal_ * b.standard_);
}

DualMatrix conj_transpose(const DualMatrix& a) {
  return DualMatrix(ComplexMatrix(a.standard().adjoint()), ComplexMatrix(a.infinitesimal().adjoint()));
}

DualMatrix dual_inverse(const DualMatrix& c) {
  if (c.rows() != c.cols()) {
    throw std::invalid_argument("dual_inverse requires a square matrix");
  }
  Eigen::FullPivLU<ComplexMatrix> lu(c.standard());
  if (!lu.isInvertible()) {
    throw std::domain_error("dual_inverse: standard part is numerically singular");
  }
  ComplexMatrix inv_s = lu.inverse();
  return DualMatrix(inv_s, -inv_s * c.infinitesimal() * inv_s);
}

bool has_unitary_columns(const DualMatrix& b, double tol) {
  if (b.rows() < b.cols()) return false;
  Index p = b.cols();
  double gram = (b.standard().adjoint() * b.standard() - ComplexMatrix::Identity(p, p)).norm();
  double sym = (b.standard().adjoint() * b.infinitesimal() +
                b.infinitesimal().adjoint() * b.standard())
                   .norm();
  return gram <= tol && sym <= tol;
}

DualScalar dual_frobenius_norm(const DualMatrix& a) {
  double ns = a.standard().norm();
  double branch = kBranchTol * std::max(1.0, ns);
  if (ns > branch) {
    double inner = (a.standard().conjugate().cwiseProduct(a.infinitesimal())).sum().real();
    return DualScalar(ns, inner / ns);
  }
  return DualScalar(0.0, a.infinitesimal().norm());
}

DualScalar quasi_metric(const DualMatrix& a, const DualMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("quasi_metric requires equal shapes");
  }
  double ds = (a.standard() - b.standard()).norm();
  double di = (a.infinitesimal() - b.infinitesimal()).norm();
  double branch = kBranchTol * std::max({1.0, a.standard().norm(), b.standard().norm()});
  if (ds > branch) {
    return DualScalar(ds, di * di / (2.0 * ds));
  }
  return DualScalar(0.0, di);
}

ComplexMatrix representative_form(const DualMatrix& a) {
  Index m = a.rows(), n = a.cols();
  ComplexMatrix rep = ComplexMatrix::Zero(2 * m, 2 * n);
  rep.topLeftCorner(m, n) = a.standard();
  rep.bottomLeftCorner(m, n) = a.infinitesimal();
  rep.bottomRightCorner(m, n) = a.standard();
  return rep;
}

}  // namespace dualsvd
