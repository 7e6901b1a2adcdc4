#pragma once

#include <Eigen/Dense>

#include "dualsvd/dual_scalar.hpp"

namespace dualsvd {

using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// A dense dual complex matrix A = A_s + A_i*eps: two equal-shape complex
/// matrices, immutable after construction, all entries finite.
class DualMatrix {
 public:
  DualMatrix() = default;
  DualMatrix(ComplexMatrix standard, ComplexMatrix infinitesimal);
  explicit DualMatrix(ComplexMatrix standard);  // zero infinitesimal part

  static DualMatrix Zero(Index rows, Index cols);
  static DualMatrix Identity(Index n);
  static DualMatrix FromReal(const RealMatrix& standard, const RealMatrix& infinitesimal);

  const ComplexMatrix& standard() const { return standard_; }
  const ComplexMatrix& infinitesimal() const { return infinitesimal_; }
  Index rows() const { return standard_.rows(); }
  Index cols() const { return standard_.cols(); }

  /// True when neither part carries an imaginary component.
  bool is_real() const;

  friend DualMatrix operator+(const DualMatrix& a, const DualMatrix& b);
  friend DualMatrix operator-(const DualMatrix& a, const DualMatrix& b);
  /// Dual matrix product: (A_s B_s) + (A_s B_i + A_i B_s) eps.
  friend DualMatrix operator*(const DualMatrix& a, const DualMatrix& b);

 private:
  ComplexMatrix standard_;
  ComplexMatrix infinitesimal_;
};

/// A_s^* + A_i^* eps; satisfies (AB)^* = B^* A^*.
DualMatrix conj_transpose(const DualMatrix& a);

/// Inverse of a square dual matrix with nonsingular standard part:
/// C_s^{-1} - C_s^{-1} C_i C_s^{-1} eps. Throws std::domain_error when the
/// standard part fails the condition estimate.
DualMatrix dual_inverse(const DualMatrix& c);

/// Unitary-column test: ||B_s^* B_s - I||_F <= tol and
/// ||B_s^* B_i + B_i^* B_s||_F <= tol.
bool has_unitary_columns(const DualMatrix& b, double tol);

/// Dual Frobenius norm: ||A_s||_F + (<A_s,A_i>/||A_s||_F) eps when A_s is
/// nonzero, else ||A_i||_F eps. The inner product is Re(trace(A_s^* A_i)).
/// Branch selection uses a scale-aware threshold (see kBranchTol).
DualScalar dual_frobenius_norm(const DualMatrix& a);

/// Quasi-metric d_*: ||A_s-B_s||_F + (||A_i-B_i||_F^2 / (2||A_s-B_s||_F)) eps
/// when the standard parts differ, else ||A_i-B_i||_F eps. Satisfies
/// positivity and symmetry but only a weakened triangle inequality.
DualScalar quasi_metric(const DualMatrix& a, const DualMatrix& b);

/// The block lower triangular Toeplitz representative form
/// [[A_s, 0], [A_i, A_s]], under which dual matrix addition and
/// multiplication become ordinary matrix operations.
ComplexMatrix representative_form(const DualMatrix& a);

/// Relative factor in the "standard parts differ" branch test of the norm
/// and the quasi-metric.
inline constexpr double kBranchTol = 1e-12;

}  // namespace dualsvd
