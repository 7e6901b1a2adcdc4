#pragma once

#include <vector>

#include "dualsvd/dual_matrix.hpp"
#include "dualsvd/dual_scalar.hpp"
#include "dualsvd/errors.hpp"

namespace dualsvd {

/// Distinct singular values of the standard part together with their
/// multiplicities: sigma_1 > sigma_2 > ... > sigma_p > 0, sum of
/// multiplicities equals the rank.
struct SingularBlockStructure {
  std::vector<double> distinct_values;   // strictly decreasing, positive
  std::vector<Index> multiplicities;     // r_t >= 1 per block

  Index block_count() const { return static_cast<Index>(distinct_values.size()); }
  Index rank() const;
};

/// Outcome of the existence test
///   (I - U_s U_s^*) A_i (I - V_s V_s^*) = 0,
/// evaluated as a residual against a scale-aware threshold.
struct ExistenceCertificate {
  bool exists = false;
  double residual = 0.0;
  double threshold = 0.0;
};

struct CdsvdOptions {
  /// Relative gap below which consecutive singular values are grouped into
  /// one multiplicity block. The exact theory assumes exact equality; close
  /// values must be grouped or the 1/(sigma_i^2 - sigma_j^2) factors blow up.
  double group_tol = 1e-8;
  /// Existence threshold: existence_rel_tol * ||A_i||_F, but never below
  /// existence_abs_tol (which alone applies when A_i = 0).
  double existence_rel_tol = 1e-10;
  double existence_abs_tol = 1e-12;
};

/// A compact dual SVD A = U Sigma V^* with dual-unitary-column U, V and
/// diagonal positive dual Sigma. The r dual singular values are sorted
/// nonincreasing under the total order.
struct CdsvdResult {
  DualMatrix U;      // m x r, unitary columns in dual arithmetic
  DualMatrix Sigma;  // r x r, both parts real diagonal
  DualMatrix V;      // n x r, unitary columns in dual arithmetic
  SingularBlockStructure blocks;

  double existence_residual = 0.0;
  double existence_threshold = 0.0;
  /// Off-diagonal mass of (R + R^*)/2 after the gauge rotation. Zero in
  /// exact arithmetic for true multiplicities; reported as a diagnostic when
  /// grouped blocks were only approximately equal.
  double sigma_offdiag_mass = 0.0;

  Index rank() const { return Sigma.rows(); }
  std::vector<DualScalar> singular_values() const;
};

/// Rank cut for the compact SVD of the standard part:
/// max(m, n) * machine epsilon * sigma_max.
double rank_cutoff(Index rows, Index cols, double sigma_max);

/// Evaluates the existence condition of the compact dual SVD. Never throws:
/// a zero standard part degenerates the projectors to the identity, making
/// the residual ||A_i||_F.
ExistenceCertificate cdsvd_exists(const DualMatrix& a, const CdsvdOptions& opts = {});

/// Replaces A_i by A_i - (I - U_s U_s^*) A_i (I - V_s V_s^*), the nearest
/// infinitesimal part admitting a CDSVD. Idempotent; standard part unchanged.
DualMatrix project_to_feasible(const DualMatrix& a);

/// Clusters a nonincreasing singular value list into multiplicity blocks.
/// Values <= rank_cut are dropped; consecutive values with relative gap
/// (sigma_j - sigma_{j+1})/sigma_1 <= group_tol share a block; each block
/// reports its mean as the distinct value.
SingularBlockStructure group_singular_values(const std::vector<double>& sigma,
                                             double group_tol, double rank_cut);

/// Computes the compact dual SVD:
///   1. compact SVD of A_s with multiplicity grouping;
///   2. R = U_s^* A_i V_s;
///   3. eigendecomposition of each Hermitian diagonal block (R_tt+R_tt^*)/2,
///      eigenvalues sorted nonincreasing, eigenvector phases fixed;
///   4. gauge update U_s <- U_s X, V_s <- V_s X, R <- X^* R X;
///   5/6. skew-Hermitian P and Q from the blockwise closed forms;
///   7. U_i = U_s P + (I - U_s U_s^*) A_i V_s Sigma_s^{-1},
///      V_i = V_s Q + (I - V_s V_s^*) A_i^* U_s Sigma_s^{-1},
///      Sigma_i = Diag(R + R^*)/2.
///
/// The free skew-Hermitian block-diagonal matrix is taken to be zero; see
/// normalize_gauge for the opt-in anchoring of that freedom.
///
/// Inputs with more columns than rows are factored through the conjugate
/// transpose. A zero matrix yields the empty factorization (rank 0).
///
/// Throws InfeasibleError when the existence condition fails and
/// std::domain_error when two grouped blocks leave a degenerate gap
/// sigma_i^2 - sigma_j^2 (unreachable at the default grouping tolerance).
CdsvdResult compute_cdsvd(const DualMatrix& a, const CdsvdOptions& opts = {});

/// Fixes the remaining diagonal pure-imaginary gauge freedom when all
/// singular values are simple: each column of V_s is rotated by a unit phase
/// so its largest-magnitude entry is real positive, and the anchor entry of
/// V_i in that row is made real. Reconstruction and unitarity are preserved.
/// Throws std::domain_error when any multiplicity block has size > 1.
CdsvdResult normalize_gauge(const CdsvdResult& result);

}  // namespace dualsvd
