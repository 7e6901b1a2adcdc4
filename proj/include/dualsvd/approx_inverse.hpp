#pragma once

#include <cstdint>
#include <vector>

#include "dualsvd/cdsvd.hpp"
#include "dualsvd/dual_matrix.hpp"

namespace dualsvd {

/// Optimal rank-k approximation under the quasi-metric d_*.
struct RankKApproximation {
  DualMatrix approx;
  Index k = 0;
  double standard_error = 0.0;       // ||A_s - A_s^(k)||_F
  double infinitesimal_error = 0.0;  // ||A_i - A_i^(k)||_F
};

/// Minimizes d_*(A, .) over rank-k dual matrices:
///   A_s^(k) from the leading k terms of the thin SVD of A_s,
///   A_i^(k) = A_i - (I - U_k U_k^*) A_i (I - V_k V_k^*).
/// Requires 1 <= k <= rank(A_s) (numerical rank); throws
/// std::invalid_argument otherwise. Exists even when A itself has no CDSVD.
RankKApproximation rank_k_approx(const DualMatrix& a, Index k);

/// d_* distances of the CDSVD truncation and of the optimal rank-k
/// approximation from A. The truncation is generally not optimal: it uses
/// every term of the SVD of A_s to build the infinitesimal factors, the
/// optimal approximation only the first k.
struct TruncationComparison {
  DualScalar truncated_distance;
  DualScalar optimal_distance;
  bool optimal_no_worse = false;  // optimal <= truncated under the total order
};

TruncationComparison truncated_cdsvd_vs_optimal(const DualMatrix& a, Index k,
                                                const CdsvdOptions& opts = {});

/// Dual Moore-Penrose generalized inverse.
struct DmpgiResult {
  DualMatrix pinv;
  double existence_residual = 0.0;
};

/// Closed form
///   A^+ = V_s S^{-1} U_s^*
///       + [ (I - V_s V_s^*) A_i^* U_s S^{-2} U_s^*
///         + V_s S^{-2} V_s^* A_i^* (I - U_s U_s^*)
///         - V_s S^{-1} U_s^* A_i V_s S^{-1} U_s^* ] eps.
/// Exists iff the CDSVD exists; throws InfeasibleError carrying the
/// existence residual otherwise.
DmpgiResult dmpgi(const DualMatrix& a, const CdsvdOptions& opts = {});

/// Under the metric induced by the dual Frobenius norm, the squared rank-k
/// distance is independent of the infinitesimal factors. This demo evaluates
/// d_F^2(A, U_k Sigma_k V_k^*) over random feasible infinitesimal factors
/// sharing the optimal standard part and reports the epsilon-part spread.
struct DegeneracyReport {
  double standard_part = 0.0;        // ||E_s^(k)||_F^2, common to all trials
  std::vector<double> eps_parts;     // 2<E_s^(k), E_i^(k)> per trial
  double spread = 0.0;               // max - min of eps_parts
};

DegeneracyReport frobenius_rank_k_degeneracy_demo(const DualMatrix& a, Index k,
                                                  int trials, std::uint64_t seed);

}  // namespace dualsvd
