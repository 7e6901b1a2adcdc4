#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dualsvd/cdsvd.hpp"
#include "dualsvd/dual_matrix.hpp"

namespace dualsvd {

enum class DerivativeScheme {
  FirstDiff,          // infinitesimal(:,j) = (X(:,j+1) - X(:,j)) / h
  OneSidedSecondOrder // (-3 X(:,j) + 4 X(:,j+1) - X(:,j+2)) / (2h)
};

/// Builds a dual matrix from a time series: the standard part keeps the
/// columns the chosen stencil can serve, the infinitesimal part approximates
/// the time derivative. The one-sided stencil is exact on quadratics.
DualMatrix build_dual_from_series(const ComplexMatrix& series, DerivativeScheme scheme,
                                  double h);
DualMatrix build_dual_from_series(const RealMatrix& series, DerivativeScheme scheme,
                                  double h);

/// Spatiotemporal propagation pattern x(t) = 2 e^{gamma t} [cos(omega t) c - sin(omega t) d]:
/// a standing wave of rank 1 when c = d, a traveling wave of rank 2 otherwise.
struct WaveParams {
  double gamma = 0.0;
  double omega = 0.0;
  Eigen::VectorXd mode_c;
  Eigen::VectorXd mode_d;
};

/// Column j is x(times[j]).
RealMatrix synthesize_wave(const WaveParams& params, const Eigen::VectorXd& times);

/// Analytic time derivative of the same pattern; column j is x'(times[j]).
RealMatrix synthesize_wave_derivative(const WaveParams& params, const Eigen::VectorXd& times);

/// A straightened 2-D Gaussian bump on an H x W pixel grid, row-major
/// (index = row * W + col), unit peak amplitude.
Eigen::VectorXd gaussian_bump(int grid_rows, int grid_cols, double center_row,
                              double center_col, double sigma);

/// Gaussian wave on a pixel grid: one center gives a standing wave (c = d),
/// two centers a traveling wave between them. Throws std::invalid_argument
/// when a center lies outside the grid.
struct GridWaveSpec {
  int grid_rows = 0;
  int grid_cols = 0;
  std::vector<std::pair<double, double>> centers;  // one or two (row, col)
  double sigma = 1.0;
  double gamma = 0.0;
  double omega = 0.0;
};

RealMatrix synthesize_gaussian_grid_wave(const GridWaveSpec& spec,
                                         const Eigen::VectorXd& times);
RealMatrix synthesize_gaussian_grid_wave_derivative(const GridWaveSpec& spec,
                                                    const Eigen::VectorXd& times);

enum class WaveClass { Standing, Traveling, Unclassified };

struct TravelingPair {
  int x = 0;  // component indices, 0-based, x < y
  int y = 0;
  double alpha = 0.0;  // <U_s(:,y), U_i(:,x)>
  double beta = 0.0;   // <U_s(:,x), U_i(:,y)>
};

struct SimilarityThresholds {
  /// Pair admission threshold, relative to the largest normalized coupling
  /// |G(x,y)| / ||U_i(:,y)||. Near-degenerate singular value pairs amplify
  /// U_i without bound, so raw gram magnitudes are not comparable across
  /// components; the cosine scale is.
  double pair_fraction = 0.5;
  /// Standing threshold, relative to max|G| for the coupling mass and to
  /// max ||U_i(:,y)|| for the amplitude gate.
  double standing_fraction = 0.1;
  /// Absolute floor on max|G|: below it the coupling matrix carries no
  /// signal and every component is standing (U_i ~ 0 case).
  double coupling_floor = 1e-12;
};

/// Pair-similarity analysis over the leading K components:
/// G(x,y) = Re <U_s(:,x), U_i(:,y)>. Unmatched pairs (x,y), x < y, are
/// greedily matched by descending min(|G(y,x)|, |G(x,y)|) subject to
/// G(y,x) G(x,y) < 0 and the pair threshold; remaining components with
/// row+column coupling mass below the standing threshold are standing.
struct SimilarityReport {
  RealMatrix gram;                        // K x K
  std::vector<TravelingPair> pairs;
  std::vector<WaveClass> classification;  // per component
  std::vector<int> partner;               // pair partner or -1
  double gram_max = 0.0;
  bool complex_data = false;  // inner products took real parts (extension)
};

SimilarityReport similarity_analysis(const CdsvdResult& result, int leading,
                                     const SimilarityThresholds& thresholds = {});

/// Standard part of sigma_x U(:,x) V(:,x)^* + sigma_y U(:,y) V(:,y)^*:
/// the rank-2 spatiotemporal movie of a traveling wave.
ComplexMatrix extract_traveling_wave(const CdsvdResult& result, std::pair<int, int> pair);

/// True-rank recovery from the infinitesimal singular values.
struct RankRecoveryOptions {
  /// A value is significant when it exceeds this multiple of the tail median.
  /// White noise keeps first-difference ratios below ~2; signal sampled near
  /// the Nyquist rate reaches 2 sin^2(omega h / 2) ~ 2 times its standard
  /// ratio, so 5 separates the two regimes.
  double significance = 5.0;
  /// Tail-median floor, relative to max |sigma_i|.
  double tail_floor_fraction = 1e-3;
};

struct RankRecoveryReport {
  std::vector<double> standard_sv;
  std::vector<double> infinitesimal_sv;  // diagonal of Sigma_i
  int estimated_rank = 0;
  double gap_ratio = 0.0;
  bool low_confidence = false;
  bool projection_applied = false;   // input violated the existence condition
  double projection_residual = 0.0;  // what the projection removed
  std::optional<int> known_true_rank;
};

/// Runs the CDSVD (projecting the infinitesimal part onto the feasible set
/// first when the input violates the existence condition, as noisy data
/// generally does) and scans |sigma_i[j]| / median(|sigma_i[j+1:]|) over
/// j = 1 .. min(rank, ceil(min(m,n)/2)). The estimated rank is the largest
/// significant index; none significant reports rank 0 with low confidence.
RankRecoveryReport rank_recovery(const DualMatrix& a,
                                 std::optional<int> known_true_rank = {},
                                 const CdsvdOptions& cdsvd_opts = {},
                                 const RankRecoveryOptions& opts = {});

/// The scan described above on a bare value list; also used to show that the
/// same statistic on the standard singular values fails on noisy data.
int detect_rank_from_values(const std::vector<double>& values, Index window,
                            const RankRecoveryOptions& opts, double* gap_ratio_out,
                            bool* low_confidence_out);

}  // namespace dualsvd
