#include "dualsvd/waves.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dualsvd {

namespace {

ComplexMatrix series_standard(const ComplexMatrix& x, DerivativeScheme scheme) {
  Index t = x.cols();
  Index keep = scheme == DerivativeScheme::FirstDiff ? t - 1 : t - 2;
  return x.leftCols(keep);
}

}  // namespace

DualMatrix build_dual_from_series(const ComplexMatrix& series, DerivativeScheme scheme,
                                  double h) {
  if (h <= 0.0) throw std::invalid_argument("time step h must be positive");
  const Index t = series.cols();
  const Index need = scheme == DerivativeScheme::FirstDiff ? 2 : 3;
  if (t < need) {
    throw std::invalid_argument("time series too short for the derivative scheme (" +
                                std::to_string(t) + " < " + std::to_string(need) + " columns)");
  }
  ComplexMatrix standard = series_standard(series, scheme);
  ComplexMatrix infinitesimal(series.rows(), standard.cols());
  if (scheme == DerivativeScheme::FirstDiff) {
    infinitesimal = (series.rightCols(t - 1) - series.leftCols(t - 1)) / h;
  } else {
    for (Index j = 0; j + 2 < t; ++j) {
      infinitesimal.col(j) =
          (-3.0 * series.col(j) + 4.0 * series.col(j + 1) - series.col(j + 2)) / (2.0 * h);
    }
  }
  return DualMatrix(std::move(standard), std::move(infinitesimal));
}

DualMatrix build_dual_from_series(const RealMatrix& series, DerivativeScheme scheme,
                                  double h) {
  return build_dual_from_series(ComplexMatrix(series.cast<std::complex<double>>()), scheme, h);
}

RealMatrix synthesize_wave(const WaveParams& params, const Eigen::VectorXd& times) {
  if (params.mode_c.size() != params.mode_d.size()) {
    throw std::invalid_argument("wave modes c and d must have equal length");
  }
  if (params.mode_c.isZero(0.0) || params.mode_d.isZero(0.0)) {
    throw std::invalid_argument("wave modes must be nonzero");
  }
  RealMatrix x(params.mode_c.size(), times.size());
  for (Index j = 0; j < times.size(); ++j) {
    double t = times(j);
    double env = 2.0 * std::exp(params.gamma * t);
    x.col(j) = env * (std::cos(params.omega * t) * params.mode_c -
                      std::sin(params.omega * t) * params.mode_d);
  }
  return x;
}

RealMatrix synthesize_wave_derivative(const WaveParams& params, const Eigen::VectorXd& times) {
  RealMatrix x(params.mode_c.size(), times.size());
  const double g = params.gamma, w = params.omega;
  for (Index j = 0; j < times.size(); ++j) {
    double t = times(j);
    double env = 2.0 * std::exp(g * t);
    x.col(j) = env * ((g * std::cos(w * t) - w * std::sin(w * t)) * params.mode_c -
                      (g * std::sin(w * t) + w * std::cos(w * t)) * params.mode_d);
  }
  return x;
}

Eigen::VectorXd gaussian_bump(int grid_rows, int grid_cols, double center_row,
                              double center_col, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("gaussian bump sigma must be positive");
  Eigen::VectorXd v(static_cast<Index>(grid_rows) * grid_cols);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int r = 0; r < grid_rows; ++r) {
    for (int c = 0; c < grid_cols; ++c) {
      double dr = r - center_row;
      double dc = c - center_col;
      v(static_cast<Index>(r) * grid_cols + c) = std::exp(-(dr * dr + dc * dc) * inv);
    }
  }
  return v;
}

namespace {

WaveParams grid_params(const GridWaveSpec& spec) {
  if (spec.centers.empty() || spec.centers.size() > 2) {
    throw std::invalid_argument("grid wave needs one or two centers");
  }
  for (const auto& [r, c] : spec.centers) {
    if (r < 0 || r >= spec.grid_rows || c < 0 || c >= spec.grid_cols) {
      throw std::invalid_argument("grid wave center lies outside the grid");
    }
  }
  WaveParams p;
  p.gamma = spec.gamma;
  p.omega = spec.omega;
  p.mode_c = gaussian_bump(spec.grid_rows, spec.grid_cols, spec.centers[0].first,
                           spec.centers[0].second, spec.sigma);
  const auto& second = spec.centers.size() == 2 ? spec.centers[1] : spec.centers[0];
  p.mode_d = gaussian_bump(spec.grid_rows, spec.grid_cols, second.first, second.second,
                           spec.sigma);
  return p;
}

}  // namespace

RealMatrix synthesize_gaussian_grid_wave(const GridWaveSpec& spec,
                                         const Eigen::VectorXd& times) {
  return synthesize_wave(grid_params(spec), times);
}

RealMatrix synthesize_gaussian_grid_wave_derivative(const GridWaveSpec& spec,
                                                    const Eigen::VectorXd& times) {
  return synthesize_wave_derivative(grid_params(spec), times);
}

SimilarityReport similarity_analysis(const CdsvdResult& result, int leading,
                                     const SimilarityThresholds& thresholds) {
  const Index r = result.rank();
  if (leading < 1 || leading > r) {
    throw std::invalid_argument("similarity analysis: leading component count out of range");
  }
  const int k = leading;
  SimilarityReport rep;
  rep.complex_data = !result.U.is_real();

  ComplexMatrix us = result.U.standard().leftCols(k);
  ComplexMatrix ui = result.U.infinitesimal().leftCols(k);
  // G(x,y) = Re <U_s(:,x), U_i(:,y)>; for dual real data this is the plain
  // transpose product. The real part is our complex-data extension.
  rep.gram = (us.adjoint() * ui).real();
  rep.gram_max = rep.gram.cwiseAbs().maxCoeff();

  rep.classification.assign(k, WaveClass::Unclassified);
  rep.partner.assign(k, -1);

  if (rep.gram_max <= thresholds.coupling_floor) {
    // no measurable coupling anywhere: U_i carries no rotation signal
    rep.classification.assign(k, WaveClass::Standing);
    return rep;
  }

  // Couplings are thresholded on the cosine scale: a near-degenerate pair of
  // singular values amplifies U_i without bound, so raw gram magnitudes are
  // not comparable across components. G(x,y)/||U_i(:,y)|| always lies in
  // [-1, 1] and reaches +-1 exactly for the pair-similarity structure.
  Eigen::VectorXd ui_norm(k);
  for (int y = 0; y < k; ++y) ui_norm(y) = ui.col(y).norm();
  const double ui_max = ui_norm.maxCoeff();
  RealMatrix cosine = RealMatrix::Zero(k, k);
  for (int y = 0; y < k; ++y) {
    if (ui_norm(y) > 0.0) cosine.col(y) = rep.gram.col(y) / ui_norm(y);
  }
  const double cos_max = cosine.cwiseAbs().maxCoeff();

  const double tau_pair = thresholds.pair_fraction * cos_max;
  const double tau_amplitude = thresholds.standing_fraction * ui_max;
  const double tau_standing = thresholds.standing_fraction * rep.gram_max;

  std::vector<bool> matched(k, false);
  for (;;) {
    int best_x = -1, best_y = -1;
    double best_strength = -1.0;
    for (int x = 0; x < k; ++x) {
      if (matched[x]) continue;
      for (int y = x + 1; y < k; ++y) {
        if (matched[y]) continue;
        if (!(rep.gram(y, x) * rep.gram(x, y) < 0.0)) continue;
        // mutually aligned: each column of U_i points along the partner
        double strength = std::min(std::abs(cosine(y, x)), std::abs(cosine(x, y)));
        if (strength < tau_pair) continue;
        if (strength > best_strength) {
          best_strength = strength;
          best_x = x;
          best_y = y;
        }
      }
    }
    if (best_x < 0) break;
    matched[best_x] = matched[best_y] = true;
    rep.partner[best_x] = best_y;
    rep.partner[best_y] = best_x;
    rep.classification[best_x] = rep.classification[best_y] = WaveClass::Traveling;
    rep.pairs.push_back(TravelingPair{best_x, best_y, rep.gram(best_y, best_x),
                                      rep.gram(best_x, best_y)});
  }

  for (int x = 0; x < k; ++x) {
    if (matched[x]) continue;
    double mass = std::max(rep.gram.row(x).cwiseAbs().maxCoeff(),
                           rep.gram.col(x).cwiseAbs().maxCoeff());
    if (mass < tau_standing || ui_norm(x) < tau_amplitude) {
      rep.classification[x] = WaveClass::Standing;
    }
  }
  return rep;
}

ComplexMatrix extract_traveling_wave(const CdsvdResult& result, std::pair<int, int> pair) {
  const Index r = result.rank();
  auto [x, y] = pair;
  if (x < 0 || y < 0 || x >= r || y >= r || x == y) {
    throw std::invalid_argument("extract_traveling_wave: invalid component pair");
  }
  const ComplexMatrix& us = result.U.standard();
  const ComplexMatrix& vs = result.V.standard();
  const ComplexMatrix& sig = result.Sigma.standard();
  return sig(x, x) * us.col(x) * vs.col(x).adjoint() +
         sig(y, y) * us.col(y) * vs.col(y).adjoint();
}

int detect_rank_from_values(const std::vector<double>& values, Index window,
                            const RankRecoveryOptions& opts, double* gap_ratio_out,
                            bool* low_confidence_out) {
  const Index n = static_cast<Index>(values.size());
  std::vector<double> mags(values.size());
  std::transform(values.begin(), values.end(), mags.begin(),
                 [](double v) { return std::abs(v); });
  double vmax = mags.empty() ? 0.0 : *std::max_element(mags.begin(), mags.end());
  int estimated = 0;
  double best_ratio = 0.0;
  if (vmax > 0.0) {
    const double floor = opts.tail_floor_fraction * vmax;
    const Index scan = std::min(window, n);
    for (Index j = 0; j < scan; ++j) {
      std::vector<double> tail(mags.begin() + j + 1, mags.end());
      double med = floor;
      if (!tail.empty()) {
        auto mid = tail.begin() + tail.size() / 2;
        std::nth_element(tail.begin(), mid, tail.end());
        double m = *mid;
        if (tail.size() % 2 == 0) {
          double lower = *std::max_element(tail.begin(), mid);
          m = (m + lower) / 2.0;
        }
        med = std::max(m, floor);
      }
      double ratio = mags[j] / med;
      best_ratio = std::max(best_ratio, ratio);
      if (ratio >= opts.significance) estimated = static_cast<int>(j) + 1;
    }
  }
  if (gap_ratio_out) *gap_ratio_out = best_ratio;
  if (low_confidence_out) *low_confidence_out = (estimated == 0);
  return estimated;
}

RankRecoveryReport rank_recovery(const DualMatrix& a, std::optional<int> known_true_rank,
                                 const CdsvdOptions& cdsvd_opts,
                                 const RankRecoveryOptions& opts) {
  RankRecoveryReport rep;
  rep.known_true_rank = known_true_rank;

  CdsvdResult res;
  try {
    res = compute_cdsvd(a, cdsvd_opts);
  } catch (const InfeasibleError& e) {
    rep.projection_applied = true;
    rep.projection_residual = e.residual();
    res = compute_cdsvd(project_to_feasible(a), cdsvd_opts);
  }

  const Index r = res.rank();
  rep.standard_sv.reserve(static_cast<std::size_t>(r));
  rep.infinitesimal_sv.reserve(static_cast<std::size_t>(r));
  for (const DualScalar& sv : res.singular_values()) {
    rep.standard_sv.push_back(sv.standard);
    rep.infinitesimal_sv.push_back(sv.infinitesimal);
  }

  const Index window = std::min<Index>(r, (std::min(a.rows(), a.cols()) + 1) / 2);
  rep.estimated_rank = detect_rank_from_values(rep.infinitesimal_sv, window, opts,
                                               &rep.gap_ratio, &rep.low_confidence);
  return rep;
}

}  // namespace dualsvd
