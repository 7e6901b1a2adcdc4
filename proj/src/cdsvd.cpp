#include "dualsvd/cdsvd.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "svd_backend.hpp"

namespace dualsvd {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Makes the largest-magnitude entry of every column real positive. The
/// theory leaves eigenvector phases free; fixing them keeps results
/// deterministic across backends.
template <typename Mat>
void fix_column_phases(Mat& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index idx = 0;
    m.col(j).cwiseAbs().maxCoeff(&idx);
    auto e = m(idx, j);
    double mag = std::abs(e);
    if (mag > 0.0) m.col(j) *= Eigen::numext::conj(e) / mag;
  }
}

template <typename Mat>
struct ThinSvd {
  Mat U, V;
  Eigen::VectorXd sigma;  // all computed values, nonincreasing
  double rank_cut = 0.0;
  Index rank = 0;  // values above the cut
};

template <typename Mat>
ThinSvd<Mat> thin_svd(const Mat& a) {
  ThinSvd<Mat> out;
  auto factors = detail::checked_thin_svd(a);
  out.U = std::move(factors.u);
  out.V = std::move(factors.v);
  out.sigma = std::move(factors.sigma);
  double smax = out.sigma.size() > 0 ? out.sigma(0) : 0.0;
  out.rank_cut = rank_cutoff(a.rows(), a.cols(), smax);
  out.rank = 0;
  while (out.rank < out.sigma.size() && out.sigma(out.rank) > out.rank_cut) ++out.rank;
  return out;
}

/// (I - U_s U_s^*) A_i (I - V_s V_s^*) without forming the projectors.
template <typename Mat>
Mat doubly_projected(const Mat& ai, const Mat& us, const Mat& vs) {
  if (us.cols() == 0) return ai;
  Mat us_ai = us.adjoint() * ai;   // r x n
  Mat ai_vs = ai * vs;             // m x r
  Mat core = us.adjoint() * ai_vs; // r x r
  return ai - us * us_ai - ai_vs * vs.adjoint() + us * (core * vs.adjoint());
}

double existence_threshold(double ai_norm, const CdsvdOptions& opts) {
  return std::max(opts.existence_rel_tol * ai_norm, opts.existence_abs_tol);
}

struct PipelineOut {
  ComplexMatrix us, ui, vs, vi;
  Eigen::VectorXd sigma_s, sigma_i;
  SingularBlockStructure blocks;
  double residual = 0.0;
  double threshold = 0.0;
  double offdiag_mass = 0.0;
};

/// Algorithm steps 1-7 for rows >= cols. Instantiated for real and complex
/// matrices so real inputs stay exactly real.
template <typename Mat>
PipelineOut pipeline(const Mat& as, const Mat& ai, const CdsvdOptions& opts) {
  PipelineOut out;

  auto svd = thin_svd(as);
  std::vector<double> svec(svd.sigma.data(), svd.sigma.data() + svd.sigma.size());
  out.blocks = group_singular_values(svec, opts.group_tol, svd.rank_cut);
  const Index r = out.blocks.rank();

  Mat us = svd.U.leftCols(r);
  Mat vs = svd.V.leftCols(r);
  Eigen::VectorXd sig = svd.sigma.head(r);

  out.threshold = existence_threshold(ai.norm(), opts);
  out.residual = doubly_projected(ai, us, vs).norm();
  if (out.residual > out.threshold) {
    throw InfeasibleError("compact dual SVD does not exist: projected residual " +
                              std::to_string(out.residual) + " exceeds threshold " +
                              std::to_string(out.threshold),
                          out.residual, out.threshold);
  }

  if (r == 0) {
    out.us = out.ui = ComplexMatrix::Zero(as.rows(), 0);
    out.vs = out.vi = ComplexMatrix::Zero(as.cols(), 0);
    out.sigma_s.resize(0);
    out.sigma_i.resize(0);
    return out;
  }

  Mat us_ai = us.adjoint() * ai;  // r x n, also gives A_i^* U_s later
  Mat ai_vs = ai * vs;            // m x r
  Mat R = us.adjoint() * ai_vs;   // r x r

  const auto& mult = out.blocks.multiplicities;
  const auto& dist = out.blocks.distinct_values;
  const Index p = out.blocks.block_count();

  bool any_multi = std::any_of(mult.begin(), mult.end(), [](Index rt) { return rt > 1; });
  if (any_multi) {
    Mat x = Mat::Identity(r, r);
    Index off = 0;
    for (Index t = 0; t < p; ++t) {
      Index rt = mult[t];
      if (rt > 1) {
        Mat h = (R.block(off, off, rt, rt) + R.block(off, off, rt, rt).adjoint()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        if (es.info() != Eigen::Success) {
          throw std::runtime_error("eigendecomposition of a diagonal block failed");
        }
        Mat xt = es.eigenvectors().rowwise().reverse();  // nonincreasing eigenvalues
        fix_column_phases(xt);
        x.block(off, off, rt, rt) = xt;
      }
      off += rt;
    }
    us = Mat(us * x);
    vs = Mat(vs * x);
    us_ai = Mat(x.adjoint() * us_ai);
    ai_vs = Mat(ai_vs * x);
    R = Mat(x.adjoint() * R * x);
  }

  Mat P = Mat::Zero(r, r);
  Mat Q = Mat::Zero(r, r);
  const double s1 = dist[0];
  const double gap_floor = 1e3 * kEps * s1 * s1;
  Index oi = 0;
  for (Index i = 0; i < p; ++i) {
    const Index ri = mult[i];
    auto rii = R.block(oi, oi, ri, ri);
    P.block(oi, oi, ri, ri) = (rii - rii.adjoint()) / (2.0 * dist[i]);
    Index oj = oi + ri;
    for (Index j = i + 1; j < p; ++j) {
      const Index rj = mult[j];
      const double denom = dist[j] * dist[j] - dist[i] * dist[i];  // < 0
      if (std::abs(denom) < gap_floor) {
        throw std::domain_error("degenerate gap between grouped singular value blocks");
      }
      auto rij = R.block(oi, oj, ri, rj);
      auto rji = R.block(oj, oi, rj, ri);
      P.block(oi, oj, ri, rj) = (dist[j] * rij + dist[i] * rji.adjoint()) / denom;
      P.block(oj, oi, rj, ri) = (dist[i] * rji + dist[j] * rij.adjoint()) / (-denom);
      Q.block(oi, oj, ri, rj) = (dist[i] * rij + dist[j] * rji.adjoint()) / denom;
      Q.block(oj, oi, rj, ri) = (dist[j] * rji + dist[i] * rij.adjoint()) / (-denom);
      oj += rj;
    }
    oi += ri;
  }

  Eigen::VectorXd siginv = sig.cwiseInverse();
  Mat ui = us * P + (ai_vs - us * R) * siginv.asDiagonal();
  Mat ai_adj_us = us_ai.adjoint();  // A_i^* U_s, n x r
  Mat vi = vs * Q + (ai_adj_us - vs * R.adjoint()) * siginv.asDiagonal();

  Mat sym = (R + R.adjoint()) / 2.0;
  Eigen::VectorXd sigma_i = sym.diagonal().real();
  // Sigma_R = R - P Sigma_s - Sigma_s Q^* is diagonal in exact arithmetic;
  // its off-diagonal mass measures how far approximate grouping strayed.
  Mat sigma_r = R - P * sig.asDiagonal() - sig.asDiagonal() * Q.adjoint();
  sigma_r.diagonal().setZero();
  out.offdiag_mass = sigma_r.norm();

  out.us = us.template cast<std::complex<double>>();
  out.ui = ui.template cast<std::complex<double>>();
  out.vs = vs.template cast<std::complex<double>>();
  out.vi = vi.template cast<std::complex<double>>();
  out.sigma_s = sig;
  out.sigma_i = sigma_i;
  return out;
}

PipelineOut run_pipeline(const DualMatrix& a, const CdsvdOptions& opts) {
  if (a.is_real()) {
    RealMatrix as = a.standard().real();
    RealMatrix ai = a.infinitesimal().real();
    return pipeline<RealMatrix>(as, ai, opts);
  }
  return pipeline<ComplexMatrix>(a.standard(), a.infinitesimal(), opts);
}

/// Residual of the existence condition plus the projected remainder, with
/// the real fast path.
struct ExistenceEval {
  double residual = 0.0;
  ComplexMatrix remainder;  // (I - P_U) A_i (I - P_V)
};

ExistenceEval evaluate_existence(const DualMatrix& a) {
  ExistenceEval out;
  if (a.is_real()) {
    RealMatrix as = a.standard().real();
    RealMatrix ai = a.infinitesimal().real();
    auto svd = thin_svd(as);
    RealMatrix us = svd.U.leftCols(svd.rank);
    RealMatrix vs = svd.V.leftCols(svd.rank);
    RealMatrix w = doubly_projected(ai, us, vs);
    out.residual = w.norm();
    out.remainder = w.cast<std::complex<double>>();
  } else {
    auto svd = thin_svd(a.standard());
    ComplexMatrix us = svd.U.leftCols(svd.rank);
    ComplexMatrix vs = svd.V.leftCols(svd.rank);
    out.remainder = doubly_projected(a.infinitesimal(), us, vs);
    out.residual = out.remainder.norm();
  }
  return out;
}

}  // namespace

Index SingularBlockStructure::rank() const {
  return std::accumulate(multiplicities.begin(), multiplicities.end(), Index{0});
}

double rank_cutoff(Index rows, Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * kEps * sigma_max;
}

SingularBlockStructure group_singular_values(const std::vector<double>& sigma,
                                             double group_tol, double rank_cut) {
  for (std::size_t j = 1; j < sigma.size(); ++j) {
    if (sigma[j] > sigma[j - 1]) {
      throw std::invalid_argument("group_singular_values expects nonincreasing input");
    }
  }
  SingularBlockStructure out;
  if (sigma.empty()) return out;
  const double s1 = sigma[0];
  if (s1 <= rank_cut) return out;

  double block_sum = sigma[0];
  Index block_len = 1;
  auto flush = [&](double sum, Index len) {
    out.distinct_values.push_back(sum / static_cast<double>(len));
    out.multiplicities.push_back(len);
  };
  for (std::size_t j = 1; j < sigma.size(); ++j) {
    if (sigma[j] <= rank_cut) break;
    if ((sigma[j - 1] - sigma[j]) / s1 <= group_tol) {
      block_sum += sigma[j];
      ++block_len;
    } else {
      flush(block_sum, block_len);
      block_sum = sigma[j];
      block_len = 1;
    }
  }
  flush(block_sum, block_len);
  return out;
}

ExistenceCertificate cdsvd_exists(const DualMatrix& a, const CdsvdOptions& opts) {
  ExistenceCertificate cert;
  cert.threshold = existence_threshold(a.infinitesimal().norm(), opts);
  cert.residual = evaluate_existence(a).residual;
  cert.exists = cert.residual <= cert.threshold;
  return cert;
}

DualMatrix project_to_feasible(const DualMatrix& a) {
  ExistenceEval eval = evaluate_existence(a);
  return DualMatrix(a.standard(), a.infinitesimal() - eval.remainder);
}

std::vector<DualScalar> CdsvdResult::singular_values() const {
  std::vector<DualScalar> out;
  out.reserve(static_cast<std::size_t>(rank()));
  for (Index j = 0; j < rank(); ++j) {
    out.emplace_back(Sigma.standard()(j, j).real(), Sigma.infinitesimal()(j, j).real());
  }
  return out;
}

CdsvdResult compute_cdsvd(const DualMatrix& a, const CdsvdOptions& opts) {
  if (a.rows() < a.cols()) {
    // A = U Sigma V^* iff A^* = V Sigma U^*; Sigma is real diagonal in both
    // parts, so the factors just swap.
    CdsvdResult res = compute_cdsvd(conj_transpose(a), opts);
    std::swap(res.U, res.V);
    return res;
  }
  PipelineOut pipe = run_pipeline(a, opts);
  CdsvdResult res;
  const Index r = pipe.sigma_s.size();
  res.U = DualMatrix(std::move(pipe.us), std::move(pipe.ui));
  res.V = DualMatrix(std::move(pipe.vs), std::move(pipe.vi));
  ComplexMatrix sig_s = ComplexMatrix::Zero(r, r);
  ComplexMatrix sig_i = ComplexMatrix::Zero(r, r);
  sig_s.diagonal() = pipe.sigma_s.cast<std::complex<double>>();
  sig_i.diagonal() = pipe.sigma_i.cast<std::complex<double>>();
  res.Sigma = DualMatrix(std::move(sig_s), std::move(sig_i));
  res.blocks = std::move(pipe.blocks);
  res.existence_residual = pipe.residual;
  res.existence_threshold = pipe.threshold;
  res.sigma_offdiag_mass = pipe.offdiag_mass;
  return res;
}

CdsvdResult normalize_gauge(const CdsvdResult& result) {
  for (Index rt : result.blocks.multiplicities) {
    if (rt > 1) {
      throw std::domain_error(
          "normalize_gauge requires simple singular values (all multiplicities 1)");
    }
  }
  ComplexMatrix us = result.U.standard();
  ComplexMatrix ui = result.U.infinitesimal();
  ComplexMatrix vs = result.V.standard();
  ComplexMatrix vi = result.V.infinitesimal();
  const Index r = vs.cols();
  for (Index t = 0; t < r; ++t) {
    Index anchor = 0;
    vs.col(t).cwiseAbs().maxCoeff(&anchor);
    std::complex<double> e = vs(anchor, t);
    double mag = std::abs(e);
    // a unit column always has an entry of magnitude >= 1/sqrt(n)
    std::complex<double> phase = std::conj(e) / mag;
    us.col(t) *= phase;
    ui.col(t) *= phase;
    vs.col(t) *= phase;
    vi.col(t) *= phase;
    double omega = -vi(anchor, t).imag() / mag;
    std::complex<double> iw(0.0, omega);
    ui.col(t) += us.col(t) * iw;
    vi.col(t) += vs.col(t) * iw;
  }
  CdsvdResult out = result;
  out.U = DualMatrix(std::move(us), std::move(ui));
  out.V = DualMatrix(std::move(vs), std::move(vi));
  return out;
}

}  // namespace dualsvd
