#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dualsvd/approx_inverse.hpp"
#include "dualsvd/cdsvd.hpp"
#include "dualsvd/container_io.hpp"
#include "dualsvd/errors.hpp"
#include "dualsvd/rng.hpp"
#include "dualsvd/waves.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace dualsvd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitIo = 3;

struct ToleranceFlags {
  double group_tol = CdsvdOptions{}.group_tol;
  double existence_rel = CdsvdOptions{}.existence_rel_tol;
  double existence_abs = CdsvdOptions{}.existence_abs_tol;
  double pair_fraction = SimilarityThresholds{}.pair_fraction;
  double standing_fraction = SimilarityThresholds{}.standing_fraction;
  double significance = RankRecoveryOptions{}.significance;
  std::uint64_t seed = 0;

  CdsvdOptions cdsvd() const { return {group_tol, existence_rel, existence_abs}; }
  SimilarityThresholds similarity() const {
    SimilarityThresholds t;
    t.pair_fraction = pair_fraction;
    t.standing_fraction = standing_fraction;
    return t;
  }
  RankRecoveryOptions recovery() const {
    RankRecoveryOptions o;
    o.significance = significance;
    return o;
  }
};

void add_tolerance_flags(CLI::App* cmd, ToleranceFlags& tol) {
  cmd->add_option("--tol-group", tol.group_tol, "relative gap for multiplicity grouping")
      ->capture_default_str();
  cmd->add_option("--existence-rel", tol.existence_rel,
                  "existence threshold relative to ||A_i||_F")
      ->capture_default_str();
  cmd->add_option("--existence-abs", tol.existence_abs, "absolute existence threshold floor")
      ->capture_default_str();
}

json config_json(const std::string& command, const ToleranceFlags& tol, const json& args) {
  json cfg;
  cfg["command"] = command;
  cfg["seed"] = tol.seed;
  cfg["tolerances"] = {{"group_tol", tol.group_tol},
                       {"existence_rel_tol", tol.existence_rel},
                       {"existence_abs_tol", tol.existence_abs},
                       {"pair_fraction", tol.pair_fraction},
                       {"standing_fraction", tol.standing_fraction},
                       {"significance", tol.significance}};
  cfg["args"] = args;
  return cfg;
}

void write_report(const json& report, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write report " + path.string());
  out << report.dump(2) << '\n';
}

std::vector<double> real_diagonal(const ComplexMatrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Index j = 0; j < m.rows(); ++j) out.push_back(m(j, j).real());
  return out;
}

bool is_csv(const fs::path& p) { return p.extension() == ".csv"; }

DualMatrix load_series(const fs::path& input, const std::string& scheme, double dt) {
  if (is_csv(input)) {
    ComplexMatrix series = read_matrix_csv(input);
    DerivativeScheme ds = scheme == "one-sided-2nd" ? DerivativeScheme::OneSidedSecondOrder
                                                    : DerivativeScheme::FirstDiff;
    return build_dual_from_series(series, ds, dt);
  }
  return read_container(input);
}

json peaks_json(const CdsvdResult& res, int leading, std::optional<std::pair<int, int>> grid) {
  json peaks = json::array();
  for (int comp = 0; comp < leading; ++comp) {
    Index flat = 0;
    res.U.standard().col(comp).cwiseAbs().maxCoeff(&flat);
    json p;
    p["component"] = comp;
    p["index"] = flat;
    if (grid) {
      p["row"] = flat / grid->second;
      p["col"] = flat % grid->second;
    }
    peaks.push_back(p);
  }
  return peaks;
}

struct WaveSpecFlag {
  GridWaveSpec spec;
  double weight = 1.0;
};

WaveSpecFlag parse_wave_flag(const std::string& text, bool traveling, int grid_rows,
                             int grid_cols) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  std::size_t base = traveling ? 4 : 2;
  if (vals.size() < base + 3 || vals.size() > base + 4) {
    throw CLI::ValidationError("wave spec",
                               traveling ? "--traveling needs r1,c1,r2,c2,sigma,omega,w[,gamma]"
                                         : "--standing needs r,c,sigma,omega,w[,gamma]");
  }
  WaveSpecFlag out;
  out.spec.grid_rows = grid_rows;
  out.spec.grid_cols = grid_cols;
  out.spec.centers.push_back({vals[0], vals[1]});
  if (traveling) out.spec.centers.push_back({vals[2], vals[3]});
  out.spec.sigma = vals[base];
  out.spec.omega = vals[base + 1];
  out.weight = vals[base + 2];
  if (vals.size() == base + 4) out.spec.gamma = vals[base + 3];
  return out;
}

std::pair<int, int> parse_grid(const std::string& text) {
  auto x = text.find('x');
  if (x == std::string::npos) {
    throw CLI::ValidationError("--grid", "expected HxW, e.g. 50x100");
  }
  return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
}

int run_cdsvd(const fs::path& input, const fs::path& output, const ToleranceFlags& tol) {
  DualMatrix a = read_container(input);
  CdsvdResult res;
  try {
    res = compute_cdsvd(a, tol.cdsvd());
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: existence residual " << e.residual() << " exceeds threshold "
              << e.threshold() << "\n";
    return kExitInfeasible;
  }
  fs::create_directories(output);
  write_container(res.U, output / "U");
  write_container(res.Sigma, output / "Sigma");
  write_container(res.V, output / "V");

  json report;
  report["command"] = "cdsvd";
  report["config"] =
      config_json("cdsvd", tol, {{"input", input.string()}, {"output", output.string()}});
  report["rank"] = res.rank();
  report["distinct_values"] = res.blocks.distinct_values;
  report["multiplicities"] = res.blocks.multiplicities;
  report["existence_residual"] = res.existence_residual;
  report["existence_threshold"] = res.existence_threshold;
  report["sigma_offdiag_mass"] = res.sigma_offdiag_mass;
  report["singular_values"] = {{"standard", real_diagonal(res.Sigma.standard())},
                               {"infinitesimal", real_diagonal(res.Sigma.infinitesimal())}};
  write_report(report, output / "cdsvd.json");
  std::cout << "rank " << res.rank() << ", existence residual " << res.existence_residual
            << ", factors written to " << output.string() << "\n";
  return kExitOk;
}

int run_lowrank(const fs::path& input, const fs::path& output, Index k,
                const ToleranceFlags& tol) {
  DualMatrix a = read_container(input);
  RankKApproximation approx = rank_k_approx(a, k);
  write_container(approx.approx, output);

  json report;
  report["command"] = "lowrank";
  report["config"] = config_json(
      "lowrank", tol, {{"input", input.string()}, {"output", output.string()}, {"k", k}});
  report["k"] = approx.k;
  report["standard_error"] = approx.standard_error;
  report["infinitesimal_error"] = approx.infinitesimal_error;
  fs::path report_path = output;
  report_path += ".json";
  write_report(report, report_path);
  std::cout << "rank-" << k << " approximation: standard error " << approx.standard_error
            << ", infinitesimal error " << approx.infinitesimal_error << "\n";
  return kExitOk;
}

int run_pinv(const fs::path& input, const fs::path& output, const ToleranceFlags& tol) {
  DualMatrix a = read_container(input);
  DmpgiResult res;
  try {
    res = dmpgi(a, tol.cdsvd());
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: existence residual " << e.residual() << " exceeds threshold "
              << e.threshold() << "\n";
    return kExitInfeasible;
  }
  write_container(res.pinv, output);
  json report;
  report["command"] = "pinv";
  report["config"] =
      config_json("pinv", tol, {{"input", input.string()}, {"output", output.string()}});
  report["existence_residual"] = res.existence_residual;
  fs::path report_path = output;
  report_path += ".json";
  write_report(report, report_path);
  std::cout << "pseudoinverse written to " << output.string() << " (existence residual "
            << res.existence_residual << ")\n";
  return kExitOk;
}

int run_simulate(const std::string& grid_text, const std::vector<std::string>& standing,
                 const std::vector<std::string>& traveling, int frames, double dt,
                 double noise_snr, const fs::path& output, ToleranceFlags& tol) {
  auto [rows, cols] = parse_grid(grid_text);
  if (standing.empty() && traveling.empty()) {
    throw CLI::ValidationError("simulate", "at least one --standing or --traveling wave");
  }
  Eigen::VectorXd times(frames);
  for (int j = 0; j < frames; ++j) times(j) = j * dt;

  RealMatrix series = RealMatrix::Zero(static_cast<Index>(rows) * cols, frames);
  for (const auto& text : standing) {
    WaveSpecFlag w = parse_wave_flag(text, false, rows, cols);
    series += w.weight * synthesize_gaussian_grid_wave(w.spec, times);
  }
  for (const auto& text : traveling) {
    WaveSpecFlag w = parse_wave_flag(text, true, rows, cols);
    series += w.weight * synthesize_gaussian_grid_wave(w.spec, times);
  }
  if (noise_snr > 0.0) {
    auto eng = make_stream(tol.seed, 0);
    RealMatrix noise(series.rows(), series.cols());
    for (Index j = 0; j < noise.cols(); ++j) {
      for (Index i = 0; i < noise.rows(); ++i) noise(i, j) = gaussian(eng);
    }
    noise *= std::sqrt(series.squaredNorm() / (noise_snr * noise.squaredNorm()));
    series += noise;
  }

  if (is_csv(output)) {
    write_matrix_csv(series.cast<std::complex<double>>(), output);
  } else {
    // containers carry the dual form directly: first differences over dt
    DualMatrix dual = build_dual_from_series(series, DerivativeScheme::FirstDiff, dt);
    write_container(dual, output);
  }
  std::cout << "simulated " << rows << "x" << cols << " grid, " << frames << " frames -> "
            << output.string() << "\n";
  return kExitOk;
}

int run_waves_detect(const fs::path& input, const std::string& scheme, double dt, int leading,
                     const fs::path& report_path, const std::optional<std::string>& grid_text,
                     const std::optional<std::string>& extract_pair,
                     const std::optional<fs::path>& movie_prefix, ToleranceFlags& tol) {
  DualMatrix dual = load_series(input, scheme, dt);

  bool projected = false;
  double projection_residual = 0.0;
  CdsvdResult res;
  try {
    res = compute_cdsvd(dual, tol.cdsvd());
  } catch (const InfeasibleError& e) {
    projected = true;
    projection_residual = e.residual();
    res = compute_cdsvd(project_to_feasible(dual), tol.cdsvd());
  }
  if (leading <= 0 || leading > res.rank()) leading = static_cast<int>(res.rank());
  SimilarityReport sim = similarity_analysis(res, leading, tol.similarity());

  std::optional<std::pair<int, int>> grid;
  if (grid_text) grid = parse_grid(*grid_text);

  json report;
  report["command"] = "waves detect";
  report["config"] =
      config_json("waves detect", tol,
                  {{"input", input.string()}, {"derive", scheme}, {"dt", dt}, {"K", leading}});
  report["rank"] = res.rank();
  report["projection_applied"] = projected;
  report["projection_residual"] = projection_residual;
  report["singular_values"] = {{"standard", real_diagonal(res.Sigma.standard())},
                               {"infinitesimal", real_diagonal(res.Sigma.infinitesimal())}};
  json gram = json::array();
  for (Index i = 0; i < sim.gram.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < sim.gram.cols(); ++j) row.push_back(sim.gram(i, j));
    gram.push_back(row);
  }
  report["gram"] = gram;
  json pairs = json::array();
  for (const auto& p : sim.pairs) {
    pairs.push_back({{"x", p.x}, {"y", p.y}, {"alpha", p.alpha}, {"beta", p.beta}});
  }
  report["pairs"] = pairs;
  json classes = json::array();
  for (auto cls : sim.classification) {
    classes.push_back(cls == WaveClass::Standing
                          ? "standing"
                          : cls == WaveClass::Traveling ? "traveling" : "unclassified");
  }
  report["classification"] = classes;
  report["partners"] = sim.partner;
  report["complex_data"] = sim.complex_data;
  report["peaks"] = peaks_json(res, leading, grid);

  if (extract_pair) {
    auto comma = extract_pair->find(',');
    if (comma == std::string::npos) {
      throw CLI::ValidationError("--extract-pair", "expected x,y component indices");
    }
    int x = std::stoi(extract_pair->substr(0, comma));
    int y = std::stoi(extract_pair->substr(comma + 1));
    ComplexMatrix movie = extract_traveling_wave(res, {x, y});
    fs::path movie_path = movie_prefix.value_or(fs::path("movie"));
    movie_path += ".csv";
    write_matrix_csv(movie, movie_path);
    report["movie"] = movie_path.string();
  }

  write_report(report, report_path);
  std::cout << "rank " << res.rank() << ", " << sim.pairs.size()
            << " traveling pair(s); report written to " << report_path.string() << "\n";
  return kExitOk;
}

int run_waves_rank(const fs::path& input, const std::string& scheme, double dt,
                   const fs::path& report_path, ToleranceFlags& tol) {
  DualMatrix dual = load_series(input, scheme, dt);
  RankRecoveryReport rep = rank_recovery(dual, {}, tol.cdsvd(), tol.recovery());

  json report;
  report["command"] = "waves rank";
  report["config"] = config_json("waves rank", tol,
                                 {{"input", input.string()}, {"derive", scheme}, {"dt", dt}});
  report["standard_sv"] = rep.standard_sv;
  report["infinitesimal_sv"] = rep.infinitesimal_sv;
  report["estimated_rank"] = rep.estimated_rank;
  report["gap_ratio"] = rep.gap_ratio;
  report["low_confidence"] = rep.low_confidence;
  report["projection_applied"] = rep.projection_applied;
  report["projection_residual"] = rep.projection_residual;
  write_report(report, report_path);
  std::cout << "estimated rank " << rep.estimated_rank << " (gap ratio " << rep.gap_ratio
            << (rep.low_confidence ? ", low confidence" : "") << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("DUALSVD_THREADS")) {
    int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{"compact dual SVD, quasi-metric low-rank approximation, dual pseudoinverse "
               "and wave detection for dual matrices"};
  app.require_subcommand(1);

  ToleranceFlags tol;

  auto* cdsvd_cmd = app.add_subcommand("cdsvd", "compact dual SVD of a container");
  std::string cdsvd_in, cdsvd_out;
  cdsvd_cmd->add_option("--input", cdsvd_in, "dual matrix container (prefix or directory)")
      ->required();
  cdsvd_cmd->add_option("--output", cdsvd_out, "output directory for U, Sigma, V + sidecar")
      ->required();
  add_tolerance_flags(cdsvd_cmd, tol);

  auto* lowrank_cmd = app.add_subcommand("lowrank", "optimal rank-k approximation under d*");
  std::string lr_in, lr_out;
  Index lr_k = 1;
  lowrank_cmd->add_option("--input", lr_in, "dual matrix container")->required();
  lowrank_cmd->add_option("-k,--rank", lr_k, "target rank")->required();
  lowrank_cmd->add_option("--output", lr_out, "output container prefix")->required();
  add_tolerance_flags(lowrank_cmd, tol);

  auto* pinv_cmd = app.add_subcommand("pinv", "dual Moore-Penrose generalized inverse");
  std::string pinv_in, pinv_out;
  pinv_cmd->add_option("--input", pinv_in, "dual matrix container")->required();
  pinv_cmd->add_option("--output", pinv_out, "output container prefix")->required();
  add_tolerance_flags(pinv_cmd, tol);

  auto* sim_cmd = app.add_subcommand("simulate", "synthesize standing/traveling grid waves");
  std::string sim_grid = "50x100", sim_out;
  std::vector<std::string> sim_standing, sim_traveling;
  int sim_frames = 100;
  double sim_dt = 1.0, sim_snr = 0.0;
  sim_cmd->add_option("--grid", sim_grid, "grid size HxW")->capture_default_str();
  sim_cmd->add_option("--standing", sim_standing, "standing wave r,c,sigma,omega,w[,gamma]");
  sim_cmd->add_option("--traveling", sim_traveling,
                      "traveling wave r1,c1,r2,c2,sigma,omega,w[,gamma]");
  sim_cmd->add_option("--frames", sim_frames, "number of frames")->capture_default_str();
  sim_cmd->add_option("--dt", sim_dt, "time step")->capture_default_str();
  sim_cmd->add_option("--noise-snr", sim_snr,
                      "signal-to-noise power ratio ||signal||^2/||noise||^2 (0 = none)")
      ->capture_default_str();
  sim_cmd->add_option("--seed", tol.seed, "master RNG seed")->capture_default_str();
  sim_cmd->add_option("--output", sim_out, "raw series .csv or dual container prefix")
      ->required();

  auto* waves_cmd = app.add_subcommand("waves", "spatiotemporal wave analysis");
  waves_cmd->require_subcommand(1);
  auto* detect_cmd = waves_cmd->add_subcommand("detect", "classify standing/traveling waves");
  std::string det_in, det_scheme = "first-diff", det_report;
  double det_dt = 1.0;
  int det_k = 0;
  std::optional<std::string> det_grid, det_pair;
  std::optional<fs::path> det_movie;
  detect_cmd->add_option("--input", det_in, "raw series .csv or dual container")->required();
  detect_cmd->add_option("--derive", det_scheme, "first-diff | one-sided-2nd")
      ->check(CLI::IsMember({"first-diff", "one-sided-2nd"}))
      ->capture_default_str();
  detect_cmd->add_option("--dt", det_dt, "time step for the derivative scheme")
      ->capture_default_str();
  detect_cmd->add_option("-K,--components", det_k, "leading components to analyze (0 = all)")
      ->capture_default_str();
  detect_cmd->add_option("--report", det_report, "output JSON report")->required();
  detect_cmd->add_option("--grid", det_grid, "grid size HxW for peak coordinates");
  detect_cmd->add_option("--extract-pair", det_pair, "component pair x,y to extract");
  detect_cmd->add_option("--movie", det_movie, "CSV prefix for the extracted movie");
  detect_cmd->add_option("--pair-fraction", tol.pair_fraction,
                         "pair threshold relative to the largest normalized coupling")
      ->capture_default_str();
  detect_cmd->add_option("--standing-fraction", tol.standing_fraction,
                         "standing threshold relative to max|G| and max||U_i||")
      ->capture_default_str();
  add_tolerance_flags(detect_cmd, tol);

  auto* rank_cmd = waves_cmd->add_subcommand("rank", "recover the true rank from noisy data");
  std::string rank_in, rank_scheme = "first-diff", rank_report;
  double rank_dt = 1.0;
  rank_cmd->add_option("--input", rank_in, "raw series .csv or dual container")->required();
  rank_cmd->add_option("--derive", rank_scheme, "first-diff | one-sided-2nd")
      ->check(CLI::IsMember({"first-diff", "one-sided-2nd"}))
      ->capture_default_str();
  rank_cmd->add_option("--dt", rank_dt, "time step")->capture_default_str();
  rank_cmd->add_option("--report", rank_report, "output JSON report")->required();
  rank_cmd->add_option("--significance", tol.significance,
                       "tail-median multiple a significant value must reach")
      ->capture_default_str();
  add_tolerance_flags(rank_cmd, tol);

  try {
    app.parse(argc, argv);
    if (*cdsvd_cmd) return run_cdsvd(cdsvd_in, cdsvd_out, tol);
    if (*lowrank_cmd) return run_lowrank(lr_in, lr_out, lr_k, tol);
    if (*pinv_cmd) return run_pinv(pinv_in, pinv_out, tol);
    if (*sim_cmd) {
      return run_simulate(sim_grid, sim_standing, sim_traveling, sim_frames, sim_dt, sim_snr,
                          sim_out, tol);
    }
    if (*detect_cmd) {
      return run_waves_detect(det_in, det_scheme, det_dt, det_k, det_report, det_grid,
                              det_pair, det_movie, tol);
    }
    if (*rank_cmd) return run_waves_rank(rank_in, rank_scheme, rank_dt, rank_report, tol);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
