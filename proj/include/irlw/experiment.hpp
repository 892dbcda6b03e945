/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <irlw/checks.hpp>
#include <irlw/io.hpp>
#include <irlw/learned.hpp>
#include <irlw/plots.hpp>
#include <irlw/radon.hpp>
#include <irlw/rng.hpp>
#include <irlw/schlieren.hpp>
#include <irlw/solver.hpp>

namespace irlw {

enum class Problem { radon, schlieren };

inline const char* to_string(Problem p) {
  return p == Problem::radon ? "radon" : "schlieren";
}

/// Inclusive angle range in degrees, within [0, 180).
struct AngleRangeDeg {
  double lo = 0.0;
  double hi = 0.0;
};

/**
 * Full description of one experiment: geometry, dataset, noise, scheme and
 * output location.  Parsed from `key = value` text with the exact key set
 * below; unknown keys are rejected (they are usually typos in parameter
 * names).
 */
struct ExperimentConfig {
  Problem problem = Problem::radon;
  std::size_t image_size = 32;
  std::size_t num_angles = 45;
  std::size_t detector_bins = 47;
  std::optional<double> support_radius;  // default sqrt(2) radon, 1 schlieren

  std::string dataset_dir;
  std::string truth_image;
  bool truth_in_training = true;

  double noise_variance = 0.0;
  std::uint64_t rng_seed = 0;

  SchemeKind scheme = SchemeKind::irl;
  std::optional<double> step_size;  // absent = auto (linear schemes only)
  LambdaKind lambda_kind = LambdaKind::quadratic_in_residual;
  double lambda_coefficient = 0.0;
  std::optional<ResidualNorm> norm_choice;  // default per problem
  double tau = 2.0;
  std::size_t max_iterations = 200;
  std::string initial_guess = "";  // "", "zero", "constant:<c>", "grid:<path>"
  bool normalize_damping = true;
  double truncation_tol = 1e-12;
  std::size_t snapshot_every = 0;

  std::optional<std::vector<AngleRangeDeg>> mask;  // absent = keep all angles
  std::string output_dir = "out";

  static ExperimentConfig parse(std::istream& in, const std::string& source);
  static ExperimentConfig from_file(const std::filesystem::path& path);

  double resolved_support_radius() const {
    if (support_radius) return *support_radius;
    return problem == Problem::radon ? std::numbers::sqrt2 : 1.0;
  }

  ResidualNorm resolved_norm_choice() const {
    if (norm_choice) return *norm_choice;
    return problem == Problem::radon ? ResidualNorm::spectral
                                     : ResidualNorm::schlieren_inf;
  }

  InitialGuess resolved_initial_guess() const {
    if (initial_guess.empty())
      return problem == Problem::schlieren ? InitialGuess::constant(0.01)
                                           : InitialGuess::zero();
    if (initial_guess == "zero") return InitialGuess::zero();
    if (initial_guess.rfind("constant:", 0) == 0)
      return InitialGuess::constant(std::stod(initial_guess.substr(9)));
    if (initial_guess.rfind("grid:", 0) == 0)
      return InitialGuess::from_grid(read_pgm(initial_guess.substr(5)));
    throw ConfigError("bad initial_guess '" + initial_guess + "'");
  }

  RadonGeometry geometry() const {
    return RadonGeometry::parallel(image_size, num_angles, detector_bins,
                                   resolved_support_radius());
  }
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

inline std::vector<AngleRangeDeg> parse_mask_ranges(const std::string& v) {
  std::vector<AngleRangeDeg> ranges;
  if (v.empty()) return ranges;  // explicit empty list: mask everything
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos)
      throw ParameterError("mask range lacks '-': '" + item + "'");
    AngleRangeDeg r;
    r.lo = std::stod(item.substr(0, dash));
    r.hi = std::stod(item.substr(dash + 1));
    if (!(r.lo >= 0.0 && r.hi < 180.0 && r.lo <= r.hi))
      throw ParameterError("mask range outside [0, 180): '" + item + "'");
    ranges.push_back(r);
  }
  return ranges;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::parse(std::istream& in,
                                                const std::string& source) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));

    if (key == "problem") {
      if (value == "radon")
        cfg.problem = Problem::radon;
      else if (value == "schlieren")
        cfg.problem = Problem::schlieren;
      else
        throw ConfigError("unknown problem '" + value + "'");
    } else if (key == "image_size") {
      cfg.image_size = std::stoul(value);
    } else if (key == "num_angles") {
      cfg.num_angles = std::stoul(value);
    } else if (key == "detector_bins") {
      cfg.detector_bins = std::stoul(value);
    } else if (key == "support_radius") {
      cfg.support_radius = std::stod(value);
    } else if (key == "dataset_dir") {
      cfg.dataset_dir = value;
    } else if (key == "truth_image") {
      cfg.truth_image = value;
    } else if (key == "truth_in_training") {
      cfg.truth_in_training = detail::parse_bool(value, key);
    } else if (key == "noise_variance") {
      cfg.noise_variance = std::stod(value);
    } else if (key == "rng_seed") {
      cfg.rng_seed = std::stoull(value);
    } else if (key == "scheme") {
      if (value == "landweber")
        cfg.scheme = SchemeKind::landweber;
      else if (value == "irl")
        cfg.scheme = SchemeKind::irl;
      else if (value == "perturbed")
        cfg.scheme = SchemeKind::perturbed;
      else
        throw ConfigError("unknown scheme '" + value + "'");
    } else if (key == "step_size") {
      if (value != "auto") cfg.step_size = std::stod(value);
    } else if (key == "lambda_kind") {
      if (value == "linear" || value == "linear_in_residual")
        cfg.lambda_kind = LambdaKind::linear_in_residual;
      else if (value == "quadratic" || value == "quadratic_in_residual")
        cfg.lambda_kind = LambdaKind::quadratic_in_residual;
      else
        throw ConfigError("unknown lambda_kind '" + value + "'");
    } else if (key == "lambda_coefficient") {
      cfg.lambda_coefficient = std::stod(value);
    } else if (key == "norm_choice") {
      if (value == "spectral")
        cfg.norm_choice = ResidualNorm::spectral;
      else if (value == "frobenius")
        cfg.norm_choice = ResidualNorm::frobenius;
      else if (value == "schlieren_inf")
        cfg.norm_choice = ResidualNorm::schlieren_inf;
      else
        throw ConfigError("unknown norm_choice '" + value + "'");
    } else if (key == "tau") {
      cfg.tau = std::stod(value);
    } else if (key == "max_iterations") {
      cfg.max_iterations = std::stoul(value);
    } else if (key == "initial_guess") {
      cfg.initial_guess = value;
    } else if (key == "normalize_damping") {
      cfg.normalize_damping = detail::parse_bool(value, key);
    } else if (key == "truncation_tol") {
      cfg.truncation_tol = std::stod(value);
    } else if (key == "snapshot_every") {
      cfg.snapshot_every = std::stoul(value);
    } else if (key == "mask_degrees") {
      cfg.mask = detail::parse_mask_ranges(value);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else {
      throw ConfigError(source + ":" + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

inline ExperimentConfig ExperimentConfig::from_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse(in, path.string());
}

// ---------------------------------------------------------------------------
// Pipeline stages
// ---------------------------------------------------------------------------

/**
 * Load every .pgm image in `dir` (deterministic lexicographic file order,
 * intensities in [0, 1]) and validate against the expected shape.
 */
inline std::vector<RealGrid> load_dataset(const std::filesystem::path& dir,
                                          Shape expected_shape) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("dataset directory does not exist: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) {
              return a.filename().string() < b.filename().string();
            });
  if (files.empty())
    throw IoError("dataset directory has no .pgm images: " + dir.string());
  std::vector<RealGrid> images;
  images.reserve(files.size());
  for (const auto& f : files) {
    RealGrid g = read_pgm(f);
    if (g.shape() != expected_shape)
      throw IoError("dataset image " + f.string() + " is " +
                    to_string(g.shape()) + ", expected " +
                    to_string(expected_shape));
    images.push_back(std::move(g));
  }
  return images;
}

/// Pair each input with its exact (noise-free) forward image.
inline TrainingSet synthesize_outputs(const std::vector<RealGrid>& inputs,
                                      Problem problem,
                                      const RadonGeometry& geom) {
  TrainingSet ts;
  ts.pairs.reserve(inputs.size());
  for (const auto& u : inputs) {
    RealGrid y = problem == Problem::radon ? radon_forward(u, geom)
                                           : schlieren_forward(u, geom);
    ts.pairs.emplace_back(u, std::move(y));
  }
  ts.validate();
  return ts;
}

struct NoisyData {
  RealGrid y_delta;
  double delta = 0.0;
};

/**
 * Add i.i.d. zero-mean gaussian noise of the given variance
 * (seed-deterministic) and report delta = |y_delta - y| in the problem's
 * convention: spectral norm for Radon data, per-angle max euclidean norm
 * for Schlieren stacks.  Zero variance returns the data unchanged.
 */
inline NoisyData add_gaussian_noise(const RealGrid& y, double variance,
                                    std::uint64_t seed,
                                    ResidualNorm delta_norm) {
  if (variance < 0.0)
    throw ParameterError("add_gaussian_noise: variance must be >= 0");
  if (variance == 0.0) return {y, 0.0};
  SeededRng rng(seed);
  const RealGrid noise =
      rng.normal_grid(y.rows(), y.cols(), std::sqrt(variance));
  NoisyData out{y, residual_norm(noise, delta_norm)};
  out.y_delta += noise;
  return out;
}

/**
 * Keep the sinogram columns whose angle (in degrees) falls in one of the
 * inclusive ranges; all other columns are set to zero.  Idempotent; the
 * result is the input times a {0, 1} column mask.
 */
inline RealGrid mask_sinogram(const RealGrid& y,
                              const std::vector<AngleRangeDeg>& ranges,
                              const RadonGeometry& geom) {
  if (y.shape() != geom.sinogram_shape())
    throw DimensionError("mask_sinogram: data does not match geometry");
  for (const auto& r : ranges)
    if (!(r.lo >= 0.0 && r.hi < 180.0 && r.lo <= r.hi))
      throw ParameterError("mask range outside [0, 180)");
  constexpr double kAngleEps = 1e-9;  // degree conversion round-off
  RealGrid out = y;
  for (std::size_t a = 0; a < geom.angles.size(); ++a) {
    const double deg = geom.angles[a] * 180.0 / std::numbers::pi;
    bool keep = false;
    for (const auto& r : ranges)
      if (deg >= r.lo - kAngleEps && deg <= r.hi + kAngleEps) {
        keep = true;
        break;
      }
    if (!keep)
      for (std::size_t s = 0; s < y.rows(); ++s) out(s, a) = 0.0;
  }
  return out;
}

struct ExperimentReport {
  IterationTrace trace;
  Metrics metrics;
  std::filesystem::path reconstruction_path;
  std::filesystem::path trace_path;
  std::filesystem::path metrics_path;
  PlotReport plots;
};

namespace detail {

/// Deterministic auto step: 0.9/|F|^2 for gradient schemes, 0.95/|F| for
/// the perturbed scheme (whose update applies the operator twice).
inline double auto_step_size(const LinearOperator& op, SchemeKind scheme) {
  const double norm = estimate_operator_norm(op, 60, /*seed=*/0x5eeded);
  if (norm == 0.0) throw ConfigError("auto step size: operator norm is 0");
  return scheme == SchemeKind::perturbed ? 0.95 / norm
                                         : 0.9 / (norm * norm);
}

}  // namespace detail

/**
 * Run one experiment end to end: ingest the dataset, train the damping
 * operator (skipped entirely for the plain Landweber scheme), synthesize
 * noisy data, apply the angle mask, run the scheme and write
 * reconstruction, trace CSV, metrics and plots under output_dir.  Fully
 * reproducible from (config, seed); on failure any partially written
 * outputs are removed.
 */
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const RadonGeometry geom = cfg.geometry();
  if (cfg.truth_image.empty()) throw ConfigError("truth_image is required");
  const RealGrid truth = read_pgm(cfg.truth_image);
  if (truth.shape() != geom.image_shape())
    throw IoError("truth image " + cfg.truth_image + " is " +
                  to_string(truth.shape()) + ", geometry expects " +
                  to_string(geom.image_shape()));
  if (cfg.problem == Problem::schlieren && cfg.scheme == SchemeKind::perturbed)
    throw ConfigError("the perturbed scheme applies to linear problems only");

  // Operators.
  const RadonOperator radon_op(geom);
  const SchlierenOperator schlieren_op(geom);
  const bool linear = cfg.problem == Problem::radon;

  // Training (the Landweber scheme never touches the dataset).
  std::optional<LearnedOperator> learned;
  std::size_t n_training = 0;
  if (cfg.scheme != SchemeKind::landweber) {
    if (cfg.dataset_dir.empty())
      throw ConfigError("scheme '" + std::string(to_string(cfg.scheme)) +
                        "' requires dataset_dir");
    std::vector<RealGrid> inputs =
        load_dataset(cfg.dataset_dir, geom.image_shape());
    if (cfg.truth_in_training) {
      const bool present =
          std::any_of(inputs.begin(), inputs.end(),
                      [&](const RealGrid& g) { return g == truth; });
      if (!present) inputs.push_back(truth);
    }
    const TrainingSet ts = synthesize_outputs(inputs, cfg.problem, geom);
    n_training = ts.size();
    learned = train_pseudoinverse(ts, cfg.truncation_tol);
  }

  // Data.
  const RealGrid y_exact = linear ? radon_op.apply(truth)
                                  : schlieren_op.apply(truth);
  const ResidualNorm delta_norm =
      linear ? ResidualNorm::spectral : ResidualNorm::schlieren_inf;
  NoisyData noisy =
      add_gaussian_noise(y_exact, cfg.noise_variance, cfg.rng_seed, delta_norm);
  if (cfg.mask) noisy.y_delta = mask_sinogram(noisy.y_delta, *cfg.mask, geom);

  // Solver configuration.
  SolverConfig scfg;
  scfg.scheme = cfg.scheme;
  if (cfg.step_size) {
    scfg.step_size = *cfg.step_size;
  } else {
    if (!linear)
      throw ConfigError(
          "step_size=auto needs a linear problem; give an explicit value");
    scfg.step_size = detail::auto_step_size(radon_op, cfg.scheme);
  }
  if (cfg.scheme != SchemeKind::landweber)
    scfg.lambda = LambdaSchedule{cfg.lambda_kind, cfg.lambda_coefficient,
                                 cfg.resolved_norm_choice()};
  scfg.stopping = StoppingRule{cfg.tau, noisy.delta, cfg.max_iterations};
  scfg.initial_guess = cfg.resolved_initial_guess();
  scfg.residual_norm = cfg.resolved_norm_choice();
  scfg.snapshot_every = cfg.snapshot_every;
  scfg.truth = &truth;

  // Run.
  IterationTrace trace;
  switch (cfg.scheme) {
    case SchemeKind::landweber:
      trace = linear ? run_landweber(radon_op, noisy.y_delta, scfg)
                     : run_landweber(schlieren_op, noisy.y_delta, scfg);
      break;
    case SchemeKind::irl:
      trace = linear ? run_irl(radon_op, *learned, noisy.y_delta, scfg,
                               cfg.normalize_damping)
                     : run_irl(schlieren_op, *learned, noisy.y_delta, scfg,
                               cfg.normalize_damping);
      break;
    case SchemeKind::perturbed:
      trace = run_perturbed(radon_op, *learned, noisy.y_delta, scfg);
      break;
  }

  // Metrics.
  RealGrid error = trace.final_iterate;
  error -= truth;
  const double truth_norm = frobenius_norm(truth);
  const double rel_error = truth_norm > 0.0
                               ? frobenius_norm(error) / truth_norm
                               : frobenius_norm(error);
  ExperimentReport report;
  report.trace = std::move(trace);
  auto& m = report.metrics;
  m.emplace_back("problem", to_string(cfg.problem));
  m.emplace_back("scheme", to_string(cfg.scheme));
  m.emplace_back("k_star", std::to_string(report.trace.stop_index()));
  m.emplace_back("stop_reason", to_string(report.trace.stop_reason));
  m.emplace_back("final_residual", format_double(report.trace.final_residual));
  m.emplace_back("relative_error", format_double(rel_error));
  m.emplace_back("delta", format_double(noisy.delta));
  m.emplace_back("tau", format_double(cfg.tau));
  m.emplace_back("seed", std::to_string(cfg.rng_seed));
  m.emplace_back("noise_variance", format_double(cfg.noise_variance));
  m.emplace_back("step_size", format_double(scfg.step_size));
  m.emplace_back("max_iterations", std::to_string(cfg.max_iterations));
  m.emplace_back("norm_choice", to_string(cfg.resolved_norm_choice()));
  m.emplace_back("image_size", std::to_string(cfg.image_size));
  m.emplace_back("num_angles", std::to_string(cfg.num_angles));
  m.emplace_back("detector_bins", std::to_string(cfg.detector_bins));
  if (cfg.scheme != SchemeKind::landweber) {
    m.emplace_back("lambda_kind",
                   cfg.lambda_kind == LambdaKind::linear_in_residual
                       ? "linear_in_residual"
                       : "quadratic_in_residual");
    m.emplace_back("lambda_coefficient",
                   format_double(cfg.lambda_coefficient));
    m.emplace_back("normalize_damping",
                   cfg.normalize_damping ? "true" : "false");
    m.emplace_back("n_training_pairs", std::to_string(n_training));
    m.emplace_back("truncation_tol", format_double(cfg.truncation_tol));
  }

  // Artifact emission; remove partial outputs if any write fails.
  const std::filesystem::path out_dir(cfg.output_dir);
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  try {
    report.reconstruction_path = out_dir / "reconstruction.pgm";
    write_pgm(report.reconstruction_path, report.trace.final_iterate);
    written.push_back(report.reconstruction_path);

    report.trace_path = out_dir / "trace.csv";
    write_trace_csv(report.trace_path, report.trace);
    written.push_back(report.trace_path);

    if (!report.trace.records.empty()) {
      report.plots = emit_plots(report.trace, out_dir / "plots");
      for (const auto& p : report.plots.written) written.push_back(p);
    } else {
      report.plots.skipped.emplace_back("all plots: trace has no records");
    }
    for (const auto& s : report.plots.skipped)
      m.emplace_back("plot_skipped", s);

    report.metrics_path = out_dir / "metrics.txt";
    write_metrics(report.metrics_path, m);
    written.push_back(report.metrics_path);
  } catch (...) {
    for (const auto& p : written) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
    throw;
  }
  return report;
}

}  // namespace irlw
