/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

// Experiment runner for the data-driven iteratively regularized Landweber
// solvers: dataset synthesis, operator training, scheme execution with
// noise injection and sinogram masking, trace plotting, and the built-in
// property checks.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <irlw/checks.hpp>
#include <irlw/experiment.hpp>
#include <irlw/io.hpp>
#include <irlw/learned.hpp>
#include <irlw/plots.hpp>
#include <irlw/radon.hpp>
#include <irlw/rng.hpp>
#include <irlw/schlieren.hpp>
#include <irlw/solver.hpp>

namespace {

using namespace irlw;

struct ScaleArgs {
  std::string scale;  // "", "desk", "paper"
};

void apply_scale(ExperimentConfig& cfg, const std::string& scale) {
  if (scale.empty()) return;
  if (scale == "desk") {
    cfg.image_size = 32;
    cfg.num_angles = 45;
    cfg.detector_bins = 47;
  } else if (scale == "paper") {
    cfg.image_size = 128;
    cfg.num_angles = 180;
    cfg.detector_bins = 185;
  } else {
    throw ConfigError("unknown scale '" + scale + "' (want desk or paper)");
  }
}

// Seeded smooth phantom: gray-to-white background with a handful of
// elliptical bumps, clamped to [0, 1].
RealGrid make_phantom(SeededRng& rng, std::size_t n) {
  RealGrid img(n, n, 0.7 + 0.25 * rng.uniform01());
  const int bumps = 3 + static_cast<int>(rng.uniform01() * 4.0);
  for (int b = 0; b < bumps; ++b) {
    const double cx = rng.uniform(-0.6, 0.6);
    const double cy = rng.uniform(-0.6, 0.6);
    const double ax = rng.uniform(0.08, 0.45);
    const double ay = rng.uniform(0.08, 0.45);
    const double phi = rng.uniform(0.0, 3.14159265358979);
    const double amp = rng.uniform(-0.6, 0.5);
    const double cph = std::cos(phi), sph = std::sin(phi);
    const double w = 2.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
      const double y = 1.0 - (static_cast<double>(r) + 0.5) * w;
      for (std::size_t c = 0; c < n; ++c) {
        const double x = -1.0 + (static_cast<double>(c) + 0.5) * w;
        const double dx = (x - cx) * cph + (y - cy) * sph;
        const double dy = -(x - cx) * sph + (y - cy) * cph;
        const double rho2 = (dx / ax) * (dx / ax) + (dy / ay) * (dy / ay);
        if (rho2 < 1.0) img(r, c) += amp * (1.0 - rho2);
      }
    }
  }
  for (std::size_t i = 0; i < img.size(); ++i)
    img[i] = std::min(1.0, std::max(0.0, img[i]));
  return img;
}

int cmd_dataset(const std::string& output, std::size_t count, std::size_t size,
                std::uint64_t seed) {
  std::filesystem::create_directories(output);
  SeededRng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "phantom_%03zu.pgm", i);
    write_pgm(std::filesystem::path(output) / name, make_phantom(rng, size));
  }
  std::cout << "wrote " << count << " phantom images (" << size << "x" << size
            << ") to " << output << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& manifest_path,
              const std::string& output, bool explicit_form, double manifest_tol,
              const std::string& scale) {
  std::optional<LearnedOperator> op;
  if (!manifest_path.empty()) {
    TrainingSet ts;
    for (const auto& [in_path, out_path] : read_manifest(manifest_path)) {
      RealGrid u = read_pgm(in_path);
      SinogramCsv y = read_sinogram_csv(out_path);
      ts.pairs.emplace_back(std::move(u), std::move(y.values));
    }
    op = train_pseudoinverse(ts, manifest_tol);
  } else if (!config_path.empty()) {
    ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
    apply_scale(cfg, scale);
    const RadonGeometry geom = cfg.geometry();
    if (cfg.dataset_dir.empty())
      throw ConfigError("config lacks dataset_dir");
    const auto inputs = load_dataset(cfg.dataset_dir, geom.image_shape());
    const TrainingSet ts = synthesize_outputs(inputs, cfg.problem, geom);
    op = train_pseudoinverse(ts, cfg.truncation_tol);
  } else {
    throw ConfigError("train needs --config or --manifest");
  }
  save_learned_operator(output, *op, explicit_form);
  std::cout << "trained operator: " << op->range_shape().size() << "x"
            << op->domain_shape().size() << " from " << op->n_pairs()
            << " pairs -> " << output << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& scale, const std::string& output,
            const std::string& scheme, const std::string& normalize) {
  ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
  apply_scale(cfg, scale);
  if (seed) cfg.rng_seed = *seed;
  if (!output.empty()) cfg.output_dir = output;
  if (!scheme.empty()) {
    if (scheme == "landweber")
      cfg.scheme = SchemeKind::landweber;
    else if (scheme == "irl")
      cfg.scheme = SchemeKind::irl;
    else if (scheme == "perturbed")
      cfg.scheme = SchemeKind::perturbed;
    else
      throw ConfigError("unknown scheme '" + scheme + "'");
  }
  if (!normalize.empty())
    cfg.normalize_damping = normalize == "on";

  const ExperimentReport report = run_experiment(cfg);
  std::cout << "scheme=" << to_string(cfg.scheme)
            << " k*=" << report.trace.stop_index()
            << " stop=" << to_string(report.trace.stop_reason)
            << " final_residual=" << format_double(report.trace.final_residual)
            << "\n";
  for (const auto& [k, v] : report.metrics)
    if (k == "relative_error" || k == "delta")
      std::cout << k << "=" << v << "\n";
  std::cout << "outputs in " << cfg.output_dir << "\n";
  return 0;
}

int cmd_plot(const std::string& trace_path, const std::string& output) {
  const IterationTrace trace = read_trace_csv(trace_path);
  const PlotReport report = emit_plots(trace, output);
  for (const auto& p : report.written)
    std::cout << "wrote " << p.string() << "\n";
  for (const auto& s : report.skipped) std::cout << "skipped " << s << "\n";
  return 0;
}

bool report_check(const char* name, double value, double bound) {
  const bool ok = value <= bound;
  std::printf("%s %-42s %.3e (bound %.1e)\n", ok ? "PASS" : "FAIL", name,
              value, bound);
  return ok;
}

int cmd_verify(std::uint64_t seed) {
  bool ok = true;

  const RadonOperator radon_small(RadonGeometry::parallel(16, 12, 23));
  ok &= report_check("radon adjoint defect (16x16, 12 angles)",
                     check_adjoint(radon_small, 100, seed), 1e-12);
  const RadonOperator radon_desk(RadonGeometry::parallel(32, 45, 47));
  ok &= report_check("radon adjoint defect (32x32, 45 angles)",
                     check_adjoint(radon_desk, 100, seed), 1e-10);

  {
    SeededRng rng(seed);
    TrainingSet ts;
    for (int i = 0; i < 7; ++i)
      ts.pairs.emplace_back(rng.normal_grid(4, 5), rng.normal_grid(5, 8));
    const LearnedOperator A = train_pseudoinverse(ts, 1e-12);
    ok &= report_check("learned operator adjoint defect",
                       check_adjoint(A, 100, seed), 1e-10);
  }

  {
    const RadonGeometry geom = RadonGeometry::parallel(16, 8, 23, 1.0);
    SeededRng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const RealGrid u = rng.normal_grid(16, 16);
      const RealGrid h = rng.normal_grid(16, 16);
      const auto r = schlieren_gradient_check(u, h, 1e-5, geom);
      worst = std::max(worst, r.error);
    }
    ok &= report_check("schlieren derivative check", worst, 1e-8);

    const RealGrid u = SeededRng(seed + 1).normal_grid(16, 16);
    const RealGrid fu = schlieren_forward(u, geom);
    const RealGrid fmu = schlieren_forward(u * -1.0, geom);
    ok &= report_check("schlieren sign invariance |F(-u)-F(u)|",
                       frobenius_norm(fu - fmu), 0.0);
  }

  {
    // noise-free damped run on a seeded dense instance: error monotone,
    // stopping bound holds
    SeededRng rng(seed);
    const std::size_t n = 8;
    std::vector<double> entries(n * n);
    for (auto& e : entries) e = rng.normal() / static_cast<double>(n);
    const auto F = DenseMatrixOperator::from_matrix(n, n, entries);
    const double norm_F = estimate_operator_norm(F, 200, seed);
    const RealGrid truth = rng.normal_grid(n, 1);
    const RealGrid y = F.apply(truth);
    TrainingSet ts;
    ts.pairs.emplace_back(truth, y);
    ts.pairs.emplace_back(rng.normal_grid(n, 1), RealGrid(n, 1));
    for (auto& [u, out] : ts.pairs) out = F.apply(u);
    const LearnedOperator A = train_pseudoinverse(ts, 1e-12);

    SolverConfig cfg;
    cfg.scheme = SchemeKind::irl;
    cfg.step_size = 0.9 / (norm_F * norm_F);
    cfg.lambda = LambdaSchedule{LambdaKind::quadratic_in_residual, 1e-6,
                                ResidualNorm::frobenius};
    cfg.stopping = StoppingRule{2.0, 0.0, 20000};
    cfg.residual_norm = ResidualNorm::frobenius;
    cfg.truth = &truth;
    const IterationTrace trace = run_irl(F, A, y, cfg);
    const MonotonicityReport rep = verify_monotonicity(trace);
    std::printf("%s %-42s first_violation=%s\n",
                rep.monotone ? "PASS" : "FAIL", "noise-free error monotonicity",
                rep.first_violation
                    ? std::to_string(*rep.first_violation).c_str()
                    : "none");
    ok &= rep.monotone;
    std::printf("%s %-42s sum=%.3e\n", rep.stopping_bound_ok ? "PASS" : "FAIL",
                "stopping-index bound", rep.summability_partial);
    ok &= rep.stopping_bound_ok;
  }

  std::printf("%s\n", ok ? "all checks passed" : "SOME CHECKS FAILED");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Solvers for linear and nonlinear ill-posed inverse problems with a "
      "data-driven iteratively regularized Landweber iteration"};
  app.require_subcommand(1);

  // train
  std::string train_config, train_manifest, train_output = "operator.irla";
  std::string train_scale;
  bool train_explicit = false;
  double manifest_tol = 1e-12;
  auto* train = app.add_subcommand(
      "train", "Train the damping operator from a dataset or manifest");
  train->add_option("--config", train_config, "experiment config file");
  train->add_option("--manifest", train_manifest,
                    "training manifest (input_path,output_path per line)");
  train->add_option("--output", train_output, "output operator file");
  train->add_option("--tol", manifest_tol,
                    "truncation tolerance (manifest mode)");
  train->add_flag("--explicit", train_explicit,
                  "store the explicit M x N matrix instead of the factors");
  train->add_option("--scale", train_scale, "geometry preset: desk or paper");

  // run
  std::string run_config, run_scale, run_output, run_scheme, run_normalize;
  std::optional<std::uint64_t> run_seed;
  auto* run = app.add_subcommand("run", "Run an experiment from a config");
  run->add_option("--config", run_config, "experiment config file")
      ->required();
  run->add_option("--seed", run_seed, "override rng_seed");
  run->add_option("--scale", run_scale, "geometry preset: desk or paper");
  run->add_option("--output", run_output, "override output_dir");
  run->add_option("--scheme", run_scheme,
                  "override scheme: landweber, irl or perturbed");
  run->add_option("--normalize-damping", run_normalize,
                  "override damping normalization: on or off");

  // verify
  std::uint64_t verify_seed = 20260809;
  auto* verify = app.add_subcommand(
      "verify", "Run the property suites (adjoint, gradient, monotonicity)");
  verify->add_option("--seed", verify_seed, "seed for the random probes");

  // plot
  std::string plot_trace, plot_output = "plots";
  auto* plot = app.add_subcommand("plot", "Render plots from a trace CSV");
  plot->add_option("--trace", plot_trace, "trace CSV file")->required();
  plot->add_option("--output", plot_output, "output directory");

  // dataset
  std::string ds_output;
  std::size_t ds_count = 13, ds_size = 32;
  std::uint64_t ds_seed = 7;
  auto* dataset = app.add_subcommand(
      "dataset", "Synthesize a seeded phantom image dataset");
  dataset->add_option("--output", ds_output, "output directory")->required();
  dataset->add_option("--count", ds_count, "number of images");
  dataset->add_option("--size", ds_size, "image side length in pixels");
  dataset->add_option("--seed", ds_seed, "rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train)
      return cmd_train(train_config, train_manifest, train_output,
                       train_explicit, manifest_tol, train_scale);
    if (*run)
      return cmd_run(run_config, run_seed, run_scale, run_output, run_scheme,
                     run_normalize);
    if (*verify) return cmd_verify(verify_seed);
    if (*plot) return cmd_plot(plot_trace, plot_output);
    if (*dataset) return cmd_dataset(ds_output, ds_count, ds_size, ds_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
