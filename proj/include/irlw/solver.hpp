/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <irlw/grid.hpp>
#include <irlw/learned.hpp>
#include <irlw/norms.hpp>
#include <irlw/operators.hpp>

namespace irlw {

enum class LambdaKind { linear_in_residual, quadratic_in_residual };

/// Per-iteration damping weight lambda_k = c * |res| or c * |res|^2.
struct LambdaSchedule {
  LambdaKind kind = LambdaKind::quadratic_in_residual;
  double coefficient = 0.0;
  ResidualNorm norm_choice = ResidualNorm::spectral;

  double evaluate(double residual) const {
    return kind == LambdaKind::linear_in_residual
               ? coefficient * residual
               : coefficient * residual * residual;
  }

  void validate() const {
    if (coefficient < 0.0)
      throw ParameterError("lambda coefficient must be >= 0");
  }
};

/// Discrepancy principle: stop at the first k with |F(u_k) - y| <= tau*delta,
/// else after max_iterations updates.
struct StoppingRule {
  double tau = 2.0;
  double delta = 0.0;
  std::size_t max_iterations = 200;

  void validate() const {
    if (!(tau > 0.0)) throw ParameterError("stopping rule: tau must be > 0");
    if (delta < 0.0) throw ParameterError("stopping rule: delta must be >= 0");
  }
};

enum class StopReason { discrepancy, max_iterations };

inline const char* to_string(StopReason r) {
  return r == StopReason::discrepancy ? "discrepancy" : "max_iterations";
}

struct TraceRecord {
  std::size_t k = 0;
  double residual_F = 0.0;  // the exact norm the stopping rule used
  std::optional<double> residual_A;
  std::optional<double> lambda_k;
  std::optional<double> error_to_truth;
};

/**
 * Per-iteration scalars of one solver run plus the final iterate.  Records
 * cover k = 0 .. k*-1 (the iterates that received an update); k* equals
 * records.size() and counts completed updates.
 */
struct IterationTrace {
  std::vector<TraceRecord> records;
  RealGrid final_iterate;
  StopReason stop_reason = StopReason::max_iterations;
  double tau_delta = 0.0;
  double final_residual = 0.0;  // residual norm at final_iterate
  std::vector<std::pair<std::size_t, RealGrid>> snapshots;

  std::size_t stop_index() const { return records.size(); }
};

struct InitialGuess {
  enum class Kind { zero, constant, grid };
  Kind kind = Kind::zero;
  double value = 0.0;
  RealGrid grid_value;

  static InitialGuess zero() { return {}; }
  static InitialGuess constant(double c) {
    return {Kind::constant, c, RealGrid()};
  }
  static InitialGuess from_grid(RealGrid g) {
    return {Kind::grid, 0.0, std::move(g)};
  }

  RealGrid materialize(Shape domain) const {
    switch (kind) {
      case Kind::zero:
        return RealGrid(domain);
      case Kind::constant:
        return RealGrid(domain, value);
      case Kind::grid:
        if (grid_value.shape() != domain)
          throw DimensionError("initial guess grid is " +
                               to_string(grid_value.shape()) +
                               ", expected " + to_string(domain));
        return grid_value;
    }
    throw ParameterError("initial guess: unknown kind");
  }
};

enum class SchemeKind { landweber, irl, perturbed };

inline const char* to_string(SchemeKind s) {
  switch (s) {
    case SchemeKind::landweber:
      return "landweber";
    case SchemeKind::irl:
      return "irl";
    case SchemeKind::perturbed:
      return "perturbed";
  }
  return "?";
}

struct SolverConfig {
  SchemeKind scheme = SchemeKind::landweber;
  double step_size = 1.0;  // omega_R / alpha / omega_P
  std::optional<LambdaSchedule> lambda;
  StoppingRule stopping;
  InitialGuess initial_guess;
  ResidualNorm residual_norm = ResidualNorm::spectral;  // stopping-rule norm
  std::size_t snapshot_every = 0;   // 0 = keep only trace scalars
  const RealGrid* truth = nullptr;  // enables error_to_truth in the trace

  void validate() const {
    if (!(step_size > 0.0))
      throw ParameterError("solver config: step_size must be > 0");
    stopping.validate();
    if (lambda) lambda->validate();
    if ((scheme == SchemeKind::irl || scheme == SchemeKind::perturbed) &&
        !lambda)
      throw ConfigError(std::string(to_string(scheme)) +
                        " scheme requires a lambda schedule");
  }
};

namespace detail {

inline void guard_iterate(const RealGrid& u, std::size_t k) {
  for (double x : u.data()) {
    if (!std::isfinite(x) || std::abs(x) > 1e100)
      throw DivergenceError(
          "iterate diverged at iteration " + std::to_string(k), k);
  }
}

/**
 * Shared engine for the Landweber and data-driven iteratively regularized
 * Landweber updates,
 *   u_{k+1} = u_k - omega F'(u_k)^*(F(u_k) - y) - lambda_k D_k,
 * where D_k = A^T(A u_k - y) (optionally normalized to unit length).  With
 * A == nullptr the damping term vanishes and the loop is plain Landweber;
 * an IRL run whose lambda evaluates to zero executes bit-identical updates.
 */
inline IterationTrace run_damped(const NonlinearOperator& F,
                                 const LinearOperator* A,
                                 const RealGrid& y_delta,
                                 const SolverConfig& cfg,
                                 bool normalize_damping) {
  cfg.validate();
  if (y_delta.shape() != F.range_shape())
    throw DimensionError("data shape " + to_string(y_delta.shape()) +
                         " does not match operator range " +
                         to_string(F.range_shape()));
  if (A && (A->domain_shape() != F.domain_shape() ||
            A->range_shape() != F.range_shape()))
    throw DimensionError("learned operator shapes do not match F");
  if (cfg.truth && cfg.truth->shape() != F.domain_shape())
    throw DimensionError("truth shape does not match operator domain");

  IterationTrace trace;
  trace.tau_delta = cfg.stopping.tau * cfg.stopping.delta;
  RealGrid u = cfg.initial_guess.materialize(F.domain_shape());
  const double norm_y = frobenius_norm(y_delta);

  for (std::size_t k = 0;; ++k) {
    const RealGrid residual = F.apply(u) - y_delta;
    const double res_F = residual_norm(residual, cfg.residual_norm);
    if (res_F <= trace.tau_delta) {
      trace.stop_reason = StopReason::discrepancy;
      trace.final_residual = res_F;
      break;
    }
    if (k >= cfg.stopping.max_iterations) {
      trace.stop_reason = StopReason::max_iterations;
      trace.final_residual = res_F;
      break;
    }

    TraceRecord rec;
    rec.k = k;
    rec.residual_F = res_F;
    if (cfg.truth) {
      RealGrid e = u;
      e -= *cfg.truth;
      rec.error_to_truth = frobenius_norm(e);
    }

    RealGrid damping_residual;  // A u_k - y_delta
    if (A) {
      damping_residual = A->apply(u) - y_delta;
      rec.residual_A = residual_norm(damping_residual, cfg.residual_norm);
    }
    double lambda_k = 0.0;
    if (cfg.lambda) {
      const double res_for_lambda =
          cfg.lambda->norm_choice == cfg.residual_norm
              ? res_F
              : residual_norm(residual, cfg.lambda->norm_choice);
      lambda_k = cfg.lambda->evaluate(res_for_lambda);
      rec.lambda_k = lambda_k;
    }
    trace.records.push_back(std::move(rec));
    if (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0)
      trace.snapshots.emplace_back(k, u);

    u.axpy(-cfg.step_size, F.derivative_adjoint_apply(u, residual));
    if (A && lambda_k != 0.0) {
      RealGrid g = A->apply_adjoint(damping_residual);
      if (normalize_damping) {
        const double norm_g = frobenius_norm(g);
        if (norm_g > 1e-14 * std::max(1.0, norm_y)) {
          g *= 1.0 / norm_g;
          u.axpy(-lambda_k, g);
        }
      } else {
        u.axpy(-lambda_k, g);
      }
    }
    guard_iterate(u, k);
  }

  trace.final_iterate = std::move(u);
  return trace;
}

}  // namespace detail

/// Landweber iteration u_{k+1} = u_k - omega F'(u_k)^*(F(u_k) - y_delta).
inline IterationTrace run_landweber(const NonlinearOperator& F,
                                    const RealGrid& y_delta,
                                    const SolverConfig& cfg) {
  if (cfg.scheme != SchemeKind::landweber)
    throw ConfigError("run_landweber: config selects a different scheme");
  return detail::run_damped(F, nullptr, y_delta, cfg, false);
}

inline IterationTrace run_landweber(const LinearOperator& F,
                                    const RealGrid& y_delta,
                                    const SolverConfig& cfg) {
  return run_landweber(LinearAsNonlinear(F), y_delta, cfg);
}

/**
 * Data-driven iteratively regularized Landweber iteration,
 *   u_{k+1} = u_k - omega F'(u_k)^*(F(u_k) - y) - lambda_k A^T(A u_k - y),
 * with lambda_k from the schedule evaluated at u_k.  With
 * normalize_damping the damping term is replaced by its unit-norm
 * direction, the form the numerical experiments implement.
 */
inline IterationTrace run_irl(const NonlinearOperator& F,
                              const LinearOperator& A, const RealGrid& y_delta,
                              const SolverConfig& cfg,
                              bool normalize_damping = false) {
  if (cfg.scheme != SchemeKind::irl)
    throw ConfigError("run_irl: config selects a different scheme");
  return detail::run_damped(F, &A, y_delta, cfg, normalize_damping);
}

inline IterationTrace run_irl(const LinearOperator& F, const LinearOperator& A,
                              const RealGrid& y_delta, const SolverConfig& cfg,
                              bool normalize_damping = false) {
  return run_irl(LinearAsNonlinear(F), A, y_delta, cfg, normalize_damping);
}

/**
 * Perturbed-operator scheme for linear problems:
 *   u_{k+1} = u_k - (omega R + lambda1_k A)^*
 *                   ( omega (R u_k - y) + lambda1_k (A u_k - y) ),
 * with lambda1_k evaluated once from u_k and used in both occurrences.
 */
inline IterationTrace run_perturbed(const LinearOperator& R,
                                    const LinearOperator& A,
                                    const RealGrid& y_delta,
                                    const SolverConfig& cfg) {
  if (cfg.scheme != SchemeKind::perturbed)
    throw ConfigError("run_perturbed: config selects a different scheme");
  cfg.validate();
  if (y_delta.shape() != R.range_shape())
    throw DimensionError("data shape does not match operator range");
  if (A.domain_shape() != R.domain_shape() ||
      A.range_shape() != R.range_shape())
    throw DimensionError("learned operator shapes do not match R");
  if (cfg.truth && cfg.truth->shape() != R.domain_shape())
    throw DimensionError("truth shape does not match operator domain");

  IterationTrace trace;
  trace.tau_delta = cfg.stopping.tau * cfg.stopping.delta;
  RealGrid u = cfg.initial_guess.materialize(R.domain_shape());
  const double omega = cfg.step_size;

  for (std::size_t k = 0;; ++k) {
    const RealGrid residual_R = R.apply(u) - y_delta;
    const double res_F = residual_norm(residual_R, cfg.residual_norm);
    if (res_F <= trace.tau_delta) {
      trace.stop_reason = StopReason::discrepancy;
      trace.final_residual = res_F;
      break;
    }
    if (k >= cfg.stopping.max_iterations) {
      trace.stop_reason = StopReason::max_iterations;
      trace.final_residual = res_F;
      break;
    }

    const RealGrid residual_A = A.apply(u) - y_delta;
    const double res_for_lambda =
        cfg.lambda->norm_choice == cfg.residual_norm
            ? res_F
            : residual_norm(residual_R, cfg.lambda->norm_choice);
    const double lambda_k = cfg.lambda->evaluate(res_for_lambda);

    TraceRecord rec;
    rec.k = k;
    rec.residual_F = res_F;
    rec.residual_A = residual_norm(residual_A, cfg.residual_norm);
    rec.lambda_k = lambda_k;
    if (cfg.truth) {
      RealGrid e = u;
      e -= *cfg.truth;
      rec.error_to_truth = frobenius_norm(e);
    }
    trace.records.push_back(std::move(rec));
    if (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0)
      trace.snapshots.emplace_back(k, u);

    RealGrid combined = residual_R * omega;
    if (lambda_k != 0.0) combined.axpy(lambda_k, residual_A);
    u.axpy(-omega, R.apply_adjoint(combined));
    if (lambda_k != 0.0) u.axpy(-lambda_k, A.apply_adjoint(combined));
    detail::guard_iterate(u, k);
  }

  trace.final_iterate = std::move(u);
  return trace;
}

/// Result of the convergence-theory parameter check.
struct TheoryReport {
  double C_tau = 0.0;
  bool ctau_condition_ok = false;    // C_tau - 2 L_A C_A C_lambda rho > 0
  double contraction_coefficient = 0.0;  // 2 (C_tau - 2 L_A C_A C_lambda rho)
};

/**
 * Evaluate the constants of the monotonicity proposition:
 *   C_tau = 1 - L_F^2 - nu - (1 + nu)/tau,
 * the positivity condition C_tau - 2 L_A C_A^delta C_lambda rho > 0, and the
 * per-step contraction coefficient of the error recursion.
 */
inline TheoryReport theory_constants(double L_F, double L_A, double nu,
                                     double rho, double tau, double C_lambda,
                                     double C_A_delta) {
  if (!(tau > 0.0)) throw ParameterError("theory_constants: tau must be > 0");
  if (L_F < 0.0 || L_A < 0.0 || nu < 0.0 || rho < 0.0 || C_lambda < 0.0 ||
      C_A_delta < 0.0)
    throw ParameterError("theory_constants: constants must be >= 0");
  TheoryReport report;
  report.C_tau = 1.0 - L_F * L_F - nu - (1.0 + nu) / tau;
  const double margin = report.C_tau - 2.0 * L_A * C_A_delta * C_lambda * rho;
  report.ctau_condition_ok = margin > 0.0;
  report.contraction_coefficient = 2.0 * margin;
  return report;
}

/// Stability constant |A(u_k) - y_delta| <= L_A rho + |A(u+)| + |y_delta|.
inline double a_stability_constant(double L_A, double rho,
                                   double norm_A_u_truth,
                                   double norm_y_delta) {
  return L_A * rho + norm_A_u_truth + norm_y_delta;
}

struct MonotonicityReport {
  bool monotone = true;
  std::optional<std::size_t> first_violation;
  double summability_partial = 0.0;  // sum of residual_F^2 over the records
  bool stopping_bound_ok = true;     // k* (tau delta)^2 <= summability_partial
  // Candidate right-hand bounds of the stopping-index estimate; the
  // literature is ambiguous about the exponent on the initial error, so
  // both are reported when the constants are supplied.
  std::optional<double> rhs_bound_unsquared;
  std::optional<double> rhs_bound_squared;
};

/**
 * Check the testable consequences of the monotonicity proposition on a
 * trace that carries error_to_truth: the error sequence is nonincreasing
 * (tolerance 1e-12 absolute) and k* (tau delta)^2 <= sum residual_F^2.
 */
inline MonotonicityReport verify_monotonicity(
    const IterationTrace& trace, std::optional<double> initial_error = {},
    std::optional<double> contraction_coefficient = {}) {
  MonotonicityReport report;
  double prev = 0.0;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& rec = trace.records[i];
    if (!rec.error_to_truth)
      throw ParameterError("verify_monotonicity: record " + std::to_string(i) +
                           " lacks error_to_truth");
    if (i > 0 && *rec.error_to_truth > prev + 1e-12 && report.monotone) {
      report.monotone = false;
      report.first_violation = i;
    }
    prev = *rec.error_to_truth;
    report.summability_partial += rec.residual_F * rec.residual_F;
  }
  const double lhs = static_cast<double>(trace.stop_index()) *
                     trace.tau_delta * trace.tau_delta;
  report.stopping_bound_ok =
      lhs <= report.summability_partial * (1.0 + 1e-12) + 1e-300;
  if (initial_error && contraction_coefficient &&
      *contraction_coefficient > 0.0) {
    report.rhs_bound_unsquared = *initial_error / *contraction_coefficient;
    report.rhs_bound_squared =
        (*initial_error * *initial_error) / *contraction_coefficient;
  }
  return report;
}

}  // namespace irlw
