/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <algorithm>
#include <cstdint>

#include <irlw/operators.hpp>
#include <irlw/rng.hpp>

namespace irlw {

/**
 * Probe the adjoint identity <Au, v> = <u, A*v> with seeded random pairs.
 *
 * Returns the maximum over `trials` of
 *   |<Au, v> - <u, A*v>| / (|u| |v| + eps),
 * with eps = 1e-300 guarding the degenerate 0/0 case.  Deterministic for a
 * given seed.
 */
inline double check_adjoint(const LinearOperator& op, std::size_t trials,
                            std::uint64_t seed) {
  if (trials < 1) throw ParameterError("check_adjoint: trials must be >= 1");
  SeededRng rng(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const RealGrid u = rng.normal_grid(op.domain_shape());
    const RealGrid v = rng.normal_grid(op.range_shape());
    const double lhs = inner(op.apply(u), v);
    const double rhs = inner(u, op.apply_adjoint(v));
    const double scale = frobenius_norm(u) * frobenius_norm(v) + 1e-300;
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

/**
 * Power-method estimate of the operator norm |A|_2 = sqrt(lambda_max(A*A)).
 *
 * Returns the square root of the final Rayleigh quotient of the power
 * iteration on A*A; the estimate is nondecreasing in `iterations` and
 * deterministic for a given seed.  A zero operator yields 0.
 */
inline double estimate_operator_norm(const LinearOperator& op,
                                     std::size_t iterations,
                                     std::uint64_t seed) {
  if (iterations < 1)
    throw ParameterError("estimate_operator_norm: iterations must be >= 1");
  SeededRng rng(seed);
  RealGrid x = rng.normal_grid(op.domain_shape());
  double rayleigh = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    const double xx = inner(x, x);
    if (xx == 0.0) return 0.0;
    const RealGrid bx = op.apply_adjoint(op.apply(x));
    rayleigh = inner(x, bx) / xx;
    const double norm_bx = frobenius_norm(bx);
    if (norm_bx == 0.0) return 0.0;
    x = bx * (1.0 / norm_bx);
  }
  return std::sqrt(std::max(rayleigh, 0.0));
}

}  // namespace irlw
