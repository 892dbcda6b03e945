/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <numbers>
#include <random>

#include <irlw/grid.hpp>

namespace irlw {

/**
 * Deterministic random source: mt19937_64 with an explicit 64-bit seed and
 * a hand-rolled Box-Muller transform.  The gaussian stream depends only on
 * the standard-specified mt19937_64 sequence, not on the implementation-
 * defined std::normal_distribution, so identical seeds give identical
 * grids on any standard library.
 */
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Standard normal via Box-Muller; pairs are cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  RealGrid normal_grid(std::size_t rows, std::size_t cols,
                       double stddev = 1.0) {
    RealGrid g(rows, cols);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = stddev * normal();
    return g;
  }

  RealGrid normal_grid(Shape shape, double stddev = 1.0) {
    return normal_grid(shape.rows, shape.cols, stddev);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace irlw
