/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <irlw/grid.hpp>

namespace irlw {

inline Eigen::Map<const Eigen::MatrixXd> as_eigen(const RealGrid& g) {
  return {g.data().data(), static_cast<Eigen::Index>(g.rows()),
          static_cast<Eigen::Index>(g.cols())};
}

/// Largest singular value of the grid viewed as a rows x cols matrix.
inline double spectral_norm(const RealGrid& g) {
  if (g.empty()) throw DimensionError("spectral_norm: empty grid");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(as_eigen(g));
  return svd.singularValues()(0);
}

/**
 * Residual norms used by stopping rules and lambda schedules.  Sinogram
 * residuals in the Radon experiments are measured in the spectral norm;
 * the stacked Schlieren data in the per-angle max euclidean norm
 * max_i |col_i|_2; the convergence-theory checks use the canonical
 * (Frobenius) Hilbert norm.
 */
enum class ResidualNorm { spectral, frobenius, schlieren_inf };

/// max over columns (angles) of the euclidean column norm.
inline double max_column_norm(const RealGrid& g) {
  if (g.empty()) throw DimensionError("max_column_norm: empty grid");
  double worst = 0.0;
  for (std::size_t c = 0; c < g.cols(); ++c) {
    double sq = 0.0;
    for (std::size_t r = 0; r < g.rows(); ++r) sq += g(r, c) * g(r, c);
    worst = std::max(worst, sq);
  }
  return std::sqrt(worst);
}

inline double residual_norm(const RealGrid& g, ResidualNorm choice) {
  switch (choice) {
    case ResidualNorm::spectral:
      return spectral_norm(g);
    case ResidualNorm::frobenius:
      return frobenius_norm(g);
    case ResidualNorm::schlieren_inf:
      return max_column_norm(g);
  }
  throw ParameterError("residual_norm: unknown norm choice");
}

inline const char* to_string(ResidualNorm choice) {
  switch (choice) {
    case ResidualNorm::spectral:
      return "spectral";
    case ResidualNorm::frobenius:
      return "frobenius";
    case ResidualNorm::schlieren_inf:
      return "schlieren_inf";
  }
  return "?";
}

}  // namespace irlw
