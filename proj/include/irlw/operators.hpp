/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <vector>

#include <irlw/grid.hpp>

namespace irlw {

/**
 * Matrix-free linear operator between grid spaces with an exact adjoint.
 *
 * Implementations must form a true discrete adjoint pair:
 *   <apply(u), v> == <u, apply_adjoint(v)>   for all u, v,
 * up to round-off.  check_adjoint() in checks.hpp probes this.
 */
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Shape domain_shape() const = 0;
  virtual Shape range_shape() const = 0;

  virtual RealGrid apply(const RealGrid& u) const = 0;
  virtual RealGrid apply_adjoint(const RealGrid& v) const = 0;

 protected:
  void require_domain(const RealGrid& u) const {
    if (u.shape() != domain_shape())
      throw DimensionError("operator domain mismatch: got " +
                           to_string(u.shape()) + ", expected " +
                           to_string(domain_shape()));
  }
  void require_range(const RealGrid& v) const {
    if (v.shape() != range_shape())
      throw DimensionError("operator range mismatch: got " +
                           to_string(v.shape()) + ", expected " +
                           to_string(range_shape()));
  }
};

/**
 * Nonlinear operator contract used by the iteration schemes: the forward
 * map F and the derivative-adjoint action r -> F'(u)^* r, which must be
 * linear in r.
 */
class NonlinearOperator {
 public:
  virtual ~NonlinearOperator() = default;

  virtual Shape domain_shape() const = 0;
  virtual Shape range_shape() const = 0;

  virtual RealGrid apply(const RealGrid& u) const = 0;
  virtual RealGrid derivative_adjoint_apply(const RealGrid& u,
                                            const RealGrid& residual) const = 0;
};

/// View a linear operator as a (trivially) nonlinear one: F'(u) = F.
class LinearAsNonlinear final : public NonlinearOperator {
 public:
  explicit LinearAsNonlinear(const LinearOperator& op) : op_(op) {}

  Shape domain_shape() const override { return op_.domain_shape(); }
  Shape range_shape() const override { return op_.range_shape(); }

  RealGrid apply(const RealGrid& u) const override { return op_.apply(u); }

  RealGrid derivative_adjoint_apply(const RealGrid&,
                                    const RealGrid& residual) const override {
    return op_.apply_adjoint(residual);
  }

 private:
  const LinearOperator& op_;
};

/**
 * Explicit dense matrix acting on grids via their column-major
 * vectorization.  Domain and range shapes are arbitrary grid shapes whose
 * sizes match the matrix dimensions.
 */
class DenseMatrixOperator final : public LinearOperator {
 public:
  DenseMatrixOperator(Shape domain, Shape range,
                      std::vector<double> column_major_entries)
      : domain_(domain), range_(range), m_(std::move(column_major_entries)) {
    if (m_.size() != domain_.size() * range_.size())
      throw DimensionError("matrix entry count does not match shapes");
  }

  /// Square-ish convenience: n_range x n_domain matrix on column grids.
  static DenseMatrixOperator from_matrix(std::size_t n_range,
                                         std::size_t n_domain,
                                         std::vector<double> entries) {
    return DenseMatrixOperator({n_domain, 1}, {n_range, 1},
                               std::move(entries));
  }

  static DenseMatrixOperator diagonal(std::vector<double> diag) {
    const std::size_t n = diag.size();
    std::vector<double> entries(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) entries[i * n + i] = diag[i];
    return from_matrix(n, n, std::move(entries));
  }

  Shape domain_shape() const override { return domain_; }
  Shape range_shape() const override { return range_; }

  double entry(std::size_t i, std::size_t j) const {
    return m_[j * range_.size() + i];
  }

  RealGrid apply(const RealGrid& u) const override {
    require_domain(u);
    const std::size_t rows = range_.size(), cols = domain_.size();
    RealGrid out(range_);
    for (std::size_t j = 0; j < cols; ++j) {
      const double uj = u[j];
      const double* col = &m_[j * rows];
      for (std::size_t i = 0; i < rows; ++i) out[i] += col[i] * uj;
    }
    return out;
  }

  RealGrid apply_adjoint(const RealGrid& v) const override {
    require_range(v);
    const std::size_t rows = range_.size(), cols = domain_.size();
    RealGrid out(domain_);
    for (std::size_t j = 0; j < cols; ++j) {
      const double* col = &m_[j * rows];
      double sum = 0.0;
      for (std::size_t i = 0; i < rows; ++i) sum += col[i] * v[i];
      out[j] = sum;
    }
    return out;
  }

 private:
  Shape domain_;
  Shape range_;
  std::vector<double> m_;  // range_.size() x domain_.size(), column-major
};

}  // namespace irlw
