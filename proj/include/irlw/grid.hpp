/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <irlw/errors.hpp>

namespace irlw {

/// Extent of a grid: rows x cols.
struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const noexcept { return rows * cols; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

inline std::string to_string(const Shape& s) {
  return std::to_string(s.rows) + "x" + std::to_string(s.cols);
}

/**
 * Dense real-valued grid over 64-bit floats.
 *
 * Entries are stored contiguously in column-major order, so the flat view
 * (data(), operator[]) is exactly the column-major vectorization used to
 * stack grids into training matrices.  Images live on (rows, cols) pixel
 * grids; sinograms on (detector bins, angles).
 */
class RealGrid {
 public:
  RealGrid() = default;

  RealGrid(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  explicit RealGrid(Shape shape, double value = 0.0)
      : RealGrid(shape.rows, shape.cols, value) {}

  /// Takes ownership of `data`, interpreted column-major.
  static RealGrid from_data(std::size_t rows, std::size_t cols,
                            std::vector<double> data) {
    if (data.size() != rows * cols)
      throw DimensionError("grid data length " + std::to_string(data.size()) +
                           " does not match shape " +
                           to_string(Shape{rows, cols}));
    RealGrid g;
    g.rows_ = rows;
    g.cols_ = cols;
    g.data_ = std::move(data);
    return g;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  Shape shape() const noexcept { return {rows_, cols_}; }

  double& operator()(std::size_t r, std::size_t c) noexcept {
    return data_[c * rows_ + r];
  }
  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[c * rows_ + r];
  }

  /// Flat column-major element access (the vectorization order).
  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  void fill(double value) { data_.assign(data_.size(), value); }

  RealGrid& operator+=(const RealGrid& other) {
    require_same_shape(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }

  RealGrid& operator-=(const RealGrid& other) {
    require_same_shape(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
  }

  RealGrid& operator*=(double alpha) {
    for (double& x : data_) x *= alpha;
    return *this;
  }

  /// this += alpha * other.
  RealGrid& axpy(double alpha, const RealGrid& other) {
    require_same_shape(other);
    for (std::size_t i = 0; i < data_.size(); ++i)
      data_[i] += alpha * other.data_[i];
    return *this;
  }

  friend RealGrid operator+(RealGrid a, const RealGrid& b) { return a += b; }
  friend RealGrid operator-(RealGrid a, const RealGrid& b) { return a -= b; }
  friend RealGrid operator*(RealGrid a, double alpha) { return a *= alpha; }
  friend RealGrid operator*(double alpha, RealGrid a) { return a *= alpha; }

  friend bool operator==(const RealGrid&, const RealGrid&) = default;

  void require_same_shape(const RealGrid& other) const {
    if (shape() != other.shape())
      throw DimensionError("grid shape mismatch: " + to_string(shape()) +
                           " vs " + to_string(other.shape()));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Hilbert inner product <u, v> = sum_i u_i v_i.
inline double inner(const RealGrid& u, const RealGrid& v) {
  u.require_same_shape(v);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * v[i];
  return sum;
}

/// Canonical Hilbert norm sqrt(<u, u>).
inline double frobenius_norm(const RealGrid& u) {
  return std::sqrt(inner(u, u));
}

/// Elementwise product a .* b.
inline RealGrid hadamard(const RealGrid& a, const RealGrid& b) {
  a.require_same_shape(b);
  RealGrid out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

inline double max_abs(const RealGrid& u) {
  double m = 0.0;
  for (double x : u.data()) m = std::max(m, std::abs(x));
  return m;
}

inline bool all_finite(const RealGrid& u) {
  for (double x : u.data())
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace irlw
