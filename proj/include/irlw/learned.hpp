/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <irlw/grid.hpp>
#include <irlw/norms.hpp>
#include <irlw/operators.hpp>

namespace irlw {

/// Expert input/output pairs; all inputs share one shape, all outputs another.
struct TrainingSet {
  std::vector<std::pair<RealGrid, RealGrid>> pairs;

  Shape input_shape() const { return pairs.front().first.shape(); }
  Shape output_shape() const { return pairs.front().second.shape(); }
  std::size_t size() const { return pairs.size(); }

  void validate() const {
    if (pairs.empty()) throw DimensionError("training set is empty");
    for (const auto& [u, y] : pairs) {
      if (u.shape() != input_shape())
        throw DimensionError("training inputs have mixed shapes");
      if (y.shape() != output_shape())
        throw DimensionError("training outputs have mixed shapes");
    }
  }
};

/**
 * Stack the training pairs columnwise: column i of U is the column-major
 * vectorization of u^(i), likewise Y for the outputs.  U is N x n and
 * Y is M x n for n pairs.
 */
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> assemble_training_matrices(
    const TrainingSet& ts) {
  ts.validate();
  const auto n = static_cast<Eigen::Index>(ts.size());
  const auto N = static_cast<Eigen::Index>(ts.input_shape().size());
  const auto M = static_cast<Eigen::Index>(ts.output_shape().size());
  Eigen::MatrixXd U(N, n), Y(M, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [u, y] = ts.pairs[static_cast<std::size_t>(i)];
    U.col(i) = Eigen::Map<const Eigen::VectorXd>(u.data().data(), N);
    Y.col(i) = Eigen::Map<const Eigen::VectorXd>(y.data().data(), M);
  }
  return {std::move(U), std::move(Y)};
}

/**
 * The trained damping operator A = Y U+ acting between grid spaces via
 * column-major vectorization.
 *
 * U+ is the Moore-Penrose pseudoinverse with singular values below
 * tol * sigma_max truncated, so A minimizes the least-squares training
 * functional l(T) = 1/2 sum_i |T u_i - y_i|^2 (minimum-norm minimizer).
 * The operator is held in factored form (Y and U+, cheap when the pair
 * count is small), as an explicit M x N matrix, or both; apply/adjoint
 * agree between the forms up to round-off.
 */
class LearnedOperator final : public LinearOperator {
 public:
  LearnedOperator(Shape input_shape, Shape output_shape, Eigen::MatrixXd Y,
                  Eigen::MatrixXd pinv_U, std::vector<double> singular_values,
                  double truncation_tolerance)
      : input_shape_(input_shape),
        output_shape_(output_shape),
        n_pairs_(static_cast<std::size_t>(Y.cols())),
        truncation_tolerance_(truncation_tolerance),
        Y_(std::move(Y)),
        pinv_U_(std::move(pinv_U)),
        singular_values_of_U_(std::move(singular_values)) {
    if (Y_->rows() != static_cast<Eigen::Index>(output_shape_.size()) ||
        pinv_U_->cols() != static_cast<Eigen::Index>(input_shape_.size()) ||
        Y_->cols() != pinv_U_->rows())
      throw DimensionError("learned operator factor shapes are inconsistent");
  }

  static LearnedOperator from_explicit(Shape input_shape, Shape output_shape,
                                       Eigen::MatrixXd A, std::size_t n_pairs,
                                       double truncation_tolerance) {
    if (A.rows() != static_cast<Eigen::Index>(output_shape.size()) ||
        A.cols() != static_cast<Eigen::Index>(input_shape.size()))
      throw DimensionError("explicit matrix does not match grid shapes");
    LearnedOperator op(input_shape, output_shape, n_pairs,
                       truncation_tolerance);
    op.explicit_A_ = std::move(A);
    return op;
  }

  Shape domain_shape() const override { return input_shape_; }
  Shape range_shape() const override { return output_shape_; }
  std::size_t n_pairs() const { return n_pairs_; }
  double truncation_tolerance() const { return truncation_tolerance_; }
  const std::vector<double>& singular_values_of_U() const {
    return singular_values_of_U_;
  }
  bool has_factors() const { return Y_.has_value(); }
  bool has_explicit_matrix() const { return explicit_A_.has_value(); }
  const Eigen::MatrixXd& output_factor() const { return *Y_; }
  const Eigen::MatrixXd& pinv_factor() const { return *pinv_U_; }

  /// Materialize A = Y U+ (M x N); prefer the factored form when N is large.
  void make_explicit() {
    if (!explicit_A_) explicit_A_ = *Y_ * *pinv_U_;
  }
  void drop_explicit() {
    if (Y_) explicit_A_.reset();
  }
  const Eigen::MatrixXd& explicit_matrix() const {
    if (!explicit_A_)
      throw ConfigError(
          "learned operator has no explicit matrix; call make_explicit()");
    return *explicit_A_;
  }

  RealGrid apply(const RealGrid& u) const override {
    require_domain(u);
    const Eigen::Map<const Eigen::VectorXd> x(
        u.data().data(), static_cast<Eigen::Index>(u.size()));
    Eigen::VectorXd out = explicit_A_ ? Eigen::VectorXd(*explicit_A_ * x)
                                      : Eigen::VectorXd(*Y_ * (*pinv_U_ * x));
    return from_vector(out, output_shape_);
  }

  RealGrid apply_adjoint(const RealGrid& r) const override {
    require_range(r);
    const Eigen::Map<const Eigen::VectorXd> x(
        r.data().data(), static_cast<Eigen::Index>(r.size()));
    Eigen::VectorXd out = explicit_A_
                              ? Eigen::VectorXd(explicit_A_->transpose() * x)
                              : Eigen::VectorXd(pinv_U_->transpose() *
                                                (Y_->transpose() * x));
    return from_vector(out, input_shape_);
  }

 private:
  LearnedOperator(Shape input_shape, Shape output_shape, std::size_t n_pairs,
                  double truncation_tolerance)
      : input_shape_(input_shape),
        output_shape_(output_shape),
        n_pairs_(n_pairs),
        truncation_tolerance_(truncation_tolerance) {}

  static RealGrid from_vector(const Eigen::VectorXd& v, Shape shape) {
    std::vector<double> data(v.data(), v.data() + v.size());
    return RealGrid::from_data(shape.rows, shape.cols, std::move(data));
  }

  Shape input_shape_;
  Shape output_shape_;
  std::size_t n_pairs_;
  double truncation_tolerance_;
  std::optional<Eigen::MatrixXd> Y_;       // M x n
  std::optional<Eigen::MatrixXd> pinv_U_;  // n x N
  std::optional<Eigen::MatrixXd> explicit_A_;
  std::vector<double> singular_values_of_U_;
};

/**
 * Fit A = Y U+ by a thin SVD of U; singular values sigma <= tol * sigma_max
 * are treated as zero.  Grid shapes give the operator its domain and range.
 */
inline LearnedOperator train_pseudoinverse(const Eigen::MatrixXd& U,
                                           const Eigen::MatrixXd& Y,
                                           double tol, Shape input_shape,
                                           Shape output_shape) {
  if (tol < 0.0) throw ParameterError("train_pseudoinverse: tol must be >= 0");
  if (U.cols() != Y.cols())
    throw DimensionError("train_pseudoinverse: U and Y pair counts differ");
  if (U.rows() != static_cast<Eigen::Index>(input_shape.size()) ||
      Y.rows() != static_cast<Eigen::Index>(output_shape.size()))
    throw DimensionError(
        "train_pseudoinverse: matrix rows do not match shapes");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      U, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;

  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > tol * sigma_max &&
         sigma(rank) > 0.0)
    ++rank;

  // U+ = V_r diag(1/sigma_r) U_r^T, n x N.
  Eigen::MatrixXd pinv_U = svd.matrixV().leftCols(rank) *
                           sigma.head(rank).cwiseInverse().asDiagonal() *
                           svd.matrixU().leftCols(rank).transpose();

  std::vector<double> singular_values(sigma.data(),
                                      sigma.data() + sigma.size());
  return LearnedOperator(input_shape, output_shape, Y, std::move(pinv_U),
                         std::move(singular_values), tol);
}

inline LearnedOperator train_pseudoinverse(const TrainingSet& ts, double tol) {
  auto [U, Y] = assemble_training_matrices(ts);
  return train_pseudoinverse(U, Y, tol, ts.input_shape(), ts.output_shape());
}

/// 1/2 sum_i |A u_i - y_i|^2 over the training set.
inline double training_residual(const LinearOperator& A,
                                const TrainingSet& ts) {
  ts.validate();
  double sum = 0.0;
  for (const auto& [u, y] : ts.pairs) {
    const RealGrid r = A.apply(u) - y;
    sum += inner(r, r);
  }
  return 0.5 * sum;
}

struct DampingDirection {
  RealGrid direction;
  bool degenerate = false;  // residual gradient vanished; direction is zero
};

/**
 * Normalized damping direction g/|g| with g = A^T (A u - y_delta), the form
 * the numerical schemes insert per iteration.  When |g| falls below
 * 1e-14 * max(1, |y_delta|) the zero grid is returned with the degenerate
 * flag set instead of dividing by a vanishing norm.
 */
inline DampingDirection normalized_damping(const LinearOperator& A,
                                           const RealGrid& u,
                                           const RealGrid& y_delta) {
  RealGrid g = A.apply_adjoint(A.apply(u) - y_delta);
  const double norm = frobenius_norm(g);
  if (norm <= 1e-14 * std::max(1.0, frobenius_norm(y_delta)))
    return {RealGrid(g.shape()), true};
  g *= 1.0 / norm;
  return {std::move(g), false};
}

}  // namespace irlw
