/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <functional>
#include <utility>

#include <irlw/operators.hpp>
#include <irlw/radon.hpp>

namespace irlw {

/**
 * Schlieren forward map: per recording direction the square of the Radon
 * transform, F_i(u) = (R_i u)^2, stacked as a bins x angles grid.  Entries
 * are nonnegative and F(-u) = F(u) exactly (the sign ambiguity of the
 * model).  Geometry convention: support radius 1, s in [-1, 1].
 */
inline RealGrid schlieren_forward(const RealGrid& u,
                                  const RadonGeometry& geom) {
  RealGrid values = radon_forward(u, geom);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] *= values[i];
  return values;
}

/**
 * Gradient direction of the iteration schemes for the Schlieren operator:
 *   sum_i R_i^* ( R_i(u) .* residual_i ),
 * linear in the residual.  The analytic derivative F_i'(u)h = 2 R_i(u) R_i(h)
 * carries a factor 2 that the displayed update formulas absorb into the
 * relaxation parameter; this function follows the schemes and omits it
 * (schlieren_gradient_check uses the analytically exact form).
 */
inline RealGrid schlieren_derivative_adjoint(const RealGrid& u,
                                             const RealGrid& residual,
                                             const RadonGeometry& geom) {
  if (residual.shape() != geom.sinogram_shape())
    throw DimensionError("schlieren residual is " + to_string(residual.shape()) +
                         ", geometry expects " +
                         to_string(geom.sinogram_shape()));
  const RealGrid ru = radon_forward(u, geom);
  return radon_adjoint(hadamard(ru, residual), geom);
}

struct GradientCheckResult {
  double error = 0.0;
  bool absolute = false;  // set when the reference direction vanished
};

/**
 * Central-difference probe of F'(u)h = 2 R(u) .* R(h): returns
 *   |(F(u+step h) - F(u-step h)) / (2 step) - 2 R(u) .* R(h)| / |...|.
 * F is exactly quadratic, so the central difference equals the analytic
 * derivative up to round-off for any step.  A vanishing reference switches
 * the result to the flagged absolute error.
 */
inline GradientCheckResult schlieren_gradient_check(const RealGrid& u,
                                                    const RealGrid& h,
                                                    double step,
                                                    const RadonGeometry& geom) {
  if (!(step > 0.0))
    throw ParameterError("schlieren_gradient_check: step must be positive");
  RealGrid analytic = hadamard(radon_forward(u, geom), radon_forward(h, geom));
  analytic *= 2.0;

  RealGrid up = u;
  up.axpy(step, h);
  RealGrid um = u;
  um.axpy(-step, h);
  RealGrid diff = schlieren_forward(up, geom) - schlieren_forward(um, geom);
  diff *= 1.0 / (2.0 * step);

  diff -= analytic;
  const double denom = frobenius_norm(analytic);
  if (denom == 0.0) return {frobenius_norm(diff), true};
  return {frobenius_norm(diff) / denom, false};
}

/**
 * The stacked Schlieren operator as a solver contract.  The adjoint in the
 * continuous model includes an (I - Laplace) smoothing solve; the schemes
 * run without it, so the default post-processing hook is the identity.  A
 * custom hook (e.g. a future H1 smoother) may be installed.
 */
class SchlierenOperator final : public NonlinearOperator {
 public:
  using SmoothingHook = std::function<RealGrid(const RealGrid&)>;

  explicit SchlierenOperator(RadonGeometry geom) : geom_(std::move(geom)) {
    geom_.validate();
  }

  const RadonGeometry& geometry() const { return geom_; }

  void set_smoothing_hook(SmoothingHook hook) { hook_ = std::move(hook); }

  Shape domain_shape() const override { return geom_.image_shape(); }
  Shape range_shape() const override { return geom_.sinogram_shape(); }

  RealGrid apply(const RealGrid& u) const override {
    return schlieren_forward(u, geom_);
  }

  RealGrid derivative_adjoint_apply(const RealGrid& u,
                                    const RealGrid& residual) const override {
    RealGrid g = schlieren_derivative_adjoint(u, residual, geom_);
    return hook_ ? hook_(g) : g;
  }

 private:
  RadonGeometry geom_;
  SmoothingHook hook_;
};

}  // namespace irlw
