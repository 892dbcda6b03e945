/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <irlw/grid.hpp>
#include <irlw/operators.hpp>

namespace irlw {

/**
 * Parallel-beam geometry on a square pixel grid.
 *
 * The image occupies [-1, 1]^2 (pixel width 2/image_size, row 0 at the
 * top).  A ray is indexed by an angle theta in [0, pi) and a signed
 * detector offset s; detector bins are symmetric about s = 0 and cover
 * [-support_radius, support_radius].  Pixels whose center lies outside
 * the disk of radius support_radius are excluded from every ray.
 */
struct RadonGeometry {
  std::size_t image_size = 0;
  std::vector<double> angles;  // radians, strictly increasing, in [0, pi)
  std::size_t detector_bins = 0;
  double detector_spacing = 0.0;  // s units per bin
  double support_radius = std::numbers::sqrt2;

  /// Equally spaced angles theta_i = i*pi/n_angles, bins covering [-r, r].
  static RadonGeometry parallel(std::size_t image_size, std::size_t n_angles,
                                std::size_t bins,
                                double support_radius = std::numbers::sqrt2) {
    RadonGeometry g;
    g.image_size = image_size;
    g.angles.resize(n_angles);
    for (std::size_t i = 0; i < n_angles; ++i)
      g.angles[i] = static_cast<double>(i) * std::numbers::pi /
                    static_cast<double>(n_angles);
    g.detector_bins = bins;
    g.support_radius = support_radius;
    g.detector_spacing = 2.0 * support_radius / static_cast<double>(bins);
    g.validate();
    return g;
  }

  double pixel_width() const {
    return 2.0 / static_cast<double>(image_size);
  }

  /// Signed distance of bin j's center from the origin.
  double s_center(std::size_t bin) const {
    return (static_cast<double>(bin) -
            0.5 * static_cast<double>(detector_bins - 1)) *
           detector_spacing;
  }

  Shape image_shape() const { return {image_size, image_size}; }
  Shape sinogram_shape() const { return {detector_bins, angles.size()}; }

  void validate() const {
    if (image_size == 0) throw ParameterError("geometry: image_size == 0");
    if (angles.empty()) throw ParameterError("geometry: no angles");
    if (detector_bins == 0) throw ParameterError("geometry: no detector bins");
    if (!(detector_spacing > 0.0))
      throw ParameterError("geometry: detector_spacing must be positive");
    if (!(support_radius > 0.0))
      throw ParameterError("geometry: support_radius must be positive");
    for (std::size_t i = 0; i < angles.size(); ++i) {
      if (!(angles[i] >= 0.0 && angles[i] < std::numbers::pi))
        throw ParameterError("geometry: angle outside [0, pi)");
      if (i > 0 && !(angles[i] > angles[i - 1]))
        throw ParameterError("geometry: angles must be strictly increasing");
    }
  }

  /// 1 for pixels whose center lies inside the support disk.
  std::vector<std::uint8_t> support_mask() const {
    const std::size_t n = image_size;
    const double w = pixel_width();
    const double r2 = support_radius * support_radius;
    std::vector<std::uint8_t> mask(n * n);
    for (std::size_t c = 0; c < n; ++c) {
      const double x = -1.0 + (static_cast<double>(c) + 0.5) * w;
      for (std::size_t r = 0; r < n; ++r) {
        const double y = 1.0 - (static_cast<double>(r) + 0.5) * w;
        mask[c * n + r] = (x * x + y * y <= r2) ? 1 : 0;
      }
    }
    return mask;
  }
};

namespace detail {

/**
 * Visit the interpolation weights of one ray.
 *
 * The image is the bilinear interpolant of the pixel values (zero-padded
 * beyond the outermost pixel centers).  Along the ray the interpolant is
 * piecewise quadratic with breakpoints where the ray crosses a pixel-center
 * line, so two-point Gauss quadrature per segment integrates it exactly.
 * The visitor receives (row, col, weight) with
 *   integral = sum weight * pixel(row, col),
 * one fixed deterministic enumeration per ray; forward gathers and adjoint
 * scatters the identical pattern, which makes the pair exactly adjoint.
 */
template <class Visitor>
void for_each_ray_weight(const RadonGeometry& geom, double theta, double s,
                         const std::vector<std::uint8_t>& mask,
                         std::vector<double>& scratch, Visitor&& visit) {
  const std::size_t n = geom.image_size;
  const double w = geom.pixel_width();
  const double E = 1.0 + 0.5 * w;  // outermost breakline; f == 0 beyond
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  // p(t) = (s*ct - t*st, s*st + t*ct)

  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  const auto clip_slab = [&](double pos, double dir) {
    if (dir == 0.0) {
      if (std::abs(pos) > E) t_lo = t_hi = 0.0;  // empty
      return;
    }
    const double ta = (-E - pos) / dir;
    const double tb = (E - pos) / dir;
    t_lo = std::max(t_lo, std::min(ta, tb));
    t_hi = std::min(t_hi, std::max(ta, tb));
  };
  clip_slab(s * ct, -st);
  clip_slab(s * st, ct);
  if (!(t_hi - t_lo > 1e-14)) return;

  scratch.clear();
  scratch.push_back(t_lo);
  scratch.push_back(t_hi);
  for (std::size_t j = 0; j <= n + 1; ++j) {
    const double q = -1.0 + (static_cast<double>(j) - 0.5) * w;
    if (st != 0.0) {
      const double t = (s * ct - q) / st;
      if (t > t_lo && t < t_hi) scratch.push_back(t);
    }
    if (ct != 0.0) {
      const double t = (q - s * st) / ct;
      if (t > t_lo && t < t_hi) scratch.push_back(t);
    }
  }
  std::sort(scratch.begin(), scratch.end());

  constexpr double kInvSqrt3 = 0.57735026918962576;
  for (std::size_t seg = 0; seg + 1 < scratch.size(); ++seg) {
    const double a = scratch[seg];
    const double b = scratch[seg + 1];
    const double half = 0.5 * (b - a);
    if (half <= 1e-15) continue;
    const double mid = 0.5 * (a + b);
    const double off = half * kInvSqrt3;
    for (int gp = 0; gp < 2; ++gp) {
      const double t = gp == 0 ? mid - off : mid + off;
      const double x = s * ct - t * st;
      const double y = s * st + t * ct;
      const double cx = (x + 1.0) / w - 0.5;
      const double cy = (1.0 - y) / w - 0.5;
      const double fi = std::floor(cx);
      const double fj = std::floor(cy);
      const double fx = cx - fi;
      const double fy = cy - fj;
      const long i0 = static_cast<long>(fi);
      const long j0 = static_cast<long>(fj);
      for (int dj = 0; dj < 2; ++dj) {
        const long row = j0 + dj;
        if (row < 0 || row >= static_cast<long>(n)) continue;
        const double wy = dj == 0 ? 1.0 - fy : fy;
        for (int di = 0; di < 2; ++di) {
          const long col = i0 + di;
          if (col < 0 || col >= static_cast<long>(n)) continue;
          if (!mask[static_cast<std::size_t>(col) * n +
                    static_cast<std::size_t>(row)])
            continue;
          const double wx = di == 0 ? 1.0 - fx : fx;
          visit(static_cast<std::size_t>(row), static_cast<std::size_t>(col),
                half * wx * wy);
        }
      }
    }
  }
}

}  // namespace detail

/**
 * Discrete parallel-beam Radon transform: entry (j, i) is the line integral
 * of the image along x . phi(theta_i) = s_j.  Linear in the image.
 */
inline RealGrid radon_forward(const RealGrid& image,
                              const RadonGeometry& geom) {
  geom.validate();
  if (image.shape() != geom.image_shape())
    throw DimensionError("radon_forward: image is " + to_string(image.shape()) +
                         ", geometry expects " +
                         to_string(geom.image_shape()));
  const auto mask = geom.support_mask();
  RealGrid sino(geom.sinogram_shape());
  std::vector<double> scratch;
  scratch.reserve(2 * geom.image_size + 8);
  for (std::size_t ai = 0; ai < geom.angles.size(); ++ai) {
    for (std::size_t bin = 0; bin < geom.detector_bins; ++bin) {
      double sum = 0.0;
      detail::for_each_ray_weight(
          geom, geom.angles[ai], geom.s_center(bin), mask, scratch,
          [&](std::size_t r, std::size_t c, double wgt) {
            sum += wgt * image(r, c);
          });
      sino(bin, ai) = sum;
    }
  }
  return sino;
}

/**
 * Exact discrete transpose of radon_forward (unfiltered backprojection):
 * scatters each sinogram entry back along its ray with the forward weights.
 */
inline RealGrid radon_adjoint(const RealGrid& sino, const RadonGeometry& geom) {
  geom.validate();
  if (sino.shape() != geom.sinogram_shape())
    throw DimensionError("radon_adjoint: sinogram is " +
                         to_string(sino.shape()) + ", geometry expects " +
                         to_string(geom.sinogram_shape()));
  const auto mask = geom.support_mask();
  RealGrid image(geom.image_shape());
  std::vector<double> scratch;
  scratch.reserve(2 * geom.image_size + 8);
  for (std::size_t ai = 0; ai < geom.angles.size(); ++ai) {
    for (std::size_t bin = 0; bin < geom.detector_bins; ++bin) {
      const double value = sino(bin, ai);
      if (value == 0.0) continue;
      detail::for_each_ray_weight(
          geom, geom.angles[ai], geom.s_center(bin), mask, scratch,
          [&](std::size_t r, std::size_t c, double wgt) {
            image(r, c) += wgt * value;
          });
    }
  }
  return image;
}

/// The Radon pair as a reusable linear operator.
class RadonOperator final : public LinearOperator {
 public:
  explicit RadonOperator(RadonGeometry geom) : geom_(std::move(geom)) {
    geom_.validate();
  }

  const RadonGeometry& geometry() const { return geom_; }

  Shape domain_shape() const override { return geom_.image_shape(); }
  Shape range_shape() const override { return geom_.sinogram_shape(); }

  RealGrid apply(const RealGrid& u) const override {
    return radon_forward(u, geom_);
  }
  RealGrid apply_adjoint(const RealGrid& v) const override {
    return radon_adjoint(v, geom_);
  }

 private:
  RadonGeometry geom_;
};

}  // namespace irlw
