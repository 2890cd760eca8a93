/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include "fisheye/frame.hpp"
#include "fisheye/projection.hpp"

#include <algorithm>
#include <cmath>

namespace fisheye {

/// Reference frame upsampled by an integer factor with separable cubic convolution.
/// Samples stay real-valued; the source lattice is preserved exactly:
/// plane(scale*r, scale*c) == source(r, c).
struct UpsampledReference {
  int scale = 1;
  int source_width = 0;
  int source_height = 0;
  PlaneF plane;  // (scale * source_height, scale * source_width)
};

/// Separable cubic convolution upsampling (Keys kernel, a = -0.5), horizontal then
/// vertical, borders handled by edge replication.
UpsampledReference upsample(const LumaFrame& frame, int scale);

/// Value at a fractional source-pixel position: rounds to the nearest 1/scale-pel
/// grid point (half away from zero) and clamps to the plane (edge replication).
inline double sample_at(const UpsampledReference& ref, PixelPos pos) {
  const long long c = std::llround(pos.col * ref.scale);
  const long long r = std::llround(pos.row * ref.scale);
  const Eigen::Index ci = std::clamp<long long>(c, 0, ref.plane.cols() - 1);
  const Eigen::Index ri = std::clamp<long long>(r, 0, ref.plane.rows() - 1);
  return static_cast<double>(ref.plane(ri, ci));
}

}  // namespace fisheye
