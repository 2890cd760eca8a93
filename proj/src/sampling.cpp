/* SPDX-License-Identifier: Apache-2.0 */
#include "fisheye/sampling.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace fisheye {

namespace {

// Keys cubic convolution kernel, a = -0.5, evaluated at |d|.
double keys_weight(double d) {
  if (d <= 1.0) return ((1.5 * d - 2.5) * d) * d + 1.0;
  if (d < 2.0) return ((-0.5 * d + 2.5) * d - 4.0) * d + 2.0;
  return 0.0;
}

// Four-tap weights for each sub-pixel phase t = q/scale, taps at c-1 .. c+2.
std::vector<std::array<double, 4>> phase_weights(int scale) {
  std::vector<std::array<double, 4>> w(scale);
  for (int q = 0; q < scale; ++q) {
    const double t = static_cast<double>(q) / scale;
    w[q] = {keys_weight(1.0 + t), keys_weight(t), keys_weight(1.0 - t), keys_weight(2.0 - t)};
  }
  return w;
}

inline int clamp_index(int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); }

}  // namespace

UpsampledReference upsample(const LumaFrame& frame, int scale) {
  if (scale < 1) throw std::invalid_argument("upsample: scale must be >= 1");
  if (frame.empty()) throw std::invalid_argument("upsample: empty frame");

  const int w = frame.width();
  const int h = frame.height();
  const auto weights = phase_weights(scale);

  UpsampledReference out;
  out.scale = scale;
  out.source_width = w;
  out.source_height = h;

  // Horizontal pass, kept in double until the final store.
  PlaneD tmp(h, static_cast<Eigen::Index>(w) * scale);
  for (int r = 0; r < h; ++r) {
    const std::uint8_t* src = frame.samples.data() + static_cast<std::ptrdiff_t>(r) * w;
    double* dst = tmp.data() + static_cast<std::ptrdiff_t>(r) * tmp.cols();
    for (int c = 0; c < w; ++c) {
      const double s0 = src[clamp_index(c - 1, w - 1)];
      const double s1 = src[c];
      const double s2 = src[clamp_index(c + 1, w - 1)];
      const double s3 = src[clamp_index(c + 2, w - 1)];
      for (int q = 0; q < scale; ++q) {
        const auto& wq = weights[q];
        dst[static_cast<std::ptrdiff_t>(c) * scale + q] =
            wq[0] * s0 + wq[1] * s1 + wq[2] * s2 + wq[3] * s3;
      }
    }
  }

  // Vertical pass.
  out.plane.resize(static_cast<Eigen::Index>(h) * scale, tmp.cols());
  const Eigen::Index up_w = tmp.cols();
  for (int r = 0; r < h; ++r) {
    const double* t0 = tmp.data() + static_cast<std::ptrdiff_t>(clamp_index(r - 1, h - 1)) * up_w;
    const double* t1 = tmp.data() + static_cast<std::ptrdiff_t>(r) * up_w;
    const double* t2 = tmp.data() + static_cast<std::ptrdiff_t>(clamp_index(r + 1, h - 1)) * up_w;
    const double* t3 = tmp.data() + static_cast<std::ptrdiff_t>(clamp_index(r + 2, h - 1)) * up_w;
    for (int q = 0; q < scale; ++q) {
      const auto& wq = weights[q];
      float* dst =
          out.plane.data() + (static_cast<std::ptrdiff_t>(r) * scale + q) * up_w;
      for (Eigen::Index c = 0; c < up_w; ++c) {
        dst[c] = static_cast<float>(wq[0] * t0[c] + wq[1] * t1[c] + wq[2] * t2[c] +
                                    wq[3] * t3[c]);
      }
    }
  }
  return out;
}

}  // namespace fisheye
