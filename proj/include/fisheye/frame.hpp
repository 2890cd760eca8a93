/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <stdexcept>

namespace fisheye {

using PlaneU8 = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using PlaneF = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using PlaneD = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Single-channel 8-bit image, row-major. The unit of all motion-estimation work.
struct LumaFrame {
  PlaneU8 samples;  // (height, width)

  LumaFrame() = default;
  LumaFrame(int width, int height, std::uint8_t fill = 0)
      : samples(PlaneU8::Constant(check_dim(height), check_dim(width), fill)) {}

  int width() const { return static_cast<int>(samples.cols()); }
  int height() const { return static_cast<int>(samples.rows()); }
  bool empty() const { return samples.size() == 0; }

  std::uint8_t at(int row, int col) const { return samples(row, col); }
  std::uint8_t& at(int row, int col) { return samples(row, col); }

  // Edge-replicated read; any integer coordinate is valid.
  std::uint8_t clamped_at(int row, int col) const {
    const int r = std::clamp(row, 0, height() - 1);
    const int c = std::clamp(col, 0, width() - 1);
    return samples(r, c);
  }

  bool same_size(const LumaFrame& other) const {
    return width() == other.width() && height() == other.height();
  }

 private:
  static int check_dim(int v) {
    if (v < 1) throw std::invalid_argument("LumaFrame: dimensions must be >= 1");
    return v;
  }
};

inline bool operator==(const LumaFrame& a, const LumaFrame& b) {
  return a.same_size(b) && (a.samples == b.samples).all();
}
inline bool operator!=(const LumaFrame& a, const LumaFrame& b) { return !(a == b); }

/// 8-bit RGB image stored as three planes.
struct RgbImage {
  PlaneU8 r, g, b;

  RgbImage() = default;
  RgbImage(int width, int height)
      : r(PlaneU8::Zero(height, width)),
        g(PlaneU8::Zero(height, width)),
        b(PlaneU8::Zero(height, width)) {}

  int width() const { return static_cast<int>(r.cols()); }
  int height() const { return static_cast<int>(r.rows()); }
};

inline bool operator==(const RgbImage& a, const RgbImage& b) {
  return a.width() == b.width() && a.height() == b.height() && (a.r == b.r).all() &&
         (a.g == b.g).all() && (a.b == b.b).all();
}

/// Round half away from zero and clamp to the 8-bit range.
inline std::uint8_t quantize_u8(double v) {
  const long q = std::lround(v);
  return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
}

}  // namespace fisheye
