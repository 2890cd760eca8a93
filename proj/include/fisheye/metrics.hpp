/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include "fisheye/frame.hpp"

#include <cstdint>
#include <stdexcept>

namespace fisheye {

/// Frame-level luminance error score. psnr_db carries +inf when mse == 0;
/// the `infinite` flag is the sentinel reports key off.
struct FrameScore {
  double mse = 0.0;
  double psnr_db = 0.0;
  bool infinite = false;
  std::int64_t sample_count = 0;
};

template <typename DerivedA, typename DerivedB>
double block_ssd(const Eigen::ArrayBase<DerivedA>& a, const Eigen::ArrayBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("block_ssd: shape mismatch");
  return (a.template cast<double>() - b.template cast<double>()).square().sum();
}

template <typename DerivedA, typename DerivedB>
double block_sad(const Eigen::ArrayBase<DerivedA>& a, const Eigen::ArrayBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("block_sad: shape mismatch");
  return (a.template cast<double>() - b.template cast<double>()).abs().sum();
}

/// PSNR for an 8-bit peak: 10 log10(255^2 / mse).
double psnr_from_mse(double mse);

/// Luminance PSNR over two equally sized frames.
FrameScore luma_psnr(const LumaFrame& a, const LumaFrame& b);

}  // namespace fisheye
