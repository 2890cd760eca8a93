/* SPDX-License-Identifier: Apache-2.0 */
#include "fisheye/metrics.hpp"

#include <cmath>
#include <limits>

namespace fisheye {

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

FrameScore luma_psnr(const LumaFrame& a, const LumaFrame& b) {
  if (!a.same_size(b)) throw std::invalid_argument("luma_psnr: dimension mismatch");

  std::int64_t ssd = 0;
  const std::uint8_t* pa = a.samples.data();
  const std::uint8_t* pb = b.samples.data();
  const std::int64_t n = static_cast<std::int64_t>(a.width()) * a.height();
  for (std::int64_t i = 0; i < n; ++i) {
    const int d = static_cast<int>(pa[i]) - static_cast<int>(pb[i]);
    ssd += static_cast<std::int64_t>(d) * d;
  }

  FrameScore score;
  score.sample_count = n;
  score.mse = static_cast<double>(ssd) / static_cast<double>(n);
  score.infinite = (ssd == 0);
  score.psnr_db = psnr_from_mse(score.mse);
  return score;
}

}  // namespace fisheye
