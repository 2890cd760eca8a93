/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include "fisheye/camera.hpp"
#include "fisheye/frame.hpp"
#include "fisheye/sampling.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace fisheye {

/// Integer 2D displacement. For translational search the units are equisolid
/// pixels; for equisolid search one step is one pixel pitch applied in the
/// perspective domain. mv points from the target block to its match: the
/// compensated block reads the reference at origin + mv.
struct MotionVector {
  int dx = 0;
  int dy = 0;
};

inline bool operator==(MotionVector a, MotionVector b) { return a.dx == b.dx && a.dy == b.dy; }

struct BlockRect {
  int col = 0;
  int row = 0;
  int width = 0;
  int height = 0;
};

struct SearchConfig {
  int search_range = 128;
  int block_size = 16;
  int upsample_scale = 8;

  std::int64_t candidate_count() const {
    const std::int64_t n = 2 * static_cast<std::int64_t>(search_range) + 1;
    return n * n;
  }
  void validate() const {
    if (search_range < 1 || block_size < 1 || upsample_scale < 1)
      throw std::invalid_argument("SearchConfig: all parameters must be positive");
  }
};

struct TmeResult {
  MotionVector mv;
  std::int64_t ssd = 0;
  std::int64_t candidates = 0;  // instrumented: actual evaluation count
};

struct EmeResult {
  MotionVector mv;
  double ssd = 0.0;
  std::int64_t candidates = 0;
};

/// Exhaustive translational search over all (2R+1)^2 integer candidates.
/// Off-frame reference reads replicate the edge, so every candidate is evaluable.
/// Ties resolve to the first minimum in scan order (dy outer, dx inner, ascending from -R).
TmeResult tme_search(const LumaFrame& target, const LumaFrame& ref, BlockRect block,
                     const SearchConfig& cfg);

/// Equisolid re-projection search.
///
/// Block pixel positions are mapped to the perspective domain; each candidate is
/// added there as (dx*pitch_x, dy*pitch_y), mapped back to the equisolid domain
/// and sampled on the upsampled reference. Returns nullopt when any block pixel
/// lies at an incident angle >= 90 degrees (no perspective-domain image), which
/// callers treat as "fall back to translational". Scan order and tie rule match
/// tme_search.
std::optional<EmeResult> eme_search(const LumaFrame& target, const UpsampledReference& up_ref,
                                    BlockRect block, const CameraModel& cam,
                                    const SearchConfig& cfg);

enum class ChosenMode { Translational, Equisolid };

enum class EstimatorMode { Tme, Eme, Hybrid };

struct BlockResult {
  BlockRect rect;
  ChosenMode mode = ChosenMode::Translational;
  bool eme_valid = false;
  MotionVector mv_tme;
  double ssd_tme = 0.0;
  std::optional<MotionVector> mv_eme;
  std::optional<double> ssd_eme;
  double chosen_ssd = 0.0;
};

struct CompensationResult {
  LumaFrame compensated;
  std::vector<BlockResult> blocks;
  double total_ssd_tme = 0.0;     // sum of per-block translational SSDs
  double total_ssd_chosen = 0.0;  // sum of per-block selected SSDs
  // Translational-only compensation assembled from the same per-block search
  // results; present when requested and mode != Tme.
  std::optional<LumaFrame> tme_baseline;
};

/// Tiles the target into blocks (edge blocks keep their truncated size), runs the
/// configured searches per block and writes the winning compensated block.
/// Hybrid mode selects the lower SSD per block; ties go to translational.
/// thread_count 0 picks the hardware concurrency; results are identical for any
/// thread count.
CompensationResult hybrid_compensate(const LumaFrame& target, const LumaFrame& ref,
                                     const CameraModel& cam, const SearchConfig& cfg,
                                     EstimatorMode mode = EstimatorMode::Hybrid,
                                     bool with_tme_baseline = false, int thread_count = 0);

/// Block-aligned mode map: red (255,0,0) translational, green (0,255,0) equisolid.
RgbImage render_decision_map(const CompensationResult& result);

/// Mode map alpha-blended at 50% over a luma underlay; channels are (c + y) / 2
/// with integer truncation.
RgbImage render_decision_map(const CompensationResult& result, const LumaFrame& underlay);

}  // namespace fisheye
