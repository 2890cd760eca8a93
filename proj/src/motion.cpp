/* SPDX-License-Identifier: Apache-2.0 */
#include "fisheye/motion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

namespace fisheye {

namespace {

void check_block(const LumaFrame& target, BlockRect b) {
  if (b.width < 1 || b.height < 1 || b.col < 0 || b.row < 0 ||
      b.col + b.width > target.width() || b.row + b.height > target.height())
    throw std::invalid_argument("search: block must lie fully inside the target frame");
}

std::int64_t tme_candidate_ssd(const LumaFrame& target, const LumaFrame& ref, BlockRect b,
                               int dx, int dy) {
  const int rw = ref.width();
  const int rh = ref.height();
  const int c0 = b.col + dx;
  const int r0 = b.row + dy;

  std::int64_t ssd = 0;
  if (c0 >= 0 && r0 >= 0 && c0 + b.width <= rw && r0 + b.height <= rh) {
    // Candidate window fully inside the reference.
    for (int r = 0; r < b.height; ++r) {
      const std::uint8_t* t = target.samples.data() +
                              static_cast<std::ptrdiff_t>(b.row + r) * target.width() + b.col;
      const std::uint8_t* s =
          ref.samples.data() + static_cast<std::ptrdiff_t>(r0 + r) * rw + c0;
      for (int c = 0; c < b.width; ++c) {
        const int d = static_cast<int>(t[c]) - static_cast<int>(s[c]);
        ssd += static_cast<std::int64_t>(d) * d;
      }
    }
  } else {
    for (int r = 0; r < b.height; ++r) {
      const int rr = std::clamp(r0 + r, 0, rh - 1);
      const std::uint8_t* t = target.samples.data() +
                              static_cast<std::ptrdiff_t>(b.row + r) * target.width() + b.col;
      const std::uint8_t* srow = ref.samples.data() + static_cast<std::ptrdiff_t>(rr) * rw;
      for (int c = 0; c < b.width; ++c) {
        const int cc = std::clamp(c0 + c, 0, rw - 1);
        const int d = static_cast<int>(t[c]) - static_cast<int>(srow[cc]);
        ssd += static_cast<std::int64_t>(d) * d;
      }
    }
  }
  return ssd;
}

}  // namespace

TmeResult tme_search(const LumaFrame& target, const LumaFrame& ref, BlockRect b,
                     const SearchConfig& cfg) {
  cfg.validate();
  check_block(target, b);

  const int R = cfg.search_range;
  TmeResult best;
  best.ssd = std::numeric_limits<std::int64_t>::max();
  for (int dy = -R; dy <= R; ++dy) {
    for (int dx = -R; dx <= R; ++dx) {
      const std::int64_t ssd = tme_candidate_ssd(target, ref, b, dx, dy);
      ++best.candidates;
      if (ssd < best.ssd) {
        best.ssd = ssd;
        best.mv = {dx, dy};
      }
    }
  }
  return best;
}

std::optional<EmeResult> eme_search(const LumaFrame& target, const UpsampledReference& up_ref,
                                    BlockRect b, const CameraModel& cam,
                                    const SearchConfig& cfg) {
  cfg.validate();
  check_block(target, b);
  if (target.width() != cam.image_width_px || target.height() != cam.image_height_px)
    throw std::invalid_argument("eme_search: camera resolution does not match the target frame");

  const double f = cam.focal_length_mm;
  const int n = b.width * b.height;

  // Back-project the block's pixel positions once; any pixel beyond 90 degrees
  // invalidates the whole block.
  std::vector<double> px(n), py(n);
  std::vector<std::uint8_t> tgt(n);
  int k = 0;
  for (int r = 0; r < b.height; ++r) {
    for (int c = 0; c < b.width; ++c, ++k) {
      tgt[k] = target.at(b.row + r, b.col + c);
      const SensorPoint s = pixel_to_sensor(
          PixelPos{static_cast<double>(b.col + c), static_cast<double>(b.row + r)}, cam);
      const std::optional<SensorPoint> persp = backproject_point(s, f);
      if (!persp) return std::nullopt;
      px[k] = persp->x_mm;
      py[k] = persp->y_mm;
    }
  }

  const int R = cfg.search_range;
  const double pitch_x = cam.pitch_x();
  const double pitch_y = cam.pitch_y();

  EmeResult best;
  best.ssd = std::numeric_limits<double>::infinity();
  for (int dy = -R; dy <= R; ++dy) {
    const double dy_mm = dy * pitch_y;
    for (int dx = -R; dx <= R; ++dx) {
      const double dx_mm = dx * pitch_x;
      double ssd = 0.0;
      for (int i = 0; i < n; ++i) {
        const SensorPoint eq = reproject_point(SensorPoint{px[i] + dx_mm, py[i] + dy_mm}, f);
        const double v = sample_at(up_ref, sensor_to_pixel(eq, cam));
        const double d = v - static_cast<double>(tgt[i]);
        ssd += d * d;
      }
      ++best.candidates;
      if (ssd < best.ssd) {
        best.ssd = ssd;
        best.mv = {dx, dy};
      }
    }
  }
  return best;
}

namespace {

void write_tme_block(LumaFrame& out, const LumaFrame& ref, BlockRect b, MotionVector mv) {
  for (int r = 0; r < b.height; ++r)
    for (int c = 0; c < b.width; ++c)
      out.at(b.row + r, b.col + c) = ref.clamped_at(b.row + r + mv.dy, b.col + c + mv.dx);
}

void write_eme_block(LumaFrame& out, const UpsampledReference& up_ref, BlockRect b,
                     MotionVector mv, const CameraModel& cam) {
  const double f = cam.focal_length_mm;
  const double dx_mm = mv.dx * cam.pitch_x();
  const double dy_mm = mv.dy * cam.pitch_y();
  for (int r = 0; r < b.height; ++r) {
    for (int c = 0; c < b.width; ++c) {
      const SensorPoint s = pixel_to_sensor(
          PixelPos{static_cast<double>(b.col + c), static_cast<double>(b.row + r)}, cam);
      const SensorPoint persp = *backproject_point(s, f);  // valid by selection
      const SensorPoint eq =
          reproject_point(SensorPoint{persp.x_mm + dx_mm, persp.y_mm + dy_mm}, f);
      const double v = sample_at(up_ref, sensor_to_pixel(eq, cam));
      out.at(b.row + r, b.col + c) = quantize_u8(v);
    }
  }
}

std::vector<BlockRect> tile_frame(int width, int height, int block_size) {
  std::vector<BlockRect> blocks;
  for (int row = 0; row < height; row += block_size)
    for (int col = 0; col < width; col += block_size)
      blocks.push_back({col, row, std::min(block_size, width - col),
                        std::min(block_size, height - row)});
  return blocks;
}

int resolve_thread_count(int requested, std::size_t n_blocks) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("FISHEYE_ME_THREADS")) n = std::atoi(env);
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
  }
  return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(n_blocks, 1)));
}

}  // namespace

CompensationResult hybrid_compensate(const LumaFrame& target, const LumaFrame& ref,
                                     const CameraModel& cam, const SearchConfig& cfg,
                                     EstimatorMode mode, bool with_tme_baseline,
                                     int thread_count) {
  cfg.validate();
  if (!target.same_size(ref))
    throw std::invalid_argument("hybrid_compensate: target and reference dimensions differ");
  if (target.width() != cam.image_width_px || target.height() != cam.image_height_px)
    throw std::invalid_argument("hybrid_compensate: camera resolution does not match frames");

  const bool needs_eme = mode != EstimatorMode::Tme;
  UpsampledReference up_ref;
  if (needs_eme) up_ref = upsample(ref, cfg.upsample_scale);

  const std::vector<BlockRect> blocks = tile_frame(target.width(), target.height(), cfg.block_size);
  std::vector<BlockResult> results(blocks.size());

  auto process = [&](std::size_t i) {
    const BlockRect b = blocks[i];
    BlockResult res;
    res.rect = b;

    const TmeResult tme = tme_search(target, ref, b, cfg);
    res.mv_tme = tme.mv;
    res.ssd_tme = static_cast<double>(tme.ssd);

    std::optional<EmeResult> eme;
    if (needs_eme) eme = eme_search(target, up_ref, b, cam, cfg);
    if (eme) {
      res.eme_valid = true;
      res.mv_eme = eme->mv;
      res.ssd_eme = eme->ssd;
    }

    switch (mode) {
      case EstimatorMode::Tme:
        res.mode = ChosenMode::Translational;
        break;
      case EstimatorMode::Eme:
        res.mode = res.eme_valid ? ChosenMode::Equisolid : ChosenMode::Translational;
        break;
      case EstimatorMode::Hybrid:
        // Lower SSD wins; ties go to translational.
        res.mode = (res.eme_valid && *res.ssd_eme < res.ssd_tme) ? ChosenMode::Equisolid
                                                                 : ChosenMode::Translational;
        break;
    }
    res.chosen_ssd = (res.mode == ChosenMode::Equisolid) ? *res.ssd_eme : res.ssd_tme;
    results[i] = res;
  };

  const int n_threads = resolve_thread_count(thread_count, blocks.size());
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < blocks.size(); ++i) process(i);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::size_t i = t; i < blocks.size(); i += n_threads) process(i);
      });
    }
    for (auto& w : workers) w.join();
  }

  CompensationResult out;
  out.compensated = LumaFrame(target.width(), target.height());
  for (const BlockResult& res : results) {
    if (res.mode == ChosenMode::Equisolid)
      write_eme_block(out.compensated, up_ref, res.rect, *res.mv_eme, cam);
    else
      write_tme_block(out.compensated, ref, res.rect, res.mv_tme);
    out.total_ssd_tme += res.ssd_tme;
    out.total_ssd_chosen += res.chosen_ssd;
  }
  if (with_tme_baseline && mode != EstimatorMode::Tme) {
    LumaFrame base(target.width(), target.height());
    for (const BlockResult& res : results) write_tme_block(base, ref, res.rect, res.mv_tme);
    out.tme_baseline = std::move(base);
  }
  out.blocks = std::move(results);
  return out;
}

namespace {

RgbImage paint_decision_map(const CompensationResult& result, const LumaFrame* underlay) {
  const int w = result.compensated.width();
  const int h = result.compensated.height();
  RgbImage img(w, h);
  for (const BlockResult& res : result.blocks) {
    const std::uint8_t cr = res.mode == ChosenMode::Translational ? 255 : 0;
    const std::uint8_t cg = res.mode == ChosenMode::Translational ? 0 : 255;
    for (int r = 0; r < res.rect.height; ++r) {
      for (int c = 0; c < res.rect.width; ++c) {
        const int rr = res.rect.row + r;
        const int cc = res.rect.col + c;
        if (underlay) {
          const unsigned y = underlay->at(rr, cc);
          img.r(rr, cc) = static_cast<std::uint8_t>((cr + y) / 2);
          img.g(rr, cc) = static_cast<std::uint8_t>((cg + y) / 2);
          img.b(rr, cc) = static_cast<std::uint8_t>(y / 2);
        } else {
          img.r(rr, cc) = cr;
          img.g(rr, cc) = cg;
          img.b(rr, cc) = 0;
        }
      }
    }
  }
  return img;
}

}  // namespace

RgbImage render_decision_map(const CompensationResult& result) {
  return paint_decision_map(result, nullptr);
}

RgbImage render_decision_map(const CompensationResult& result, const LumaFrame& underlay) {
  if (!underlay.same_size(result.compensated))
    throw std::invalid_argument("render_decision_map: underlay dimensions differ");
  return paint_decision_map(result, &underlay);
}

}  // namespace fisheye
