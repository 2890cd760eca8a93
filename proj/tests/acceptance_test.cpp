/* SPDX-License-Identifier: Apache-2.0 */
// Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.

#include "fisheye/io.hpp"
#include "fisheye/metrics.hpp"
#include "fisheye/motion.hpp"
#include "fisheye/synth.hpp"

#include <json.hpp>

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fisheye;
namespace fs = std::filesystem;

namespace {

struct Checker {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

LumaFrame random_frame(int w, int h, std::uint64_t seed) {
  LumaFrame f(w, h);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> v(0, 255);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) f.at(r, c) = static_cast<std::uint8_t>(v(rng));
  return f;
}

SearchConfig cfg_with(int range, int block) {
  SearchConfig cfg;
  cfg.search_range = range;
  cfg.block_size = block;
  cfg.upsample_scale = 8;
  return cfg;
}

// Shared synthetic fixtures: 256x256 circular-preset pairs whose motion is an
// exact translation in the perspective domain.
struct Fixture {
  CameraModel cam = CameraModel::circular(256, 256);
  std::vector<std::pair<LumaFrame, LumaFrame>> pairs;  // (reference, target)

  Fixture() {
    for (const auto& [sx, sy] : {std::pair{5.0, 0.0}, std::pair{3.0, 2.0},
                                 std::pair{2.5, -1.25}}) {
      PlanarScene scene;
      scene.texture = make_sine_texture(2048, 2048);
      scene.texture_pitch = cam.pitch_x() / cam.focal_length_mm;
      scene.depth_mm = 1000.0;
      set_shift_in_steps(scene, cam, sx, sy);
      pairs.emplace_back(render_equisolid(scene, cam, 0), render_equisolid(scene, cam, 1));
    }
  }
};

// Minimum sensor radius over the block's pixel centers (separable over the grid).
double block_min_radius(const BlockRect& b, const CameraModel& cam) {
  double min_ax = 1e30, min_ay = 1e30;
  for (int c = b.col; c < b.col + b.width; ++c)
    min_ax = std::min(min_ax,
                      std::abs((c - 0.5 * (cam.image_width_px - 1)) * cam.pitch_x()));
  for (int r = b.row; r < b.row + b.height; ++r)
    min_ay = std::min(min_ay,
                      std::abs((r - 0.5 * (cam.image_height_px - 1)) * cam.pitch_y()));
  return std::sqrt(min_ax * min_ax + min_ay * min_ay);
}

// ---------------------------------------------------------------------------

void criterion_1_round_trip(Checker& chk) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> focal(0.3, 30.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double f = focal(rng);
    const double r = unit(rng) * f * kSqrt2 * (1.0 - 1e-6);
    const auto rp = equisolid_to_perspective(r, f);
    if (!rp) {
      chk.require(false, "domain exceeded inside the stated range");
      return;
    }
    worst = std::max(worst, std::abs(perspective_to_equisolid(*rp, f) - r));
    const double re = perspective_to_equisolid(r, f);
    const auto back = equisolid_to_perspective(re, f);
    if (!back) {
      chk.require(false, "inverse composition left the domain");
      return;
    }
    worst = std::max(worst, std::abs(*back - r));
  }
  const double elapsed = seconds_since(t0);
  chk.require(worst < 1e-9, "worst round-trip error " + std::to_string(worst) + " mm");
  chk.require(elapsed < 1.0, "runtime " + std::to_string(elapsed) + " s exceeds 1 s");
}

void criterion_2_sensor_consistency(Checker& chk) {
  const double r = equisolid_radius(deg_to_rad(92.5), 1.8);
  chk.require(r >= 2.59 && r <= 2.61,
              "equisolid_radius(92.5 deg, 1.8 mm) = " + std::to_string(r));
}

void criterion_3_candidate_count(Checker& chk, const Fixture& fx) {
  const auto t0 = std::chrono::steady_clock::now();
  const SearchConfig cfg = cfg_with(128, 16);
  const BlockRect center{120, 120, 16, 16};
  const LumaFrame& ref = fx.pairs[0].first;
  const LumaFrame& target = fx.pairs[0].second;

  const TmeResult tme = tme_search(target, ref, center, cfg);
  chk.require(tme.candidates == 66049,
              "TME evaluated " + std::to_string(tme.candidates) + " candidates");

  const UpsampledReference up = upsample(ref, cfg.upsample_scale);
  const auto eme = eme_search(target, up, center, fx.cam, cfg);
  chk.require(eme.has_value(), "center block unexpectedly invalid");
  if (eme)
    chk.require(eme->candidates == 66049,
                "EME evaluated " + std::to_string(eme->candidates) + " candidates");
  const double elapsed = seconds_since(t0);
  chk.require(elapsed < 5.0, "runtime " + std::to_string(elapsed) + " s exceeds 5 s");
}

void criterion_4_dominance(Checker& chk, const Fixture& fx,
                           std::vector<CompensationResult>& block16_results) {
  for (std::size_t p = 0; p < fx.pairs.size(); ++p) {
    for (const int block_size : {8, 16}) {
      const CompensationResult res =
          hybrid_compensate(fx.pairs[p].second, fx.pairs[p].first, fx.cam,
                            cfg_with(16, block_size), EstimatorMode::Hybrid, true);
      const std::string tag =
          "pair " + std::to_string(p) + " block " + std::to_string(block_size);
      chk.require(res.total_ssd_chosen <= res.total_ssd_tme, tag + ": SSD dominance violated");
      for (const BlockResult& b : res.blocks)
        if (b.chosen_ssd > b.ssd_tme) {
          chk.require(false, tag + ": per-block dominance violated");
          break;
        }
      // PSNR from the exact SSD totals: monotone in the SSD, so >= holds with
      // tolerance zero.
      const double n = 256.0 * 256.0;
      const double psnr_hme = psnr_from_mse(res.total_ssd_chosen / n);
      const double psnr_tme = psnr_from_mse(res.total_ssd_tme / n);
      chk.require(psnr_hme >= psnr_tme, tag + ": PSNR(HME) < PSNR(TME)");
      if (block_size == 16) block16_results.push_back(res);
    }
  }
}

void criterion_5_oracle_recovery(Checker& chk, const Fixture& fx) {
  const auto t0 = std::chrono::steady_clock::now();
  const LumaFrame& ref = fx.pairs[0].first;     // shift (5, 0) candidate steps
  const LumaFrame& target = fx.pairs[0].second;
  const SearchConfig cfg = cfg_with(16, 16);
  const UpsampledReference up = upsample(ref, cfg.upsample_scale);

  const BlockRect centers[4] = {
      {112, 112, 16, 16}, {128, 112, 16, 16}, {112, 128, 16, 16}, {128, 128, 16, 16}};
  for (const BlockRect& b : centers) {
    const auto res = eme_search(target, up, b, fx.cam, cfg);
    if (!res) {
      chk.require(false, "center block invalid");
      continue;
    }
    chk.require(res->mv == MotionVector{5, 0},
                "recovered mv (" + std::to_string(res->mv.dx) + "," +
                    std::to_string(res->mv.dy) + ") != (5,0)");
    // Mean absolute residual of the winning candidate, real-valued samples.
    const double dx_mm = res->mv.dx * fx.cam.pitch_x();
    const double dy_mm = res->mv.dy * fx.cam.pitch_y();
    double abs_err = 0.0;
    for (int r = 0; r < b.height; ++r) {
      for (int c = 0; c < b.width; ++c) {
        const SensorPoint s = pixel_to_sensor(
            PixelPos{static_cast<double>(b.col + c), static_cast<double>(b.row + r)}, fx.cam);
        const SensorPoint persp = *backproject_point(s, fx.cam.focal_length_mm);
        const SensorPoint eq = reproject_point({persp.x_mm + dx_mm, persp.y_mm + dy_mm},
                                               fx.cam.focal_length_mm);
        const double v = sample_at(up, sensor_to_pixel(eq, fx.cam));
        abs_err += std::abs(v - target.at(b.row + r, b.col + c));
      }
    }
    const double mean_err = abs_err / (b.width * b.height);
    chk.require(mean_err <= 1.0, "mean |error| " + std::to_string(mean_err) + " > 1.0");
  }
  const double elapsed = seconds_since(t0);
  chk.require(elapsed < 60.0, "runtime " + std::to_string(elapsed) + " s exceeds 60 s");
}

void criterion_6_brute_force(Checker& chk) {
  const SearchConfig cfg = cfg_with(4, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const LumaFrame target = random_frame(24, 24, 9000 + 2 * trial);
    const LumaFrame ref = random_frame(24, 24, 9001 + 2 * trial);
    for (int row = 0; row < 24; row += 8) {
      for (int col = 0; col < 24; col += 8) {
        const BlockRect b{col, row, 8, 8};
        const TmeResult got = tme_search(target, ref, b, cfg);
        // Independent naive oracle with its own clamped reads.
        MotionVector best_mv{0, 0};
        std::int64_t best = -1;
        for (int dy = -4; dy <= 4; ++dy) {
          for (int dx = -4; dx <= 4; ++dx) {
            std::int64_t ssd = 0;
            for (int r = 0; r < 8; ++r)
              for (int c = 0; c < 8; ++c) {
                const int rr = std::min(std::max(row + r + dy, 0), 23);
                const int cc = std::min(std::max(col + c + dx, 0), 23);
                const int d = static_cast<int>(target.at(row + r, col + c)) -
                              static_cast<int>(ref.at(rr, cc));
                ssd += static_cast<std::int64_t>(d) * d;
              }
            if (best < 0 || ssd < best) {
              best = ssd;
              best_mv = {dx, dy};
            }
          }
        }
        if (!(got.mv == best_mv) || got.ssd != best) {
          chk.require(false, "trial " + std::to_string(trial) + " block (" +
                                 std::to_string(col) + "," + std::to_string(row) +
                                 ") disagrees with the oracle");
          return;
        }
      }
    }
  }
}

void criterion_7_zero_motion(Checker& chk, const Fixture& fx) {
  const LumaFrame& frame = fx.pairs[0].second;
  const CompensationResult res = hybrid_compensate(frame, frame, fx.cam, cfg_with(16, 16));
  chk.require(res.compensated == frame, "compensated frame differs bit-wise");
  for (const BlockResult& b : res.blocks)
    if (b.mode != ChosenMode::Translational) {
      chk.require(false, "non-translational block under the tie rule");
      break;
    }
  const FrameScore score = luma_psnr(res.compensated, frame);
  chk.require(score.infinite && std::isinf(score.psnr_db), "PSNR sentinel not infinite");
}

void criterion_8_peripheral_invalidation(Checker& chk, const Fixture& fx,
                                         const std::vector<CompensationResult>& block16) {
  if (block16.empty()) {
    chk.require(false, "no hybrid results available");
    return;
  }
  const CompensationResult& res = block16.front();
  const RgbImage map = render_decision_map(res);
  const double limit = fx.cam.focal_length_mm * kSqrt2;
  int outside_blocks = 0;
  for (const BlockResult& b : res.blocks) {
    if (block_min_radius(b.rect, fx.cam) < limit) continue;
    ++outside_blocks;
    chk.require(!b.eme_valid, "peripheral block not invalid for EME");
    chk.require(b.mode == ChosenMode::Translational, "peripheral block not translational");
    for (int r = b.rect.row; r < b.rect.row + b.rect.height; ++r)
      for (int c = b.rect.col; c < b.rect.col + b.rect.width; ++c)
        if (map.r(r, c) != 255 || map.g(r, c) != 0 || map.b(r, c) != 0) {
          chk.require(false, "peripheral block not red in the decision map");
          r = 1 << 29;
          break;
        }
  }
  chk.require(outside_blocks > 0, "no block lies fully outside the 90-degree circle");
}

void criterion_9_desk_scale_gain(Checker& chk, const Fixture& fx,
                                 const std::vector<CompensationResult>& block16,
                                 double& delta_out) {
  if (block16.empty() || !block16.front().tme_baseline) {
    chk.require(false, "no hybrid result with TME baseline");
    return;
  }
  const CompensationResult& res = block16.front();  // pair 0, block 16, R=16
  const LumaFrame& target = fx.pairs[0].second;
  const FrameScore hme = luma_psnr(res.compensated, target);
  const FrameScore tme = luma_psnr(*res.tme_baseline, target);
  chk.require(!hme.infinite && !tme.infinite, "unexpected infinite PSNR");
  const double delta = hme.psnr_db - tme.psnr_db;
  delta_out = delta;
  chk.require(delta >= 0.3, "gain " + std::to_string(delta) + " dB below 0.3 dB");
}

void criterion_10_io_round_trips(Checker& chk, const Fixture& fx,
                                 const std::vector<CompensationResult>& block16,
                                 double delta_db) {
  const fs::path dir =
      fs::temp_directory_path() / ("fisheye_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  const LumaFrame frame = random_frame(32, 24, 777);

  const std::string pgm = (dir / "f.pgm").string();
  write_frame_pgm(frame, pgm);
  chk.require(read_frame_pgm(pgm) == frame, "PGM round trip failed");

  const std::string png = (dir / "f.png").string();
  write_frame_png(frame, png);
  chk.require(read_frame_png(png) == frame, "PNG round trip failed");

  const std::string y4m = (dir / "f.y4m").string();
  {
    Y4mWriter writer(y4m, 32, 24, 25, 1, true);
    writer.write_frame(frame);
    writer.write_frame(frame);
  }
  auto reader = open_sequence(y4m);
  const auto f0 = reader->next();
  const auto f1 = reader->next();
  chk.require(f0 && *f0 == frame && f1 && *f1 == frame && !reader->next(),
              "Y4M round trip failed");

  // Report from the real block-16 run on pair 0.
  if (!block16.empty() && block16.front().tme_baseline) {
    const CompensationResult& res = block16.front();
    const LumaFrame& target = fx.pairs[0].second;
    RunReport report;
    report.config = {fx.cam.focal_length_mm, fx.cam.sensor_width_mm, fx.cam.sensor_height_mm,
                     256, 256, fx.cam.fov_deg, 16, 16, 8, "hybrid", "acceptance"};
    PairEntry p;
    p.pair_index = 0;
    p.reference_frame = 0;
    p.target_frame = 1;
    const FrameScore t = luma_psnr(*res.tme_baseline, target);
    const FrameScore h = luma_psnr(res.compensated, target);
    p.tme = PsnrEntry{t.psnr_db, t.infinite};
    p.hme = PsnrEntry{h.psnr_db, h.infinite};
    p.delta_db = h.psnr_db - t.psnr_db;
    report.pairs.push_back(p);
    report.compute_averages();

    const std::string path = (dir / "report.json").string();
    write_report(report, path, false);
    std::ifstream in(path);
    const auto j = nlohmann::json::parse(in);
    const double jt = j["pairs"][0]["tme"]["psnr_db"].get<double>();
    const double jh = j["pairs"][0]["hme"]["psnr_db"].get<double>();
    const double jd = j["pairs"][0]["delta_db"].get<double>();
    chk.require(std::abs(jd - (jh - jt)) <= 1e-4, "report delta inconsistent with PSNR fields");
    chk.require(std::abs(jd - delta_db) <= 1e-3, "report delta far from measured delta");
  } else {
    chk.require(false, "no hybrid result for the report check");
  }

  std::error_code ec;
  fs::remove_all(dir, ec);
}

}  // namespace

int main() {
  int failures = 0;
  Fixture fx;
  std::vector<CompensationResult> block16;
  double delta_db = 0.0;

  const std::vector<std::pair<std::string, std::function<void(Checker&)>>> criteria = {
      {"projection round-trip within 1e-9 mm (10k samples, < 1 s)",
       [&](Checker& c) { criterion_1_round_trip(c); }},
      {"sensor consistency: equisolid radius at 92.5 deg in [2.59, 2.61] mm",
       [&](Checker& c) { criterion_2_sensor_consistency(c); }},
      {"both searches evaluate exactly 66049 candidates at R=128 (< 5 s)",
       [&](Checker& c) { criterion_3_candidate_count(c, fx); }},
      {"structural dominance: PSNR(HME) >= PSNR(TME) on every pair, blocks 8/16",
       [&](Checker& c) { criterion_4_dominance(c, fx, block16); }},
      {"oracle recovery: center blocks return mv (5,0), mean |error| <= 1.0 (< 60 s)",
       [&](Checker& c) { criterion_5_oracle_recovery(c, fx); }},
      {"brute-force equivalence on 50 random frames (R=4, block 8)",
       [&](Checker& c) { criterion_6_brute_force(c); }},
      {"zero-motion identity: bit-exact, all translational, infinite PSNR",
       [&](Checker& c) { criterion_7_zero_motion(c, fx); }},
      {"peripheral blocks beyond 90 deg invalid for EME and red in the map",
       [&](Checker& c) { criterion_8_peripheral_invalidation(c, fx, block16); }},
      {"desk-scale directional gain: HME - TME >= 0.3 dB at block 16",
       [&](Checker& c) { criterion_9_desk_scale_gain(c, fx, block16, delta_db); }},
      {"I/O round trips and report delta consistency",
       [&](Checker& c) { criterion_10_io_round_trips(c, fx, block16, delta_db); }},
  };

  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker chk;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(chk);
    } catch (const std::exception& e) {
      chk.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed = seconds_since(t0);
    std::printf("[%s] criterion %zu: %s (%.2f s)%s%s\n", chk.ok ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), elapsed, chk.ok ? "" : " -- ",
                chk.ok ? "" : chk.detail.str().c_str());
    if (!chk.ok) ++failures;
  }

  if (failures) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
