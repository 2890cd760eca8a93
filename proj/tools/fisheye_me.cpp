/* SPDX-License-Identifier: Apache-2.0 */
// fisheye-me: hybrid translational/equisolid motion estimation for fisheye video.
//
// Subcommands:
//   estimate  run motion estimation/compensation over frame pairs of a sequence
//   synth     render a synthetic equisolid test sequence with known ground truth
//   sweep     run estimate across several block sizes and merge the reports
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 internal error.

#include "fisheye/io.hpp"
#include "fisheye/metrics.hpp"
#include "fisheye/motion.hpp"
#include "fisheye/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace fisheye;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

// ---------------------------------------------------------------------------
// Shared option blocks
// ---------------------------------------------------------------------------

struct CameraArgs {
  std::string preset = "circular";
  double f_mm = 0.0;        // 0 = take from preset
  std::string sensor_mm;    // "WxH", empty = preset
  double fov_deg = 0.0;     // 0 = preset
};

void add_camera_flags(CLI::App* cmd, CameraArgs& args) {
  cmd->add_option("--camera-preset", args.preset, "Camera preset: circular or fullframe")
      ->check(CLI::IsMember({"circular", "fullframe"}))
      ->capture_default_str();
  cmd->add_option("--f-mm", args.f_mm, "Focal length override, millimeters")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--sensor-mm", args.sensor_mm, "Sensor size override, e.g. 5.2x5.2");
  cmd->add_option("--fov-deg", args.fov_deg, "Field of view override, degrees")
      ->check(CLI::PositiveNumber);
}

std::pair<double, double> parse_sensor(const std::string& s) {
  const auto x = s.find_first_of("xX");
  if (x == std::string::npos || x == 0 || x + 1 >= s.size())
    throw std::invalid_argument("expected WxH, got '" + s + "'");
  try {
    return {std::stod(s.substr(0, x)), std::stod(s.substr(x + 1))};
  } catch (const std::exception&) {
    throw std::invalid_argument("expected numbers in WxH, got '" + s + "'");
  }
}

CameraModel make_camera(const CameraArgs& args, int width, int height) {
  double f = 1.8, sw = 5.2, sh = 5.2, fov = 185.0;
  if (args.preset == "fullframe") {
    sw = 4.6;
    sh = 2.9;
  }
  if (args.f_mm != 0.0) f = args.f_mm;
  if (!args.sensor_mm.empty()) std::tie(sw, sh) = parse_sensor(args.sensor_mm);
  if (args.fov_deg != 0.0) fov = args.fov_deg;
  return CameraModel(f, sw, sh, width, height, fov);
}

struct SearchArgs {
  int block_size = 16;
  int search_range = 128;
  int upsample_scale = 8;
  int threads = 0;
};

void add_search_flags(CLI::App* cmd, SearchArgs& args, bool with_block_size = true) {
  if (with_block_size)
    cmd->add_option("--block-size", args.block_size, "Block size in pixels")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  cmd->add_option("--search-range", args.search_range, "Search range in pixels per direction")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--scale", args.upsample_scale, "Reference upsampling factor")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--threads", args.threads,
                  "Worker threads (0 = FISHEYE_ME_THREADS env or hardware)");
}

struct InputArgs {
  std::string input;
  std::string format = "auto";
  std::string raw_size;
  int pairs = 0;   // 0 = all pairs the sequence allows
  int stride = 1;  // distance between pair start frames
};

void add_input_flags(CLI::App* cmd, InputArgs& args) {
  cmd->add_option("--input", args.input, "Input sequence (.y4m, raw planar, or PGM dir/pattern)")
      ->required();
  cmd->add_option("--format", args.format, "Input format")
      ->check(CLI::IsMember({"auto", "y4m", "raw", "pgm"}))
      ->capture_default_str();
  cmd->add_option("--raw-size", args.raw_size, "Raw input dimensions, e.g. 1088x1088");
  cmd->add_option("--pairs", args.pairs, "Number of frame pairs to process (0 = all)")
      ->capture_default_str();
  cmd->add_option("--stride", args.stride, "Frame interval between pair starts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

std::unique_ptr<SequenceReader> open_input(const InputArgs& args) {
  SequenceFormat fmt = SequenceFormat::Auto;
  if (args.format == "y4m") fmt = SequenceFormat::Y4m;
  if (args.format == "raw") fmt = SequenceFormat::RawPlanar;
  if (args.format == "pgm") fmt = SequenceFormat::PgmSequence;
  int rw = 0, rh = 0;
  if (!args.raw_size.empty()) {
    const auto [w, h] = parse_sensor(args.raw_size);
    rw = static_cast<int>(w);
    rh = static_cast<int>(h);
  }
  return open_sequence(args.input, fmt, rw, rh);
}

std::string pair_file(const fs::path& dir, int pair_index, const std::string& suffix) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "pair_%04d_%s", pair_index, suffix.c_str());
  return (dir / buf).string();
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateArgs {
  InputArgs input;
  CameraArgs camera;
  SearchArgs search;
  std::string mode = "hybrid";
  std::string out_dir;
  std::string report_path;
  bool no_timestamp = false;
};

EstimatorMode parse_mode(const std::string& mode) {
  if (mode == "tme") return EstimatorMode::Tme;
  if (mode == "eme") return EstimatorMode::Eme;
  return EstimatorMode::Hybrid;
}

RunReport run_estimate(const EstimateArgs& args, int block_size, bool write_artifacts,
                       bool quiet = false) {
  auto reader = open_input(args.input);
  const EstimatorMode mode = parse_mode(args.mode);

  SearchConfig cfg;
  cfg.search_range = args.search.search_range;
  cfg.block_size = block_size;
  cfg.upsample_scale = args.search.upsample_scale;
  cfg.validate();

  std::optional<CameraModel> cam;
  RunReport report;
  report.config.search_range = cfg.search_range;
  report.config.block_size = cfg.block_size;
  report.config.upsample_scale = cfg.upsample_scale;
  report.config.mode = args.mode;
  report.config.input = args.input.input;

  const fs::path out_dir = args.out_dir;
  if (write_artifacts && !args.out_dir.empty()) fs::create_directories(out_dir);

  std::optional<LumaFrame> held;
  long long ref_index = 0;
  int pair_index = 0;

  for (long long index = 0;; ++index) {
    if (args.input.pairs > 0 && pair_index >= args.input.pairs) break;
    std::optional<LumaFrame> frame = reader->next();
    if (!frame) break;

    if (held && index == ref_index + 1) {
      const LumaFrame& ref = *held;
      const LumaFrame& target = *frame;
      if (!cam) {
        cam = make_camera(args.camera, target.width(), target.height());
        report.config.focal_length_mm = cam->focal_length_mm;
        report.config.sensor_width_mm = cam->sensor_width_mm;
        report.config.sensor_height_mm = cam->sensor_height_mm;
        report.config.image_width_px = cam->image_width_px;
        report.config.image_height_px = cam->image_height_px;
        report.config.fov_deg = cam->fov_deg;
      }

      const CompensationResult res =
          hybrid_compensate(target, ref, *cam, cfg, mode, mode != EstimatorMode::Tme,
                            args.search.threads);

      PairEntry entry;
      entry.pair_index = pair_index;
      entry.reference_frame = static_cast<int>(ref_index);
      entry.target_frame = static_cast<int>(index);
      for (const BlockResult& b : res.blocks) {
        if (!b.eme_valid && mode != EstimatorMode::Tme) ++entry.blocks_eme_invalid;
        if (b.mode == ChosenMode::Equisolid)
          ++entry.blocks_equisolid;
        else
          ++entry.blocks_translational;
      }

      const FrameScore chosen = luma_psnr(res.compensated, target);
      const PsnrEntry chosen_entry{chosen.psnr_db, chosen.infinite};
      std::optional<PsnrEntry> baseline_entry;
      if (res.tme_baseline) {
        const FrameScore base = luma_psnr(*res.tme_baseline, target);
        baseline_entry = PsnrEntry{base.psnr_db, base.infinite};
      }
      switch (mode) {
        case EstimatorMode::Tme:
          entry.tme = chosen_entry;
          break;
        case EstimatorMode::Eme:
          entry.eme = chosen_entry;
          entry.tme = baseline_entry;
          break;
        case EstimatorMode::Hybrid:
          entry.hme = chosen_entry;
          entry.tme = baseline_entry;
          if (entry.tme && !entry.tme->infinite && !entry.hme->infinite)
            entry.delta_db = entry.hme->psnr_db - entry.tme->psnr_db;
          break;
      }
      report.pairs.push_back(entry);

      if (write_artifacts && !args.out_dir.empty()) {
        write_frame_pgm(res.compensated, pair_file(out_dir, pair_index, args.mode + ".pgm"));
        if (res.tme_baseline && mode != EstimatorMode::Tme)
          write_frame_pgm(*res.tme_baseline, pair_file(out_dir, pair_index, "tme.pgm"));
        if (mode == EstimatorMode::Hybrid) {
          write_image_png(render_decision_map(res),
                          pair_file(out_dir, pair_index, "decision.png"));
          write_image_png(render_decision_map(res, res.compensated),
                          pair_file(out_dir, pair_index, "overlay.png"));
        }
      }

      if (!quiet) {
        auto db = [](const std::optional<PsnrEntry>& e) {
          if (!e) return std::string("-");
          if (e->infinite) return std::string("inf");
          char buf[32];
          std::snprintf(buf, sizeof buf, "%.4f", e->psnr_db);
          return std::string(buf);
        };
        std::printf("pair %d (ref %lld -> target %lld): tme %s  eme %s  hme %s  "
                    "blocks T/E/I %d/%d/%d\n",
                    pair_index, ref_index, index, db(entry.tme).c_str(), db(entry.eme).c_str(),
                    db(entry.hme).c_str(), entry.blocks_translational, entry.blocks_equisolid,
                    entry.blocks_eme_invalid);
      }

      ++pair_index;
      held.reset();
      ref_index = static_cast<long long>(pair_index) * args.input.stride;
    }
    if (index == ref_index) held = std::move(*frame);
  }

  if (report.pairs.empty())
    throw std::invalid_argument("estimate: input yields no frame pairs with this selection");
  report.compute_averages();
  return report;
}

int cmd_estimate(const EstimateArgs& args) {
  const RunReport report = run_estimate(args, args.search.block_size, true);
  std::string report_path = args.report_path;
  if (report_path.empty() && !args.out_dir.empty())
    report_path = (fs::path(args.out_dir) / "report.json").string();
  if (!report_path.empty()) {
    write_report(report, report_path, !args.no_timestamp);
    std::printf("report written to %s\n", report_path.c_str());
  }
  if (report.average_delta_db)
    std::printf("average delta (hme - tme): %.4f dB over %zu pair(s)\n",
                *report.average_delta_db, report.pairs.size());
  return 0;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string scene_path;
  std::string out_dir;
  std::string format = "y4m";
  bool no_timestamp = false;
};

ordered_json camera_json(const CameraModel& cam) {
  ordered_json j;
  j["focal_length_mm"] = cam.focal_length_mm;
  j["sensor_width_mm"] = cam.sensor_width_mm;
  j["sensor_height_mm"] = cam.sensor_height_mm;
  j["image_width_px"] = cam.image_width_px;
  j["image_height_px"] = cam.image_height_px;
  j["fov_deg"] = cam.fov_deg;
  return j;
}

int cmd_synth(const SynthArgs& args) {
  std::ifstream in(args.scene_path);
  if (!in) throw FileError("synth: cannot open scene file " + args.scene_path);
  ordered_json scene_doc;
  try {
    in >> scene_doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("synth: bad scene JSON: ") + e.what());
  }

  const int width = scene_doc.at("width").get<int>();
  const int height = scene_doc.at("height").get<int>();
  const int frames = scene_doc.value("frames", 2);
  const int fps = scene_doc.value("fps", 25);
  if (frames < 1) throw std::invalid_argument("synth: frames must be >= 1");

  CameraModel cam = CameraModel::circular(width, height);
  if (scene_doc.contains("camera")) {
    const auto& c = scene_doc["camera"];
    if (c.contains("preset")) {
      const std::string preset = c["preset"].get<std::string>();
      cam = preset == "fullframe" ? CameraModel::fullframe(width, height)
                                  : CameraModel::circular(width, height);
    } else {
      cam = CameraModel(c.at("f_mm").get<double>(), c.at("sensor_mm").at(0).get<double>(),
                        c.at("sensor_mm").at(1).get<double>(), width, height,
                        c.value("fov_deg", 185.0));
    }
  }

  PlanarScene scene;
  scene.depth_mm = scene_doc.value("depth_mm", 1000.0);
  scene.texture_pitch = scene_doc.value("texture_pitch", cam.pitch_x() / cam.focal_length_mm);
  if (scene_doc.contains("texture") && scene_doc["texture"].contains("file")) {
    const std::string tex_path = scene_doc["texture"]["file"].get<std::string>();
    scene.texture = fs::path(tex_path).extension() == ".png" ? read_frame_png(tex_path)
                                                             : read_frame_pgm(tex_path);
  } else {
    int tw = 2048, th = 2048;
    if (scene_doc.contains("texture")) {
      tw = scene_doc["texture"].value("width", 2048);
      th = scene_doc["texture"].value("height", 2048);
    }
    scene.texture = make_sine_texture(tw, th);
  }

  const bool has_steps = scene_doc.contains("shift_candidate_steps");
  const bool has_mm = scene_doc.contains("translation_mm");
  if (has_steps == has_mm)
    throw std::invalid_argument(
        "synth: scene needs exactly one of shift_candidate_steps or translation_mm");
  if (has_steps) {
    set_shift_in_steps(scene, cam, scene_doc["shift_candidate_steps"].at(0).get<double>(),
                       scene_doc["shift_candidate_steps"].at(1).get<double>());
  } else {
    scene.tx_mm = scene_doc["translation_mm"].at(0).get<double>();
    scene.ty_mm = scene_doc["translation_mm"].at(1).get<double>();
  }

  fs::create_directories(args.out_dir);
  const fs::path out_dir = args.out_dir;

  if (args.format == "y4m") {
    Y4mWriter writer((out_dir / "seq.y4m").string(), width, height, fps, 1, true);
    for (int i = 0; i < frames; ++i) writer.write_frame(render_equisolid(scene, cam, i));
    writer.close();
    std::printf("wrote %d frame(s) to %s\n", frames, (out_dir / "seq.y4m").c_str());
  } else {
    for (int i = 0; i < frames; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%04d.pgm", i);
      write_frame_pgm(render_equisolid(scene, cam, i), (out_dir / name).string());
    }
    std::printf("wrote %d frame(s) to %s\n", frames, out_dir.c_str());
  }

  const Eigen::Vector2d shift_mm = perspective_shift_mm(scene, cam);
  const Eigen::Vector2d steps = perspective_shift_steps(scene, cam);
  ordered_json truth;
  truth["frames"] = frames;
  truth["width"] = width;
  truth["height"] = height;
  truth["fps"] = fps;
  truth["camera"] = camera_json(cam);
  truth["depth_mm"] = scene.depth_mm;
  truth["texture_pitch"] = scene.texture_pitch;
  truth["translation_mm_per_frame"] = {scene.tx_mm, scene.ty_mm};
  truth["perspective_shift_mm_per_frame"] = {shift_mm.x(), shift_mm.y()};
  truth["shift_candidate_steps_per_frame"] = {steps.x(), steps.y()};
  std::ofstream truth_out(out_dir / "ground_truth.json");
  truth_out << truth.dump(2) << "\n";
  if (!truth_out) throw FileError("synth: cannot write ground_truth.json");
  return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
  EstimateArgs estimate;
  std::vector<int> block_sizes = {8, 16, 32, 64};
};

int cmd_sweep(const SweepArgs& args) {
  ordered_json doc;
  doc["tool"] = "fisheye-me";
  ordered_json table = ordered_json::array();
  ordered_json runs = ordered_json::array();

  for (const int block_size : args.block_sizes) {
    std::printf("-- block size %d --\n", block_size);
    const RunReport report = run_estimate(args.estimate, block_size, false);
    const ordered_json run =
        ordered_json::parse(report_to_json(report, !args.estimate.no_timestamp));

    ordered_json row;
    row["block_size"] = block_size;
    row["tme_psnr_db"] = run["average"]["tme_psnr_db"];
    row["hme_psnr_db"] = run["average"]["hme_psnr_db"];
    row["delta_db"] = run["average"]["delta_db"];
    table.push_back(row);

    ordered_json entry;
    entry["block_size"] = block_size;
    entry["pairs"] = run["pairs"];
    entry["average"] = run["average"];
    runs.push_back(entry);

    if (doc.find("config") == doc.end()) {
      ordered_json config = run["config"];
      config.erase("block_size");
      doc["config"] = config;
    }
  }
  doc["table"] = table;
  doc["runs"] = runs;

  std::string report_path = args.estimate.report_path;
  if (report_path.empty() && !args.estimate.out_dir.empty())
    report_path = (fs::path(args.estimate.out_dir) / "sweep.json").string();
  if (report_path.empty()) report_path = "sweep.json";
  fs::path parent = fs::path(report_path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(report_path);
  out << doc.dump(2) << "\n";
  if (!out) throw FileError("sweep: cannot write " + report_path);
  std::printf("sweep report written to %s\n", report_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid translational/equisolid motion estimation for fisheye video"};
  app.require_subcommand(1);

  EstimateArgs est;
  CLI::App* estimate = app.add_subcommand("estimate", "Estimate and compensate frame pairs");
  add_input_flags(estimate, est.input);
  add_camera_flags(estimate, est.camera);
  add_search_flags(estimate, est.search);
  estimate->add_option("--mode", est.mode, "Estimator: tme, eme, or hybrid")
      ->check(CLI::IsMember({"tme", "eme", "hybrid"}))
      ->capture_default_str();
  estimate->add_option("--out", est.out_dir, "Directory for compensated frames and maps");
  estimate->add_option("--report", est.report_path, "JSON report path");
  estimate->add_flag("--no-timestamp", est.no_timestamp, "Omit the timestamp field");

  SynthArgs syn;
  CLI::App* synth = app.add_subcommand("synth", "Render a synthetic planar-scene sequence");
  synth->add_option("--scene", syn.scene_path, "Scene description JSON")->required();
  synth->add_option("--out", syn.out_dir, "Output directory")->required();
  synth->add_option("--format", syn.format, "Frame container: y4m or pgm")
      ->check(CLI::IsMember({"y4m", "pgm"}))
      ->capture_default_str();

  SweepArgs swp;
  CLI::App* sweep = app.add_subcommand("sweep", "Estimate across block sizes, merged report");
  add_input_flags(sweep, swp.estimate.input);
  add_camera_flags(sweep, swp.estimate.camera);
  add_search_flags(sweep, swp.estimate.search, false);
  sweep->add_option("--block-sizes", swp.block_sizes, "Block sizes to sweep")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--out", swp.estimate.out_dir, "Directory for the merged report");
  sweep->add_option("--report", swp.estimate.report_path, "Merged report path");
  sweep->add_flag("--no-timestamp", swp.estimate.no_timestamp, "Omit timestamp fields");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (app.got_subcommand(estimate)) return cmd_estimate(est);
    if (app.got_subcommand(synth)) return cmd_synth(syn);
    if (app.got_subcommand(sweep)) return cmd_sweep(swp);
    return kExitConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
}
