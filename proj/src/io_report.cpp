/* SPDX-License-Identifier: Apache-2.0 */
#include "fisheye/io.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

namespace fisheye {

namespace {

using ordered_json = nlohmann::ordered_json;

double round4(double v) { return std::round(v * 1e4) / 1e4; }

ordered_json psnr_json(const std::optional<PsnrEntry>& entry) {
  if (!entry) return nullptr;
  ordered_json j;
  j["psnr_db"] = entry->infinite ? ordered_json(nullptr) : ordered_json(round4(entry->psnr_db));
  j["infinite"] = entry->infinite;
  return j;
}

bool finite_entry(const std::optional<PsnrEntry>& e) { return e && !e->infinite; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void RunReport::compute_averages() {
  double tme = 0, eme = 0, hme = 0, delta = 0;
  int n_tme = 0, n_eme = 0, n_hme = 0, n_delta = 0;
  excluded_infinite_pairs = 0;
  for (const PairEntry& p : pairs) {
    const bool any_infinite =
        (p.tme && p.tme->infinite) || (p.eme && p.eme->infinite) || (p.hme && p.hme->infinite);
    if (any_infinite) ++excluded_infinite_pairs;
    if (finite_entry(p.tme)) {
      tme += p.tme->psnr_db;
      ++n_tme;
    }
    if (finite_entry(p.eme)) {
      eme += p.eme->psnr_db;
      ++n_eme;
    }
    if (finite_entry(p.hme)) {
      hme += p.hme->psnr_db;
      ++n_hme;
    }
    if (p.delta_db) {
      delta += *p.delta_db;
      ++n_delta;
    }
  }
  average_tme_db = n_tme ? std::optional<double>(tme / n_tme) : std::nullopt;
  average_eme_db = n_eme ? std::optional<double>(eme / n_eme) : std::nullopt;
  average_hme_db = n_hme ? std::optional<double>(hme / n_hme) : std::nullopt;
  average_delta_db = n_delta ? std::optional<double>(delta / n_delta) : std::nullopt;
}

std::string report_to_json(const RunReport& report, bool with_timestamp) {
  ordered_json doc;
  doc["tool"] = "fisheye-me";
  if (with_timestamp) doc["generated_at"] = utc_timestamp();

  ordered_json camera;
  camera["focal_length_mm"] = report.config.focal_length_mm;
  camera["sensor_width_mm"] = report.config.sensor_width_mm;
  camera["sensor_height_mm"] = report.config.sensor_height_mm;
  camera["image_width_px"] = report.config.image_width_px;
  camera["image_height_px"] = report.config.image_height_px;
  camera["fov_deg"] = report.config.fov_deg;

  ordered_json config;
  config["camera"] = camera;
  config["search_range"] = report.config.search_range;
  config["block_size"] = report.config.block_size;
  config["upsample_scale"] = report.config.upsample_scale;
  config["mode"] = report.config.mode;
  config["input"] = report.config.input;
  doc["config"] = config;

  doc["pairs"] = ordered_json::array();
  for (const PairEntry& p : report.pairs) {
    ordered_json jp;
    jp["pair_index"] = p.pair_index;
    jp["reference_frame"] = p.reference_frame;
    jp["target_frame"] = p.target_frame;
    jp["tme"] = psnr_json(p.tme);
    jp["eme"] = psnr_json(p.eme);
    jp["hme"] = psnr_json(p.hme);
    // Recomputed from the rounded fields so the serialized document is
    // self-consistent at 4 decimals.
    if (finite_entry(p.tme) && finite_entry(p.hme))
      jp["delta_db"] = round4(round4(p.hme->psnr_db) - round4(p.tme->psnr_db));
    else
      jp["delta_db"] = nullptr;
    ordered_json blocks;
    blocks["translational"] = p.blocks_translational;
    blocks["equisolid"] = p.blocks_equisolid;
    blocks["eme_invalid"] = p.blocks_eme_invalid;
    jp["blocks"] = blocks;
    doc["pairs"].push_back(jp);
  }

  ordered_json avg;
  avg["tme_psnr_db"] = report.average_tme_db ? ordered_json(round4(*report.average_tme_db)) : nullptr;
  avg["eme_psnr_db"] = report.average_eme_db ? ordered_json(round4(*report.average_eme_db)) : nullptr;
  avg["hme_psnr_db"] = report.average_hme_db ? ordered_json(round4(*report.average_hme_db)) : nullptr;
  avg["delta_db"] = report.average_delta_db ? ordered_json(round4(*report.average_delta_db)) : nullptr;
  avg["excluded_infinite_pairs"] = report.excluded_infinite_pairs;
  doc["average"] = avg;

  return doc.dump(2) + "\n";
}

void write_report(const RunReport& report, const std::string& path, bool with_timestamp) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("write_report: cannot open " + path);
  out << report_to_json(report, with_timestamp);
  if (!out) throw FileError("write_report: write failed for " + path);
}

}  // namespace fisheye
