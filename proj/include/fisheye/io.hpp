/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include "fisheye/camera.hpp"
#include "fisheye/frame.hpp"
#include "fisheye/motion.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fisheye {

// ---------------------------------------------------------------------------
// Errors. Each carries the byte offset at which the problem was detected
// (0 when no offset applies, e.g. filesystem failures).
// ---------------------------------------------------------------------------

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
  std::uint64_t byte_offset;
};

class MalformedHeader : public IoError {
 public:
  using IoError::IoError;
};

class TruncatedPayload : public IoError {
 public:
  using IoError::IoError;
};

class DimensionMismatch : public IoError {
 public:
  using IoError::IoError;
};

class FileError : public IoError {
 public:
  explicit FileError(const std::string& what) : IoError(what, 0) {}
};

// ---------------------------------------------------------------------------
// Sequence input
// ---------------------------------------------------------------------------

enum class SequenceFormat { Auto, Y4m, RawPlanar, PgmSequence };

class SequenceReader {
 public:
  virtual ~SequenceReader() = default;
  virtual int width() const = 0;
  virtual int height() const = 0;
  // Frames per second as a rational; {0,1} when the container does not say.
  virtual std::pair<int, int> frame_rate() const = 0;
  // Next luma plane, or nullopt at end of sequence.
  virtual std::optional<LumaFrame> next() = 0;
};

/// Opens a frame sequence. Y4M is self-describing; raw planar 8-bit needs the
/// dimensions; a PGM sequence is a directory of .pgm files or a printf-style
/// pattern such as frames/%04d.pgm. Auto dispatches on the path.
std::unique_ptr<SequenceReader> open_sequence(const std::string& path,
                                              SequenceFormat format = SequenceFormat::Auto,
                                              int raw_width = 0, int raw_height = 0);

// ---------------------------------------------------------------------------
// Frame and image writers/readers
// ---------------------------------------------------------------------------

void write_frame_pgm(const LumaFrame& frame, const std::string& path);
LumaFrame read_frame_pgm(const std::string& path);

void write_frame_png(const LumaFrame& frame, const std::string& path);
void write_image_png(const RgbImage& image, const std::string& path);
LumaFrame read_frame_png(const std::string& path);
RgbImage read_image_png(const std::string& path);

/// Streaming YUV4MPEG2 writer, C420 (with neutral chroma) or mono.
class Y4mWriter {
 public:
  Y4mWriter(const std::string& path, int width, int height, int fps_num = 25, int fps_den = 1,
            bool mono = true);
  ~Y4mWriter();
  Y4mWriter(const Y4mWriter&) = delete;
  Y4mWriter& operator=(const Y4mWriter&) = delete;

  void write_frame(const LumaFrame& frame);
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Run report
// ---------------------------------------------------------------------------

struct PsnrEntry {
  double psnr_db = 0.0;
  bool infinite = false;
};

struct PairEntry {
  int pair_index = 0;
  int reference_frame = 0;
  int target_frame = 0;
  std::optional<PsnrEntry> tme, eme, hme;
  std::optional<double> delta_db;  // hme - tme, full precision, both finite
  int blocks_translational = 0;
  int blocks_equisolid = 0;
  int blocks_eme_invalid = 0;
};

struct ReportConfig {
  double focal_length_mm = 0.0;
  double sensor_width_mm = 0.0;
  double sensor_height_mm = 0.0;
  int image_width_px = 0;
  int image_height_px = 0;
  double fov_deg = 0.0;
  int search_range = 0;
  int block_size = 0;
  int upsample_scale = 0;
  std::string mode;
  std::string input;
};

struct RunReport {
  ReportConfig config;
  std::vector<PairEntry> pairs;
  std::optional<double> average_tme_db, average_eme_db, average_hme_db, average_delta_db;
  int excluded_infinite_pairs = 0;

  // Arithmetic means over pairs with finite entries; infinite entries are
  // excluded and counted in excluded_infinite_pairs.
  void compute_averages();
};

/// Serializes the report as UTF-8 JSON with stable key order. dB numbers are
/// rounded to 4 decimals at serialization only; the delta field is recomputed
/// from the rounded PSNR fields so the document stays self-consistent.
void write_report(const RunReport& report, const std::string& path, bool with_timestamp = true);

/// The same document as a string (used by write_report and the tests).
std::string report_to_json(const RunReport& report, bool with_timestamp = true);

}  // namespace fisheye
