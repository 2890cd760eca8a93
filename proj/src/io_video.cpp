/* SPDX-License-Identifier: Apache-2.0 */
#include "fisheye/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace fisheye {

namespace {

// ---------------------------------------------------------------------------
// YUV4MPEG2 reader
// ---------------------------------------------------------------------------

class Y4mReader final : public SequenceReader {
 public:
  explicit Y4mReader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw FileError("y4m: cannot open " + path);
    parse_header();
  }

  int width() const override { return width_; }
  int height() const override { return height_; }
  std::pair<int, int> frame_rate() const override { return {fps_num_, fps_den_}; }

  std::optional<LumaFrame> next() override {
    const std::uint64_t marker_offset = offset_;
    std::string line;
    if (!read_line(line)) {
      if (line.empty()) return std::nullopt;  // clean end of sequence
      throw MalformedHeader("y4m: unterminated frame marker", marker_offset);
    }
    if (line.rfind("FRAME", 0) != 0 || (line.size() > 5 && line[5] != ' '))
      throw MalformedHeader("y4m: expected FRAME marker", marker_offset);

    LumaFrame frame(width_, height_);
    read_plane(frame.samples.data(), static_cast<std::size_t>(width_) * height_, "luma");
    if (!mono_) {
      const std::size_t chroma = static_cast<std::size_t>(width_ / 2) * (height_ / 2);
      scrap_.resize(chroma);
      read_plane(scrap_.data(), chroma, "chroma U");
      read_plane(scrap_.data(), chroma, "chroma V");
    }
    return frame;
  }

 private:
  bool read_line(std::string& line) {
    line.clear();
    int ch;
    while ((ch = in_.get()) != EOF) {
      ++offset_;
      if (ch == '\n') return true;
      if (line.size() > 4096) return false;
      line.push_back(static_cast<char>(ch));
    }
    return false;  // EOF; line holds any partial content
  }

  void read_plane(std::uint8_t* dst, std::size_t bytes, const char* what) {
    in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(bytes));
    const auto got = static_cast<std::size_t>(in_.gcount());
    offset_ += got;
    if (got != bytes)
      throw TruncatedPayload(std::string("y4m: truncated ") + what + " plane", offset_);
  }

  void parse_header() {
    std::string line;
    if (!read_line(line)) throw MalformedHeader("y4m: missing stream header", 0);
    std::istringstream tokens(line);
    std::string tok;
    tokens >> tok;
    if (tok != "YUV4MPEG2") throw MalformedHeader("y4m: bad magic", 0);

    std::string colorspace = "420";
    while (tokens >> tok) {
      if (tok.empty()) continue;
      switch (tok[0]) {
        case 'W': width_ = parse_int(tok.substr(1), "width"); break;
        case 'H': height_ = parse_int(tok.substr(1), "height"); break;
        case 'F': {
          const auto colon = tok.find(':');
          if (colon == std::string::npos)
            throw MalformedHeader("y4m: bad frame rate '" + tok + "'", 0);
          fps_num_ = parse_int(tok.substr(1, colon - 1), "frame rate");
          fps_den_ = parse_int(tok.substr(colon + 1), "frame rate");
          break;
        }
        case 'C': colorspace = tok.substr(1); break;
        default: break;  // I/A/X parameters are irrelevant here
      }
    }
    if (width_ < 1 || height_ < 1)
      throw MalformedHeader("y4m: missing or invalid dimensions", 0);
    if (colorspace == "mono") {
      mono_ = true;
    } else if (colorspace.rfind("420", 0) == 0) {
      mono_ = false;
      if (width_ % 2 || height_ % 2)
        throw MalformedHeader("y4m: 4:2:0 requires even dimensions", 0);
    } else {
      throw MalformedHeader("y4m: unsupported colorspace C" + colorspace, 0);
    }
  }

  int parse_int(const std::string& s, const char* what) {
    try {
      const int v = std::stoi(s);
      if (v < 0) throw std::out_of_range("negative");
      return v;
    } catch (const std::exception&) {
      throw MalformedHeader(std::string("y4m: bad ") + what + " '" + s + "'", 0);
    }
  }

  std::ifstream in_;
  std::string path_;
  std::uint64_t offset_ = 0;
  int width_ = 0, height_ = 0;
  int fps_num_ = 0, fps_den_ = 1;
  bool mono_ = false;
  std::vector<std::uint8_t> scrap_;
};

// ---------------------------------------------------------------------------
// Raw planar 8-bit reader (luma only, dimensions supplied by the caller)
// ---------------------------------------------------------------------------

class RawPlanarReader final : public SequenceReader {
 public:
  RawPlanarReader(const std::string& path, int width, int height)
      : in_(path, std::ios::binary), width_(width), height_(height) {
    if (width < 1 || height < 1)
      throw std::invalid_argument("raw sequence: dimensions must be positive");
    if (!in_) throw FileError("raw: cannot open " + path);
    in_.seekg(0, std::ios::end);
    const auto size = static_cast<std::uint64_t>(in_.tellg());
    in_.seekg(0, std::ios::beg);
    const std::uint64_t frame_bytes = static_cast<std::uint64_t>(width) * height;
    if (size % frame_bytes != 0)
      throw DimensionMismatch("raw: payload is not a whole number of frames",
                              size - size % frame_bytes);
    frames_ = size / frame_bytes;
  }

  int width() const override { return width_; }
  int height() const override { return height_; }
  std::pair<int, int> frame_rate() const override { return {0, 1}; }

  std::optional<LumaFrame> next() override {
    if (index_ >= frames_) return std::nullopt;
    LumaFrame frame(width_, height_);
    in_.read(reinterpret_cast<char*>(frame.samples.data()),
             static_cast<std::streamsize>(frame.samples.size()));
    if (in_.gcount() != static_cast<std::streamsize>(frame.samples.size()))
      throw TruncatedPayload("raw: short read",
                             index_ * static_cast<std::uint64_t>(width_) * height_ +
                                 static_cast<std::uint64_t>(in_.gcount()));
    ++index_;
    return frame;
  }

 private:
  std::ifstream in_;
  int width_, height_;
  std::uint64_t frames_ = 0, index_ = 0;
};

// ---------------------------------------------------------------------------
// PGM file sequence reader
// ---------------------------------------------------------------------------

class PgmSequenceReader final : public SequenceReader {
 public:
  explicit PgmSequenceReader(std::vector<std::string> paths) : paths_(std::move(paths)) {
    if (paths_.empty()) throw FileError("pgm sequence: no input frames");
    first_ = read_frame_pgm(paths_[0]);
  }

  int width() const override { return first_->width(); }
  int height() const override { return first_->height(); }
  std::pair<int, int> frame_rate() const override { return {0, 1}; }

  std::optional<LumaFrame> next() override {
    if (index_ >= paths_.size()) return std::nullopt;
    LumaFrame frame = index_ == 0 ? *first_ : read_frame_pgm(paths_[index_]);
    ++index_;
    if (frame.width() != width() || frame.height() != height())
      throw DimensionMismatch("pgm sequence: frame dimensions differ from the first frame", 0);
    return frame;
  }

 private:
  std::vector<std::string> paths_;
  std::optional<LumaFrame> first_;
  std::size_t index_ = 0;
};

// Accepts exactly one %d / %0Nd conversion and nothing else.
bool valid_index_pattern(const std::string& path) {
  int conversions = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] != '%') continue;
    std::size_t j = i + 1;
    while (j < path.size() && std::isdigit(static_cast<unsigned char>(path[j]))) ++j;
    if (j >= path.size() || path[j] != 'd') return false;
    ++conversions;
    i = j;
  }
  return conversions == 1;
}

std::vector<std::string> expand_pgm_paths(const std::string& path) {
  std::vector<std::string> paths;
  if (path.find('%') != std::string::npos) {
    if (!valid_index_pattern(path))
      throw std::invalid_argument("pgm sequence: pattern must contain exactly one %d field: " +
                                  path);
    char buf[4096];
    for (int i = 0; i < 1000000; ++i) {
      std::snprintf(buf, sizeof buf, path.c_str(), i);
      if (!fs::exists(buf)) {
        if (i == 0) continue;  // sequences may start at 1
        break;
      }
      paths.emplace_back(buf);
    }
  } else if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".pgm")
        paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
  } else {
    paths.push_back(path);
  }
  return paths;
}

bool has_y4m_magic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[9] = {};
  in.read(magic, 9);
  return in.gcount() == 9 && std::string(magic, 9) == "YUV4MPEG2";
}

}  // namespace

std::unique_ptr<SequenceReader> open_sequence(const std::string& path, SequenceFormat format,
                                              int raw_width, int raw_height) {
  if (format == SequenceFormat::Auto) {
    const std::string ext = fs::path(path).extension().string();
    if (fs::is_directory(path) || path.find('%') != std::string::npos || ext == ".pgm")
      format = SequenceFormat::PgmSequence;
    else if (ext == ".y4m" || has_y4m_magic(path))
      format = SequenceFormat::Y4m;
    else if (raw_width > 0 && raw_height > 0)
      format = SequenceFormat::RawPlanar;
    else
      throw std::invalid_argument("open_sequence: cannot infer format of " + path +
                                  " (raw input needs dimensions)");
  }
  switch (format) {
    case SequenceFormat::Y4m:
      return std::make_unique<Y4mReader>(path);
    case SequenceFormat::RawPlanar:
      return std::make_unique<RawPlanarReader>(path, raw_width, raw_height);
    case SequenceFormat::PgmSequence:
      return std::make_unique<PgmSequenceReader>(expand_pgm_paths(path));
    case SequenceFormat::Auto:
      break;
  }
  throw std::invalid_argument("open_sequence: unreachable format");
}

// ---------------------------------------------------------------------------
// YUV4MPEG2 writer
// ---------------------------------------------------------------------------

struct Y4mWriter::Impl {
  std::ofstream out;
  int width = 0, height = 0;
  bool mono = true;
  std::vector<std::uint8_t> chroma;
};

Y4mWriter::Y4mWriter(const std::string& path, int width, int height, int fps_num, int fps_den,
                     bool mono)
    : impl_(std::make_unique<Impl>()) {
  if (width < 1 || height < 1) throw std::invalid_argument("y4m writer: bad dimensions");
  if (!mono && (width % 2 || height % 2))
    throw std::invalid_argument("y4m writer: 4:2:0 requires even dimensions");
  if (fps_num < 1 || fps_den < 1) throw std::invalid_argument("y4m writer: bad frame rate");
  impl_->out.open(path, std::ios::binary);
  if (!impl_->out) throw FileError("y4m writer: cannot open " + path);
  impl_->width = width;
  impl_->height = height;
  impl_->mono = mono;
  if (!mono) impl_->chroma.assign(static_cast<std::size_t>(width / 2) * (height / 2), 128);
  impl_->out << "YUV4MPEG2 W" << width << " H" << height << " F" << fps_num << ":" << fps_den
             << " Ip A1:1 C" << (mono ? "mono" : "420jpeg") << "\n";
}

Y4mWriter::~Y4mWriter() {
  try {
    close();
  } catch (...) {
  }
}

void Y4mWriter::write_frame(const LumaFrame& frame) {
  if (!impl_ || !impl_->out.is_open()) throw FileError("y4m writer: stream closed");
  if (frame.width() != impl_->width || frame.height() != impl_->height)
    throw DimensionMismatch("y4m writer: frame dimensions differ from the header", 0);
  impl_->out << "FRAME\n";
  impl_->out.write(reinterpret_cast<const char*>(frame.samples.data()),
                   static_cast<std::streamsize>(frame.samples.size()));
  if (!impl_->mono) {
    const auto n = static_cast<std::streamsize>(impl_->chroma.size());
    impl_->out.write(reinterpret_cast<const char*>(impl_->chroma.data()), n);
    impl_->out.write(reinterpret_cast<const char*>(impl_->chroma.data()), n);
  }
  if (!impl_->out) throw FileError("y4m writer: write failed");
}

void Y4mWriter::close() {
  if (impl_ && impl_->out.is_open()) {
    impl_->out.flush();
    const bool ok = static_cast<bool>(impl_->out);
    impl_->out.close();
    if (!ok) throw FileError("y4m writer: flush failed");
  }
}

}  // namespace fisheye
