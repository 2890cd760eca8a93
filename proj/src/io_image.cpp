/* SPDX-License-Identifier: Apache-2.0 */
#include "fisheye/io.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <vector>

namespace fisheye {

// ---------------------------------------------------------------------------
// PGM (binary P5, maxval 255)
// ---------------------------------------------------------------------------

void write_frame_pgm(const LumaFrame& frame, const std::string& path) {
  if (frame.empty()) throw std::invalid_argument("write_frame_pgm: empty frame");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("write_frame_pgm: cannot open " + path);
  out << "P5\n" << frame.width() << " " << frame.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.samples.data()),
            static_cast<std::streamsize>(frame.samples.size()));
  if (!out) throw FileError("write_frame_pgm: write failed for " + path);
}

namespace {

// Reads the next non-comment token of a PGM header. Whitespace and '#' comment
// lines separate tokens.
std::string pgm_token(std::istream& in, std::uint64_t& offset) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    ++offset;
    if (ch == '#') {
      while ((ch = in.get()) != EOF) {
        ++offset;
        if (ch == '\n') break;
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int pgm_int(std::istream& in, std::uint64_t& offset, const char* what) {
  const std::uint64_t at = offset;
  const std::string tok = pgm_token(in, offset);
  if (tok.empty()) throw MalformedHeader(std::string("pgm: missing ") + what, at);
  try {
    const int v = std::stoi(tok);
    if (v < 0) throw std::out_of_range("negative");
    return v;
  } catch (const std::exception&) {
    throw MalformedHeader(std::string("pgm: bad ") + what + " '" + tok + "'", at);
  }
}

}  // namespace

LumaFrame read_frame_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("read_frame_pgm: cannot open " + path);

  std::uint64_t offset = 0;
  char magic[2] = {0, 0};
  in.read(magic, 2);
  offset += static_cast<std::uint64_t>(in.gcount());
  if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '5')
    throw MalformedHeader("pgm: not a binary P5 file", 0);

  const int w = pgm_int(in, offset, "width");
  const int h = pgm_int(in, offset, "height");
  const int maxval = pgm_int(in, offset, "maxval");
  if (w < 1 || h < 1) throw MalformedHeader("pgm: non-positive dimensions", offset);
  if (maxval < 1 || maxval > 255) throw MalformedHeader("pgm: unsupported maxval", offset);
  // pgm_int consumed exactly one whitespace after the maxval; payload starts here.

  LumaFrame frame(w, h);
  in.read(reinterpret_cast<char*>(frame.samples.data()),
          static_cast<std::streamsize>(frame.samples.size()));
  if (in.gcount() != static_cast<std::streamsize>(frame.samples.size()))
    throw TruncatedPayload("pgm: payload shorter than declared dimensions",
                           offset + static_cast<std::uint64_t>(in.gcount()));
  return frame;
}

// ---------------------------------------------------------------------------
// PNG via libpng
// ---------------------------------------------------------------------------

namespace {

struct PngFile {
  std::FILE* fp = nullptr;
  explicit PngFile(const std::string& path, const char* mode) : fp(std::fopen(path.c_str(), mode)) {}
  ~PngFile() {
    if (fp) std::fclose(fp);
  }
};

void write_png_rows(const std::string& path, int width, int height, int color_type,
                    const std::vector<png_bytep>& rows) {
  PngFile file(path, "wb");
  if (!file.fp) throw FileError("write png: cannot open " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw FileError("write png: libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw FileError("write png: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw FileError("write png: encode failed for " + path);
  }
  png_init_io(png, file.fp);
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, const_cast<png_bytep*>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_frame_png(const LumaFrame& frame, const std::string& path) {
  if (frame.empty()) throw std::invalid_argument("write_frame_png: empty frame");
  std::vector<png_bytep> rows(frame.height());
  for (int r = 0; r < frame.height(); ++r)
    rows[r] = const_cast<png_bytep>(frame.samples.data() +
                                    static_cast<std::ptrdiff_t>(r) * frame.width());
  write_png_rows(path, frame.width(), frame.height(), PNG_COLOR_TYPE_GRAY, rows);
}

void write_image_png(const RgbImage& image, const std::string& path) {
  const int w = image.width();
  const int h = image.height();
  if (w < 1 || h < 1) throw std::invalid_argument("write_image_png: empty image");
  std::vector<png_byte> interleaved(static_cast<std::size_t>(w) * h * 3);
  std::vector<png_bytep> rows(h);
  for (int r = 0; r < h; ++r) {
    png_bytep row = interleaved.data() + static_cast<std::size_t>(r) * w * 3;
    rows[r] = row;
    for (int c = 0; c < w; ++c) {
      row[3 * c + 0] = image.r(r, c);
      row[3 * c + 1] = image.g(r, c);
      row[3 * c + 2] = image.b(r, c);
    }
  }
  write_png_rows(path, w, h, PNG_COLOR_TYPE_RGB, rows);
}

namespace {

struct PngReadCtx {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadCtx() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

// Decodes an 8-bit PNG into interleaved rows; returns channel count (1 or 3).
int read_png_interleaved(const std::string& path, int& width, int& height,
                         std::vector<png_byte>& data) {
  PngFile file(path, "rb");
  if (!file.fp) throw FileError("read png: cannot open " + path);

  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.fp) != 8 || png_sig_cmp(sig, 0, 8))
    throw MalformedHeader("png: bad signature in " + path, 0);

  PngReadCtx ctx;
  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw FileError("read png: libpng init failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw FileError("read png: libpng init failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw TruncatedPayload("png: decode failed for " + path, 0);

  png_init_io(ctx.png, file.fp);
  png_set_sig_bytes(ctx.png, 8);
  png_read_info(ctx.png, ctx.info);

  width = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
  height = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
  const int bit_depth = png_get_bit_depth(ctx.png, ctx.info);
  const int color_type = png_get_color_type(ctx.png, ctx.info);
  if (bit_depth != 8 || (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB))
    throw MalformedHeader("png: only 8-bit gray or RGB supported", 8);
  const int channels = color_type == PNG_COLOR_TYPE_GRAY ? 1 : 3;

  data.resize(static_cast<std::size_t>(width) * height * channels);
  std::vector<png_bytep> rows(height);
  for (int r = 0; r < height; ++r)
    rows[r] = data.data() + static_cast<std::size_t>(r) * width * channels;
  png_read_image(ctx.png, rows.data());
  png_read_end(ctx.png, nullptr);
  return channels;
}

}  // namespace

LumaFrame read_frame_png(const std::string& path) {
  int w = 0, h = 0;
  std::vector<png_byte> data;
  if (read_png_interleaved(path, w, h, data) != 1)
    throw MalformedHeader("png: expected a grayscale image in " + path, 8);
  LumaFrame frame(w, h);
  std::copy(data.begin(), data.end(), frame.samples.data());
  return frame;
}

RgbImage read_image_png(const std::string& path) {
  int w = 0, h = 0;
  std::vector<png_byte> data;
  if (read_png_interleaved(path, w, h, data) != 3)
    throw MalformedHeader("png: expected an RGB image in " + path, 8);
  RgbImage img(w, h);
  for (int r = 0; r < h; ++r) {
    const png_byte* row = data.data() + static_cast<std::size_t>(r) * w * 3;
    for (int c = 0; c < w; ++c) {
      img.r(r, c) = row[3 * c + 0];
      img.g(r, c) = row[3 * c + 1];
      img.b(r, c) = row[3 * c + 2];
    }
  }
  return img;
}

}  // namespace fisheye
