#pragma once

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "image.hpp"

namespace fcorr {

// ITU BT.709 luminance weights for color inputs.
inline double luma709(double r, double g, double b) {
  return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}

namespace detail {

inline ImageF load_png_file(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw io_error("unreadable file: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    std::fclose(fp);
    throw io_error("png reader initialization failed");
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw io_error("unreadable file: " + path);
  }

  png_init_io(png, fp);
  // Expand palettes / sub-byte grays so rows are 8- or 16-bit samples.
  png_read_png(png, info, PNG_TRANSFORM_PACKING | PNG_TRANSFORM_EXPAND, nullptr);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int depth = png_get_bit_depth(png, info);
  int channels = png_get_channels(png, info);
  png_bytepp rows = png_get_rows(png, info);

  ImageF out;
  out.width = static_cast<int>(w);
  out.height = static_cast<int>(h);
  out.data.resize(static_cast<std::size_t>(w) * h);

  double maxv = depth == 16 ? 65535.0 : 255.0;
  for (png_uint_32 y = 0; y < h; ++y) {
    png_bytep row = rows[y];
    for (png_uint_32 x = 0; x < w; ++x) {
      double ch[4] = {0, 0, 0, 0};
      for (int c = 0; c < channels; ++c) {
        std::size_t i = (static_cast<std::size_t>(x) * channels + c);
        double v;
        if (depth == 16)
          v = static_cast<double>((row[2 * i] << 8) | row[2 * i + 1]);  // network order
        else
          v = static_cast<double>(row[i]);
        ch[c] = v / maxv;
      }
      double lum;
      if (channels >= 3)
        lum = luma709(ch[0], ch[1], ch[2]);  // alpha, if present, ignored
      else
        lum = ch[0];
      out.data[static_cast<std::size_t>(y) * w + x] = lum;
    }
  }

  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);
  return out;
}

inline void save_png_gray(const std::string& path, const std::vector<std::uint16_t>& codes,
                          int width, int height, int bit_depth) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw io_error("cannot write file: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    std::fclose(fp);
    throw io_error("png writer initialization failed");
  }

  std::vector<png_byte> buf;
  std::vector<png_bytep> rows(height);
  int bpp = bit_depth == 16 ? 2 : 1;
  buf.resize(static_cast<std::size_t>(width) * height * bpp);
  for (int y = 0; y < height; ++y) {
    rows[y] = buf.data() + static_cast<std::size_t>(y) * width * bpp;
    for (int x = 0; x < width; ++x) {
      std::uint16_t v = codes[static_cast<std::size_t>(y) * width + x];
      if (bit_depth == 16) {
        rows[y][2 * x] = static_cast<png_byte>(v >> 8);
        rows[y][2 * x + 1] = static_cast<png_byte>(v & 0xff);
      } else {
        rows[y][x] = static_cast<png_byte>(v);
      }
    }
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw io_error("cannot write file: " + path);
  }

  png_init_io(png, fp);
  png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_rows(png, info, rows.data());
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

inline int pgm_next_token(std::istream& in, std::string& tok) {
  tok.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return 1;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok.empty() ? 0 : 1;
}

inline ImageF load_pgm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("unreadable file: " + path);
  std::string magic, tok;
  if (!pgm_next_token(in, magic) || (magic != "P2" && magic != "P5"))
    throw io_error("unsupported format: " + path);
  long vals[3];
  for (int i = 0; i < 3; ++i) {
    if (!pgm_next_token(in, tok)) throw io_error("unreadable file: " + path);
    try {
      vals[i] = std::stol(tok);
    } catch (...) {
      throw io_error("unreadable file: " + path);
    }
  }
  long w = vals[0], h = vals[1], maxval = vals[2];
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
    throw io_error("unreadable file: " + path);

  ImageF out(static_cast<int>(w), static_cast<int>(h));
  std::size_t n = out.pixels();
  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      if (!pgm_next_token(in, tok)) throw io_error("unreadable file: " + path);
      out.data[i] = std::stod(tok) / static_cast<double>(maxval);
    }
  } else {
    int bpp = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(n * bpp);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size())
      throw io_error("unreadable file: " + path);
    for (std::size_t i = 0; i < n; ++i) {
      unsigned v = bpp == 2 ? (buf[2 * i] << 8) | buf[2 * i + 1] : buf[i];
      out.data[i] = static_cast<double>(v) / static_cast<double>(maxval);
    }
  }
  return out;
}

inline std::string lower_ext(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string e = path.substr(dot);
  for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e;
}

inline std::uint16_t quantize01(double v, double maxv) {
  if (v < 0.0) v = 0.0;
  if (v > 1.0) v = 1.0;
  return static_cast<std::uint16_t>(std::lround(v * maxv));
}

}  // namespace detail

// PNG or PGM by content sniffing; values scaled to [0,1], color reduced to
// luminance.
inline ImageF load_image(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw io_error("unreadable file: " + path);
  char sig[2] = {0, 0};
  probe.read(sig, 2);
  probe.close();
  if (sig[0] == '\x89' && sig[1] == 'P') {
    ImageF img = detail::load_png_file(path);
    if (!all_finite(img)) throw io_error("unreadable file: " + path);
    return img;
  }
  if (sig[0] == 'P' && (sig[1] == '2' || sig[1] == '5')) return detail::load_pgm_file(path);
  throw io_error("unsupported format: " + path);
}

// Grayscale write, format from extension (.png or .pgm), values clamped to
// [0,1]. bit_depth is 8 or 16.
inline void save_image(const std::string& path, const ImageF& img, int bit_depth = 16) {
  if (bit_depth != 8 && bit_depth != 16) throw invalid_input("bit depth must be 8 or 16");
  double maxv = bit_depth == 16 ? 65535.0 : 255.0;
  std::string ext = detail::lower_ext(path);
  if (ext == ".png") {
    std::vector<std::uint16_t> codes(img.pixels());
    for (std::size_t i = 0; i < img.pixels(); ++i)
      codes[i] = detail::quantize01(img.data[i], maxv);
    detail::save_png_gray(path, codes, img.width, img.height, bit_depth);
    return;
  }
  if (ext == ".pgm") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write file: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n" << static_cast<long>(maxv) << "\n";
    int bpp = bit_depth == 16 ? 2 : 1;
    std::vector<unsigned char> buf(img.pixels() * bpp);
    for (std::size_t i = 0; i < img.pixels(); ++i) {
      std::uint16_t v = detail::quantize01(img.data[i], maxv);
      if (bpp == 2) {
        buf[2 * i] = static_cast<unsigned char>(v >> 8);
        buf[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
      } else {
        buf[i] = static_cast<unsigned char>(v);
      }
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw io_error("cannot write file: " + path);
    return;
  }
  throw io_error("unsupported format: " + path);
}

// Masks are written as 8-bit PNG with values 0 / 255.
inline void save_mask(const std::string& path, const BinaryMask& mask) {
  std::vector<std::uint16_t> codes(mask.pixels());
  for (std::size_t i = 0; i < mask.pixels(); ++i) codes[i] = mask.data[i] ? 255 : 0;
  detail::save_png_gray(path, codes, mask.width, mask.height, 8);
}

// Min-max normalized 16-bit PGM, for surface / map heat maps.
inline void save_normalized_pgm(const std::string& path, const ImageF& img) {
  double lo = min_value(img), hi = max_value(img);
  ImageF norm(img.width, img.height);
  if (hi > lo)
    for (std::size_t i = 0; i < img.pixels(); ++i) norm.data[i] = (img.data[i] - lo) / (hi - lo);
  save_image(path, norm, 16);
}

// Raw values as CSV rows, full double precision.
inline void save_csv_grid(const std::string& path, const ImageF& img) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write file: " + path);
  char buf[40];
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      std::snprintf(buf, sizeof buf, "%.17g", img.at(x, y));
      out << buf << (x + 1 == img.width ? "" : ",");
    }
    out << "\n";
  }
  if (!out) throw io_error("cannot write file: " + path);
}

// Horizontal strip of equally sized panels with thin white separators.
inline ImageF panel_strip(const std::vector<const ImageF*>& panels, int gap = 2) {
  if (panels.empty()) throw invalid_input("no panels");
  int w = panels[0]->width, h = panels[0]->height;
  for (const ImageF* p : panels)
    if (p->width != w || p->height != h) throw invalid_input("panel size mismatch");
  int n = static_cast<int>(panels.size());
  ImageF out(n * w + (n - 1) * gap, h, 1.0);
  for (int i = 0; i < n; ++i)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(i * (w + gap) + x, y) = panels[i]->at(x, y);
  return out;
}

}  // namespace fcorr
