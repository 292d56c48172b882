#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace fcorr {

// Row-major grid of values. Luminance images use doubles in nominal [0,1].
template <class T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Image() = default;

  Image(int w, int h, T fill = T()) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw invalid_input("image dimensions must be positive");
    data.assign(static_cast<std::size_t>(w) * h, fill);
  }

  T& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  const T& at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

  std::size_t pixels() const { return data.size(); }

  template <class U>
  bool same_size(const Image<U>& o) const {
    return width == o.width && height == o.height;
  }
};

using ImageF = Image<double>;
using BinaryMask = Image<std::uint8_t>;  // values 0 or 1

// Unit-or-zero gradient vectors, stored as two planes.
struct GradientField {
  ImageF x;
  ImageF y;

  int width() const { return x.width; }
  int height() const { return x.height; }
};

template <class A, class B>
inline void require_same_size(const Image<A>& a, const Image<B>& b) {
  if (a.width != b.width || a.height != b.height)
    throw invalid_input("dimension mismatch");
}

inline double min_value(const ImageF& img) {
  return *std::min_element(img.data.begin(), img.data.end());
}

inline double max_value(const ImageF& img) {
  return *std::max_element(img.data.begin(), img.data.end());
}

inline double mean(const ImageF& img) {
  double acc = 0.0;
  for (double v : img.data) acc += v;
  return acc / static_cast<double>(img.pixels());
}

// Population standard deviation over every pixel.
inline double stdev(const ImageF& img) {
  double m = mean(img);
  double acc = 0.0;
  for (double v : img.data) {
    double d = v - m;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(img.pixels()));
}

// (v - mean) / stdev; a flat image maps to all zeros.
inline ImageF standardized(const ImageF& img) {
  double m = mean(img);
  double s = stdev(img);
  ImageF out(img.width, img.height);
  if (s <= 0.0) return out;
  for (std::size_t i = 0; i < img.pixels(); ++i) out.data[i] = (img.data[i] - m) / s;
  return out;
}

inline bool all_finite(const ImageF& img) {
  for (double v : img.data)
    if (!std::isfinite(v)) return false;
  return true;
}

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

template <class T>
inline Image<T> crop(const Image<T>& img, Rect r) {
  if (r.width <= 0 || r.height <= 0 || r.x < 0 || r.y < 0 ||
      r.x + r.width > img.width || r.y + r.height > img.height)
    throw invalid_input("crop region out of bounds");
  Image<T> out(r.width, r.height);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x) out.at(x, y) = img.at(r.x + x, r.y + y);
  return out;
}

template <class T>
inline Rect left_third(const Image<T>& img) {
  return {0, 0, img.width / 3, img.height};
}

// Bilinear sample at real coordinates; taps outside the grid read `fill`.
inline double bilinear_sample(const ImageF& img, double x, double y, double fill) {
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  double fx = x - x0, fy = y - y0;
  auto tap = [&](int xi, int yi) -> double {
    if (xi < 0 || yi < 0 || xi >= img.width || yi >= img.height) return fill;
    return img.at(xi, yi);
  };
  return tap(x0, y0) * (1.0 - fx) * (1.0 - fy) + tap(x0 + 1, y0) * fx * (1.0 - fy) +
         tap(x0, y0 + 1) * (1.0 - fx) * fy + tap(x0 + 1, y0 + 1) * fx * fy;
}

// output(x) = input(t^{-1}(x)); used for synthetic ground truth only.
inline ImageF affine_warp(const ImageF& img, const AffineTransform& t, double fill = 0.0) {
  AffineTransform inv = t.inverse();
  ImageF out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      Vec2 src = inv({static_cast<double>(x), static_cast<double>(y)});
      out.at(x, y) = bilinear_sample(img, src.x, src.y, fill);
    }
  return out;
}

}  // namespace fcorr
