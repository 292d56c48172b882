#pragma once

#include <queue>

#include "detection.hpp"
#include "whitening.hpp"

namespace fcorr {

// Circularly shifted view: out(x) = g(x + s). The |s|-wide bands that wrap
// in at the far edges carry unrelated content; segmentation excludes them.
inline ImageF align(const ImageF& g, int shift_x, int shift_y) {
  if (std::abs(shift_x) > g.width / 2 || std::abs(shift_y) > g.height / 2)
    throw invalid_input("shift too large");
  ImageF out(g.width, g.height);
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x) {
      int sx = (x + shift_x) % g.width;
      if (sx < 0) sx += g.width;
      int sy = (y + shift_y) % g.height;
      if (sy < 0) sy += g.height;
      out.at(x, y) = g.at(sx, sy);
    }
  return out;
}

// Per-pixel cosine between the orientation fields of f and the aligned g;
// exactly 0 where either gradient vanishes. Values lie in [-1, 1].
inline ImageF matchability(const ImageF& f, const ImageF& g_aligned) {
  require_same_size(f, g_aligned);
  GradientField a = orientation_operator(f);
  GradientField b = orientation_operator(g_aligned);
  ImageF map(f.width, f.height);
  for (std::size_t i = 0; i < map.pixels(); ++i)
    map.data[i] = a.x.data[i] * b.x.data[i] + a.y.data[i] * b.y.data[i];
  return map;
}

struct SegmentParams {
  double cos_threshold = 0.4;
  // Box smoothing of the map before thresholding. The raw per-pixel cosine
  // exceeds any useful threshold on ~arccos(thr)/pi of pure sea, so the
  // local mean is the statistic that actually separates ship from sea.
  // 0 disables.
  int smooth_radius = 5;
  int closing_radius = 1;  // morphological closing; 0 disables
  double min_area_fraction = 0.005;
  bool exclude_wrap_band = true;
};

inline BinaryMask threshold_mask(const ImageF& map, double cos_threshold) {
  if (!(cos_threshold > -1.0 && cos_threshold < 1.0))
    throw invalid_input("cos threshold must be inside (-1, 1)");
  BinaryMask m(map.width, map.height);
  for (std::size_t i = 0; i < map.pixels(); ++i) m.data[i] = map.data[i] > cos_threshold ? 1 : 0;
  return m;
}

namespace detail {

inline BinaryMask morph(const BinaryMask& m, int radius, bool dilate) {
  if (radius <= 0) return m;
  BinaryMask out(m.width, m.height);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      std::uint8_t v = dilate ? 0 : 1;
      for (int dy = -radius; dy <= radius && v == (dilate ? 0 : 1); ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
          int xi = x + dx, yi = y + dy;
          std::uint8_t s = 0;
          if (xi >= 0 && yi >= 0 && xi < m.width && yi < m.height) s = m.at(xi, yi);
          if (dilate && s) {
            v = 1;
            break;
          }
          if (!dilate && !s) {
            v = 0;
            break;
          }
        }
      out.at(x, y) = v;
    }
  return out;
}

}  // namespace detail

inline BinaryMask dilate(const BinaryMask& m, int radius) { return detail::morph(m, radius, true); }
inline BinaryMask erode(const BinaryMask& m, int radius) { return detail::morph(m, radius, false); }

inline BinaryMask closing(const BinaryMask& m, int radius) {
  return erode(dilate(m, radius), radius);
}

// Drop 4-connected components smaller than min_area pixels.
inline BinaryMask remove_small_components(const BinaryMask& m, int min_area) {
  BinaryMask out(m.width, m.height);
  std::vector<std::uint8_t> seen(m.pixels(), 0);
  std::vector<std::size_t> stack, comp;
  for (std::size_t start = 0; start < m.pixels(); ++start) {
    if (!m.data[start] || seen[start]) continue;
    stack.assign(1, start);
    seen[start] = 1;
    comp.clear();
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      comp.push_back(i);
      int x = static_cast<int>(i % m.width), y = static_cast<int>(i / m.width);
      const int nx[4] = {x - 1, x + 1, x, x};
      const int ny[4] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= m.width || ny[k] >= m.height) continue;
        std::size_t j = static_cast<std::size_t>(ny[k]) * m.width + nx[k];
        if (m.data[j] && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    if (static_cast<int>(comp.size()) >= min_area)
      for (std::size_t i : comp) out.data[i] = 1;
  }
  return out;
}

// Threshold the (optionally smoothed) map and clean: wrap-band exclusion,
// closing, small-component removal. Every stage can be disabled through the
// params. shift_x/shift_y are the alignment shift, needed to know which
// border bands wrapped around.
inline BinaryMask segment(const ImageF& map, const SegmentParams& p = {}, int shift_x = 0,
                          int shift_y = 0) {
  ImageF work = p.smooth_radius > 0 ? box_mean(map, p.smooth_radius) : map;
  BinaryMask mask = threshold_mask(work, p.cos_threshold);
  if (p.exclude_wrap_band) {
    int w = mask.width, h = mask.height;
    if (shift_x > 0)
      for (int y = 0; y < h; ++y)
        for (int x = w - shift_x; x < w; ++x) mask.at(x, y) = 0;
    if (shift_x < 0)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < -shift_x; ++x) mask.at(x, y) = 0;
    if (shift_y > 0)
      for (int y = h - shift_y; y < h; ++y)
        for (int x = 0; x < w; ++x) mask.at(x, y) = 0;
    if (shift_y < 0)
      for (int y = 0; y < -shift_y; ++y)
        for (int x = 0; x < w; ++x) mask.at(x, y) = 0;
  }
  if (p.closing_radius > 0) mask = closing(mask, p.closing_radius);
  if (p.min_area_fraction > 0.0) {
    int min_area = static_cast<int>(p.min_area_fraction * static_cast<double>(mask.pixels()));
    if (min_area > 1) mask = remove_small_components(mask, min_area);
  }
  return mask;
}

inline std::size_t mask_area(const BinaryMask& m) {
  std::size_t n = 0;
  for (std::uint8_t v : m.data) n += v ? 1 : 0;
  return n;
}

inline double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  require_same_size(a, b);
  std::size_t uni = 0, inter = 0;
  for (std::size_t i = 0; i < a.pixels(); ++i) {
    bool va = a.data[i], vb = b.data[i];
    uni += (va || vb) ? 1 : 0;
    inter += (va && vb) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct SegmentationResult {
  ImageF map;           // raw matchability
  BinaryMask raw_mask;  // plain thresholding of the raw map, no cleanup
  BinaryMask mask;      // cleaned mask
  int shift_x = 0;
  int shift_y = 0;
};

// Full pipeline for a frame pair: align by the given shift (normally the
// detection verdict's peak), build the matchability map from UNFOCUSED
// orientation fields, threshold and clean.
inline SegmentationResult segment_pair(const ImageF& f, const ImageF& g, int shift_x,
                                       int shift_y, const SegmentParams& p = {}) {
  SegmentationResult r;
  r.shift_x = shift_x;
  r.shift_y = shift_y;
  r.map = matchability(f, align(g, shift_x, shift_y));
  r.raw_mask = threshold_mask(r.map, p.cos_threshold);
  r.mask = segment(r.map, p, shift_x, shift_y);
  return r;
}

}  // namespace fcorr
