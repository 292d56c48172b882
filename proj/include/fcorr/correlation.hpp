#pragma once

#include <string>

#include "focusing.hpp"
#include "image.hpp"
#include "spectral.hpp"
#include "whitening.hpp"

namespace fcorr {

enum class Method { s0, ssd, sad, orientation, phase, focused_orientation, focused_phase };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::s0: return "s0";
    case Method::ssd: return "ssd";
    case Method::sad: return "sad";
    case Method::orientation: return "orientation";
    case Method::phase: return "phase";
    case Method::focused_orientation: return "focused_orientation";
    case Method::focused_phase: return "focused_phase";
  }
  return "?";
}

// A similarity surface over all circular shifts, with its peak statistics.
// peak_x/peak_y are signed shifts in [-W/2, W/2) x [-H/2, H/2). Ties at the
// peak value go to the smallest shift magnitude, then lexicographically by
// (y, x).
struct MatchingSurface {
  ImageF surface;
  Method method = Method::s0;
  int peak_x = 0;
  int peak_y = 0;
  double peak_value = 0.0;
  double stdev = 0.0;

  static MatchingSurface from_surface(ImageF s, Method m) {
    MatchingSurface out;
    int w = s.width, h = s.height;
    double best = s.data[0];
    long best_r2 = 0;
    int bx = 0, by = 0;
    bool first = true;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double v = s.at(x, y);
        int sx = x >= (w + 1) / 2 ? x - w : x;
        int sy = y >= (h + 1) / 2 ? y - h : y;
        long r2 = static_cast<long>(sx) * sx + static_cast<long>(sy) * sy;
        bool better;
        if (first || v > best)
          better = true;
        else if (v < best)
          better = false;
        else
          better = r2 < best_r2 || (r2 == best_r2 && (sy < by || (sy == by && sx < bx)));
        if (better) {
          best = v;
          best_r2 = r2;
          bx = sx;
          by = sy;
          first = false;
        }
      }
    out.peak_value = best;
    out.peak_x = bx;
    out.peak_y = by;
    out.stdev = fcorr::stdev(s);
    out.method = m;
    out.surface = std::move(s);
    return out;
  }
};

// Detection statistic: surface maximum over the standard deviation of ALL
// surface values (the peak is not excluded).
inline double snr(const MatchingSurface& s) {
  if (s.stdev <= 0.0) throw numerical_error("constant matching surface");
  return s.peak_value / s.stdev;
}

// Plain cross-correlation surface.
inline MatchingSurface surface_s0(const ImageF& f, const ImageF& g) {
  return MatchingSurface::from_surface(cross_correlate(f, g), Method::s0);
}

// Circular sum of squared differences, via the identity
// ssd(s) = sum f^2 + sum g^2 - 2 * s0(s). Stored negated so that the best
// match is still the surface maximum.
inline MatchingSurface surface_ssd(const ImageF& f, const ImageF& g) {
  require_same_size(f, g);
  double c = 0.0;
  for (double v : f.data) c += v * v;
  for (double v : g.data) c += v * v;
  ImageF s = cross_correlate(f, g);
  for (double& v : s.data) v = -(c - 2.0 * v);
  return MatchingSurface::from_surface(std::move(s), Method::ssd);
}

// Circular sum of absolute differences, evaluated directly; baseline for
// small images only.
inline MatchingSurface surface_sad(const ImageF& f, const ImageF& g) {
  require_same_size(f, g);
  if (f.pixels() > 4096) throw invalid_input("sad surface is direct evaluation, image too large");
  int w = f.width, h = f.height;
  ImageF s(w, h);
  for (int sy = 0; sy < h; ++sy)
    for (int sx = 0; sx < w; ++sx) {
      double acc = 0.0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          acc += std::abs(f.at(x, y) - g.at((x + sx) % w, (y + sy) % h));
      s.at(sx, sy) = -acc;
    }
  return MatchingSurface::from_surface(std::move(s), Method::sad);
}

inline MatchingSurface surface_orientation(const ImageF& f, const ImageF& g) {
  require_same_size(f, g);
  return MatchingSurface::from_surface(
      cross_correlate_fields(orientation_operator(f), orientation_operator(g)),
      Method::orientation);
}

inline MatchingSurface surface_phase(const ImageF& f, const ImageF& g) {
  require_same_size(f, g);
  return MatchingSurface::from_surface(cross_correlate(phase_operator(f), phase_operator(g)),
                                       Method::phase);
}

// Focused variants blur only the FIRST image's whitened representation; the
// second stays crisp. With epsilon = 0 they collapse to the unfocused
// surfaces exactly.
inline MatchingSurface surface_focused_orientation(const ImageF& f, const ImageF& g,
                                                   const FocusConfig& cfg = {}) {
  require_same_size(f, g);
  GradientField ff = focus_field(orientation_operator(f), cfg);
  ImageF s = cross_correlate_fields(ff, orientation_operator(g));
  return MatchingSurface::from_surface(std::move(s), Method::focused_orientation);
}

inline MatchingSurface surface_focused_phase(const ImageF& f, const ImageF& g,
                                             const FocusConfig& cfg = {}) {
  require_same_size(f, g);
  ImageF pf = focus_image(phase_operator(f), cfg);
  ImageF s = cross_correlate(pf, phase_operator(g));
  return MatchingSurface::from_surface(std::move(s), Method::focused_phase);
}

inline MatchingSurface compute_surface(Method m, const ImageF& f, const ImageF& g,
                                       const FocusConfig& cfg = {}) {
  switch (m) {
    case Method::s0: return surface_s0(f, g);
    case Method::ssd: return surface_ssd(f, g);
    case Method::sad: return surface_sad(f, g);
    case Method::orientation: return surface_orientation(f, g);
    case Method::phase: return surface_phase(f, g);
    case Method::focused_orientation: return surface_focused_orientation(f, g, cfg);
    case Method::focused_phase: return surface_focused_phase(f, g, cfg);
  }
  throw invalid_input("unknown method");
}

}  // namespace fcorr
