#pragma once

#include <vector>

#include "image.hpp"
#include "spectral.hpp"

namespace fcorr {

// Spatially varying blur: sigma grows linearly (rate epsilon) with the
// distance from the focus point, capped at sigma_max. Negative focus / cap
// values select the defaults (image center, epsilon * diagonal / 2).
struct FocusConfig {
  double epsilon = 0.06;
  double focus_x = -1.0;
  double focus_y = -1.0;
  int levels = 16;
  double sigma_max = -1.0;
};

struct ResolvedFocus {
  double epsilon = 0.0;
  Vec2 focus;
  double sigma_max = 0.0;
  int levels = 2;
};

inline ResolvedFocus resolve_focus(const FocusConfig& cfg, int width, int height) {
  if (cfg.epsilon < 0.0) throw invalid_input("epsilon must be >= 0");
  if (cfg.levels < 2) throw invalid_input("levels must be >= 2");
  ResolvedFocus rf;
  rf.epsilon = cfg.epsilon;
  rf.levels = cfg.levels;
  rf.focus = {cfg.focus_x < 0.0 ? width / 2.0 : cfg.focus_x,
              cfg.focus_y < 0.0 ? height / 2.0 : cfg.focus_y};
  if (rf.focus.x > width - 1 || rf.focus.y > height - 1)
    throw invalid_input("focus point outside the image");
  rf.sigma_max =
      cfg.sigma_max > 0.0 ? cfg.sigma_max : cfg.epsilon * std::hypot(width, height) / 2.0;
  return rf;
}

inline double sigma_at(Vec2 p, const ResolvedFocus& rf) {
  return std::min(rf.epsilon * norm(p - rf.focus), rf.sigma_max);
}

inline double sigma_at(Vec2 p, const FocusConfig& cfg, int width, int height) {
  if (cfg.epsilon == 0.0) return 0.0;
  return sigma_at(p, resolve_focus(cfg, width, height));
}

// Variable-sigma Gaussian blur realized as a stack of `levels` global blurs
// with per-pixel linear interpolation between the two bracketing levels.
// Pixels at the focus (sigma = 0) keep their original value exactly.
inline ImageF focus_image(const ImageF& img, const FocusConfig& cfg) {
  if (cfg.epsilon == 0.0) return img;
  ResolvedFocus rf = resolve_focus(cfg, img.width, img.height);
  if (rf.sigma_max <= 0.0) return img;

  std::vector<ImageF> stack;
  stack.reserve(rf.levels);
  stack.push_back(img);
  for (int i = 1; i < rf.levels; ++i)
    stack.push_back(gaussian_blur(img, rf.sigma_max * i / (rf.levels - 1)));

  double step = rf.sigma_max / (rf.levels - 1);
  ImageF out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double sg = sigma_at({static_cast<double>(x), static_cast<double>(y)}, rf);
      if (sg <= 0.0) {
        out.at(x, y) = img.at(x, y);
        continue;
      }
      double t = sg / step;
      int lo = std::min(static_cast<int>(t), rf.levels - 1);
      int hi = std::min(lo + 1, rf.levels - 1);
      double fr = t - lo;
      out.at(x, y) = stack[lo].at(x, y) * (1.0 - fr) + stack[hi].at(x, y) * fr;
    }
  return out;
}

// Channel-wise focusing of a vector field. Vectors are deliberately NOT
// re-normalized afterwards: blurring shortens them where orientations
// disagree, which is exactly the averaging the method relies on.
inline GradientField focus_field(const GradientField& field, const FocusConfig& cfg) {
  return {focus_image(field.x, cfg), focus_image(field.y, cfg)};
}

}  // namespace fcorr
