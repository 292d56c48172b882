#pragma once

#include "image.hpp"
#include "spectral.hpp"

namespace fcorr {

// Unit gradient field: central differences inside, one-sided at the borders.
// Pixels whose gradient norm falls below 1e-8 of the image's value range get
// the zero vector; featureless areas contribute nothing to correlation.
inline GradientField orientation_operator(const ImageF& img) {
  if (img.width < 3 || img.height < 3) throw invalid_input("image too small for gradients");
  int w = img.width, h = img.height;
  GradientField out{ImageF(w, h), ImageF(w, h)};
  double eps = 1e-8 * (max_value(img) - min_value(img));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double gx, gy;
      if (x == 0)
        gx = img.at(1, y) - img.at(0, y);
      else if (x == w - 1)
        gx = img.at(w - 1, y) - img.at(w - 2, y);
      else
        gx = (img.at(x + 1, y) - img.at(x - 1, y)) / 2.0;
      if (y == 0)
        gy = img.at(x, 1) - img.at(x, 0);
      else if (y == h - 1)
        gy = img.at(x, h - 1) - img.at(x, h - 2);
      else
        gy = (img.at(x, y + 1) - img.at(x, y - 1)) / 2.0;
      double n = std::hypot(gx, gy);
      if (n > eps) {
        out.x.at(x, y) = gx / n;
        out.y.at(x, y) = gy / n;
      }
    }
  return out;
}

// Keep only Fourier phase: the border-corrected periodic part is transformed,
// every bin is normalized to unit modulus (zero bins stay zero), and the
// result is brought back to the spatial domain so that spatial operations
// (focusing in particular) can be applied to it.
inline ImageF phase_operator(const ImageF& img) {
  ImageF p = periodic_smooth_decompose(img).periodic;
  Spectrum f = dft2(p);
  for (auto& v : f.data) {
    double m = std::abs(v);
    v = m > 1e-300 ? v / m : 0.0;
  }
  return idft2(f);
}

// Local standardization: (f - m) / sigma over a sliding n x n window,
// truncated at the borders. Windows with sigma below 1e-8 of the value range
// yield 0.
inline ImageF normalized_operator(const ImageF& img, int n) {
  if (n < 3 || n % 2 == 0 || n > std::min(img.width, img.height))
    throw invalid_input("window side must be odd, >= 3 and fit the image");
  int r = n / 2;
  ImageF m = box_mean(img, r);
  ImageF sq(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels(); ++i) sq.data[i] = img.data[i] * img.data[i];
  ImageF m2 = box_mean(sq, r);
  double eps = 1e-8 * (max_value(img) - min_value(img));
  ImageF out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels(); ++i) {
    double var = m2.data[i] - m.data[i] * m.data[i];
    double sg = var > 0.0 ? std::sqrt(var) : 0.0;
    out.data[i] = sg > eps ? (img.data[i] - m.data[i]) / sg : 0.0;
  }
  return out;
}

}  // namespace fcorr
