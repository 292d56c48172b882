#pragma once

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <numbers>
#include <vector>

#include "image.hpp"

namespace fcorr {

using Spectrum = Image<std::complex<double>>;

namespace detail {

// One-shot FFTW transform. Plans are created with FFTW_ESTIMATE so input
// data is never clobbered by planning and results are deterministic.
inline void fftw_transform(const std::complex<double>* in, std::complex<double>* out,
                           int width, int height, int sign) {
  std::size_t n = static_cast<std::size_t>(width) * height;
  fftw_complex* src = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  fftw_complex* dst = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!src || !dst) {
    if (src) fftw_free(src);
    if (dst) fftw_free(dst);
    throw numerical_error("fftw allocation failed");
  }
  fftw_plan plan = fftw_plan_dft_2d(height, width, src, dst, sign, FFTW_ESTIMATE);
  if (!plan) {
    fftw_free(src);
    fftw_free(dst);
    throw numerical_error("fftw planning failed");
  }
  for (std::size_t i = 0; i < n; ++i) {
    src[i][0] = in[i].real();
    src[i][1] = in[i].imag();
  }
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  for (std::size_t i = 0; i < n; ++i) out[i] = {dst[i][0], dst[i][1]};
  fftw_free(src);
  fftw_free(dst);
}

}  // namespace detail

// Unnormalized forward 2D DFT.
inline Spectrum dft2(const Spectrum& in) {
  Spectrum out(in.width, in.height);
  detail::fftw_transform(in.data.data(), out.data.data(), in.width, in.height, FFTW_FORWARD);
  return out;
}

inline Spectrum dft2(const ImageF& img) {
  Spectrum in(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels(); ++i) in.data[i] = img.data[i];
  return dft2(in);
}

// Inverse transform with 1/N normalization, complex result.
inline Spectrum idft2_complex(const Spectrum& spec) {
  Spectrum out(spec.width, spec.height);
  detail::fftw_transform(spec.data.data(), out.data.data(), spec.width, spec.height,
                         FFTW_BACKWARD);
  double scale = 1.0 / static_cast<double>(spec.pixels());
  for (auto& v : out.data) v *= scale;
  return out;
}

// Inverse transform promised to be real: the imaginary residue must stay
// below 1e-8 relative to the real magnitude, otherwise this is an error.
inline ImageF idft2(const Spectrum& spec) {
  Spectrum c = idft2_complex(spec);
  double max_re = 0.0, max_im = 0.0;
  for (const auto& v : c.data) {
    max_re = std::max(max_re, std::abs(v.real()));
    max_im = std::max(max_im, std::abs(v.imag()));
  }
  if (max_im > 1e-8 * std::max(max_re, 1e-300))
    throw numerical_error("inverse transform has non-negligible imaginary part");
  ImageF out(spec.width, spec.height);
  for (std::size_t i = 0; i < out.pixels(); ++i) out.data[i] = c.data[i].real();
  return out;
}

struct PeriodicSmooth {
  ImageF periodic;
  ImageF smooth;
};

// Split img into a wrap-around-continuous part and a smooth residue. The
// smooth part solves a discrete Poisson equation driven by the opposite-
// border differences; periodic = img - smooth holds exactly.
inline PeriodicSmooth periodic_smooth_decompose(const ImageF& u) {
  int w = u.width, h = u.height;
  ImageF v(w, h, 0.0);
  for (int x = 0; x < w; ++x) {
    double d = u.at(x, h - 1) - u.at(x, 0);
    v.at(x, 0) += d;
    v.at(x, h - 1) -= d;
  }
  for (int y = 0; y < h; ++y) {
    double d = u.at(w - 1, y) - u.at(0, y);
    v.at(0, y) += d;
    v.at(w - 1, y) -= d;
  }

  Spectrum vh = dft2(v);
  const double tau = 2.0 * std::numbers::pi;
  std::vector<double> cx(w), cy(h);
  for (int x = 0; x < w; ++x) cx[x] = 2.0 * std::cos(tau * x / w);
  for (int y = 0; y < h; ++y) cy[y] = 2.0 * std::cos(tau * y / h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (x == 0 && y == 0) {
        vh.at(0, 0) = 0.0;
        continue;
      }
      vh.at(x, y) /= cx[x] + cy[y] - 4.0;
    }

  PeriodicSmooth out;
  out.smooth = idft2(vh);
  out.periodic = ImageF(w, h);
  for (std::size_t i = 0; i < u.pixels(); ++i)
    out.periodic.data[i] = u.data[i] - out.smooth.data[i];
  return out;
}

enum class CorrMode { circular, linear };

// Circular cross-correlation surface S(s) = sum_x a(x) * b(x + s), i.e. the
// surface peaks at the shift of b relative to a. Index (0,0) is zero shift;
// negative shifts wrap. Linear mode zero-pads both images to double size and
// exists for oracle tests; its surface is indexed the same way modulo the
// padded size.
inline ImageF cross_correlate(const ImageF& a, const ImageF& b,
                              CorrMode mode = CorrMode::circular) {
  require_same_size(a, b);
  if (mode == CorrMode::linear) {
    ImageF pa(2 * a.width, 2 * a.height, 0.0), pb(2 * a.width, 2 * a.height, 0.0);
    for (int y = 0; y < a.height; ++y)
      for (int x = 0; x < a.width; ++x) {
        pa.at(x, y) = a.at(x, y);
        pb.at(x, y) = b.at(x, y);
      }
    return cross_correlate(pa, pb, CorrMode::circular);
  }
  Spectrum fa = dft2(a), fb = dft2(b);
  Spectrum prod(a.width, a.height);
  for (std::size_t i = 0; i < prod.pixels(); ++i)
    prod.data[i] = std::conj(fa.data[i]) * fb.data[i];
  return idft2(prod);
}

// Sum of the per-channel circular correlations: the scalar-product
// correlation of two vector fields.
inline ImageF cross_correlate_fields(const GradientField& a, const GradientField& b) {
  require_same_size(a.x, b.x);
  ImageF sx = cross_correlate(a.x, b.x);
  ImageF sy = cross_correlate(a.y, b.y);
  for (std::size_t i = 0; i < sx.pixels(); ++i) sx.data[i] += sy.data[i];
  return sx;
}

namespace detail {

inline std::vector<double> gaussian_taps(double sigma, int& radius) {
  radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> taps(2 * radius + 1);
  double s2 = 2.0 * sigma * sigma;
  for (int i = -radius; i <= radius; ++i) taps[i + radius] = std::exp(-(i * i) / s2);
  return taps;
}

}  // namespace detail

// Separable Gaussian blur truncated at 4 sigma. Windows are cut at the image
// border and the kernel is renormalized over the surviving taps, so constant
// images are preserved exactly.
inline ImageF gaussian_blur(const ImageF& img, double sigma) {
  if (sigma <= 0.0) return img;
  int r = 0;
  std::vector<double> taps = detail::gaussian_taps(sigma, r);
  int w = img.width, h = img.height;

  ImageF tmp(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0, wsum = 0.0;
      int i0 = std::max(-r, -x), i1 = std::min(r, w - 1 - x);
      for (int i = i0; i <= i1; ++i) {
        double t = taps[i + r];
        acc += t * img.at(x + i, y);
        wsum += t;
      }
      tmp.at(x, y) = acc / wsum;
    }
  ImageF out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0, wsum = 0.0;
      int i0 = std::max(-r, -y), i1 = std::min(r, h - 1 - y);
      for (int i = i0; i <= i1; ++i) {
        double t = taps[i + r];
        acc += t * tmp.at(x, y + i);
        wsum += t;
      }
      out.at(x, y) = acc / wsum;
    }
  return out;
}

// Same blur with circular boundary, used by the synthetic sea texture.
inline ImageF gaussian_blur_wrap(const ImageF& img, double sigma) {
  if (sigma <= 0.0) return img;
  int r = 0;
  std::vector<double> taps = detail::gaussian_taps(sigma, r);
  double wsum = 0.0;
  for (double t : taps) wsum += t;
  int w = img.width, h = img.height;

  ImageF tmp(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        int xi = (x + i) % w;
        if (xi < 0) xi += w;
        acc += taps[i + r] * img.at(xi, y);
      }
      tmp.at(x, y) = acc / wsum;
    }
  ImageF out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        int yi = (y + i) % h;
        if (yi < 0) yi += h;
        acc += taps[i + r] * tmp.at(x, yi);
      }
      out.at(x, y) = acc / wsum;
    }
  return out;
}

// Mean over a (2r+1)^2 window truncated at the borders, via summed-area
// tables.
inline ImageF box_mean(const ImageF& img, int radius) {
  if (radius <= 0) return img;
  int w = img.width, h = img.height;
  std::vector<double> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
  auto s = [&](int x, int y) -> double& {
    return sat[static_cast<std::size_t>(y) * (w + 1) + x];
  };
  for (int y = 1; y <= h; ++y)
    for (int x = 1; x <= w; ++x)
      s(x, y) = img.at(x - 1, y - 1) + s(x - 1, y) + s(x, y - 1) - s(x - 1, y - 1);

  ImageF out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int x0 = std::max(0, x - radius), x1 = std::min(w - 1, x + radius);
      int y0 = std::max(0, y - radius), y1 = std::min(h - 1, y + radius);
      double total = s(x1 + 1, y1 + 1) - s(x0, y1 + 1) - s(x1 + 1, y0) + s(x0, y0);
      out.at(x, y) = total / ((x1 - x0 + 1) * (y1 - y0 + 1));
    }
  return out;
}

}  // namespace fcorr
