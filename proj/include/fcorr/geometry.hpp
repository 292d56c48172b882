#pragma once

#include <cmath>

#include "errors.hpp"

namespace fcorr {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

// Row-major 2x2 matrix [a b; c d].
struct Mat2 {
  double a = 1.0, b = 0.0;
  double c = 0.0, d = 1.0;

  static Mat2 identity() { return {}; }

  static Mat2 rotation(double rad) {
    double co = std::cos(rad), si = std::sin(rad);
    return {co, -si, si, co};
  }

  static Mat2 scaling(double sx, double sy) { return {sx, 0.0, 0.0, sy}; }

  double det() const { return a * d - b * c; }

  Mat2 inverse() const {
    double dt = det();
    if (dt == 0.0) throw numerical_error("singular 2x2 matrix");
    return {d / dt, -b / dt, -c / dt, a / dt};
  }
};

inline Vec2 operator*(const Mat2& m, Vec2 v) {
  return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
}

inline Mat2 operator*(const Mat2& m, const Mat2& n) {
  return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
          m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

inline Mat2 operator-(const Mat2& m, const Mat2& n) {
  return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d};
}

// Largest singular value. For 2x2 the eigenvalues of M^T M are
// (t +- sqrt(t^2 - 4 det^2)) / 2 with t = sum of squared entries.
inline double spectral_norm(const Mat2& m) {
  double t = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
  double dt = m.det();
  double disc = t * t - 4.0 * dt * dt;
  if (disc < 0.0) disc = 0.0;  // rounding guard
  return std::sqrt(0.5 * (t + std::sqrt(disc)));
}

// x -> linear * x + translation
struct AffineTransform {
  Mat2 linear;
  Vec2 translation;

  Vec2 operator()(Vec2 v) const { return linear * v + translation; }

  AffineTransform inverse() const {
    Mat2 inv = linear.inverse();
    Vec2 t = inv * translation;
    return {inv, {-t.x, -t.y}};
  }

  static AffineTransform identity() { return {}; }
  static AffineTransform translate(double dx, double dy) {
    return {Mat2::identity(), {dx, dy}};
  }
  static AffineTransform rotate_about(double rad, Vec2 center) {
    Mat2 r = Mat2::rotation(rad);
    Vec2 rc = r * center;
    return {r, {center.x - rc.x, center.y - rc.y}};
  }
};

// Composition: (s * t)(x) = s(t(x))
inline AffineTransform operator*(const AffineTransform& s, const AffineTransform& t) {
  Vec2 st = s.linear * t.translation;
  return {s.linear * t.linear, {st.x + s.translation.x, st.y + s.translation.y}};
}

// Deformation strength ||C - I|| in the spectral norm. A pure rotation by
// theta gives exactly 2*sin(theta/2).
inline double distortion_norm(const Mat2& c) {
  return spectral_norm(c - Mat2::identity());
}

inline double distortion_norm(const AffineTransform& t) {
  return distortion_norm(t.linear);
}

}  // namespace fcorr
