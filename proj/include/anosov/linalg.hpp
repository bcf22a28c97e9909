#pragma once

#include <cmath>

namespace anosov {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline Vec2 normalized(Vec2 v) { return v / norm(v); }
// counter-clockwise quarter turn
inline Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

// row-major [[a, b], [c, d]]
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static Mat2 identity() { return {}; }
  static Mat2 columns(Vec2 c0, Vec2 c1) { return {c0.x, c1.x, c0.y, c1.y}; }
  // clockwise rotation by phi, the sense used by theta
  static Mat2 rotation_cw(double phi) {
    const double cs = std::cos(phi), sn = std::sin(phi);
    return {cs, sn, -sn, cs};
  }

  Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
  bool operator==(const Mat2&) const = default;

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  Mat2 transpose() const { return {a, c, b, d}; }
  Mat2 inverse() const {
    const double D = det();
    return {d / D, -b / D, -c / D, a / D};
  }
  // largest absolute entry
  double max_abs() const {
    return std::fmax(std::fmax(std::fabs(a), std::fabs(b)), std::fmax(std::fabs(c), std::fabs(d)));
  }
};

// operator 2-norm
inline double op_norm(const Mat2& m) {
  const double s = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
  const double D = std::fabs(m.det());
  return std::sqrt(0.5 * (s + std::sqrt(std::fmax(0.0, s * s - 4.0 * D * D))));
}

}  // namespace anosov
