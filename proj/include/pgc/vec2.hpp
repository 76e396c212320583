#pragma once

#include <cmath>
#include <complex>

namespace pgc {

/// Point or vector in cage space.
///
/// Plain value type. Finiteness is enforced where values enter the library
/// (curve construction, file parsing), not on every arithmetic result.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator/(const Vec2& a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
  double norm() const { return std::hypot(x, y); }
  constexpr double squared_norm() const { return x * x + y * y; }
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

// a . b^perp with (u, v)^perp = (v, -u); equals the 2D cross product a x b.
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

// (a, b)^perp = (b, -a): clockwise quarter turn, outward normal of a CCW edge.
constexpr Vec2 perp(const Vec2& v) { return {v.y, -v.x}; }

inline std::complex<double> to_complex(const Vec2& v) { return {v.x, v.y}; }
inline Vec2 to_vec2(const std::complex<double>& z) { return {z.real(), z.imag()}; }

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

}  // namespace pgc
