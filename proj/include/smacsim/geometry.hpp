#pragma once

#include <algorithm>
#include <cmath>

namespace smacsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Unit vector along v, or `fallback` when v is zero.
inline Vec2 normalized_or(Vec2 v, Vec2 fallback) {
  const double n = v.norm();
  if (n == 0.0) return fallback;
  return {v.x / n, v.y / n};
}

inline Vec2 clamp_to_map(Vec2 p, double width, double height) {
  return {std::clamp(p.x, 0.0, width), std::clamp(p.y, 0.0, height)};
}

inline bool inside_map(Vec2 p, double width, double height) {
  return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
}

}  // namespace smacsim
