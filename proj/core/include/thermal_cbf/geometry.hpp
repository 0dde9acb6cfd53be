#pragma once

#include <cmath>
#include <cstddef>
#include <compare>

namespace thermal_cbf {

/// Planar vector in meters (positions) or meters/second (velocities).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Row/column address of a raster cell. Row index grows along +y.
struct Cell {
  std::ptrdiff_t row = 0;
  std::ptrdiff_t col = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

}  // namespace thermal_cbf
