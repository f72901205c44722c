#pragma once

#include <cmath>

#include "mobinfer/errors.hpp"

namespace mobinfer {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) noexcept {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) noexcept {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Vec2& operator*=(double s) noexcept {
    x *= s;
    y *= s;
    return *this;
  }

  friend Vec2 operator+(Vec2 a, Vec2 b) noexcept { return a += b; }
  friend Vec2 operator-(Vec2 a, Vec2 b) noexcept { return a -= b; }
  friend Vec2 operator*(double s, Vec2 v) noexcept { return v *= s; }
  friend Vec2 operator*(Vec2 v, double s) noexcept { return v *= s; }
  friend Vec2 operator-(Vec2 v) noexcept { return {-v.x, -v.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// sqrt(x*x + y*y) rather than std::hypot: IEEE-exact operations only, so
// distances are reproducible across libm versions.
inline double norm(Vec2 v) noexcept { return std::sqrt(v.x * v.x + v.y * v.y); }

enum class GeometryKind { plane, torus };

// The space a movement trace lives in: an unbounded plane or a wrap-around
// rectangle. Torus distances use the minimum-image convention.
class Geometry {
 public:
  Geometry() = default;  // plane

  static Geometry plane() noexcept { return {}; }

  static Geometry torus(double width, double height) {
    if (!(width > 0.0) || !(height > 0.0)) {
      throw ConfigError("torus dimensions must be strictly positive");
    }
    Geometry g;
    g.kind_ = GeometryKind::torus;
    g.width_ = width;
    g.height_ = height;
    return g;
  }

  GeometryKind kind() const noexcept { return kind_; }
  bool is_torus() const noexcept { return kind_ == GeometryKind::torus; }
  double width() const noexcept { return width_; }
  double height() const noexcept { return height_; }

  // Shortest vector from p to q. On the torus each axis is wrapped into
  // [-size/2, size/2]; a tie at exactly half the box resolves to the
  // positive image.
  Vec2 displacement(Vec2 p, Vec2 q) const noexcept {
    Vec2 d{q.x - p.x, q.y - p.y};
    if (is_torus()) {
      d.x = wrap_half(d.x, width_);
      d.y = wrap_half(d.y, height_);
    }
    return d;
  }

  double distance(Vec2 p, Vec2 q) const noexcept {
    return norm(displacement(p, q));
  }

  // Wrap into [0, width) x [0, height); identity on the plane.
  Vec2 canonical(Vec2 p) const noexcept {
    if (!is_torus()) return p;
    return {wrap_unit(p.x, width_), wrap_unit(p.y, height_)};
  }

  friend bool operator==(const Geometry&, const Geometry&) = default;

 private:
  static double wrap_half(double d, double size) noexcept {
    d = std::fmod(d, size);  // (-size, size), exact
    if (d > 0.5 * size) {
      d -= size;
    } else if (d <= -0.5 * size) {  // tie at -size/2 wraps to +size/2
      d += size;
    }
    return d;
  }

  static double wrap_unit(double v, double size) noexcept {
    double r = std::fmod(v, size);
    if (r < 0.0) r += size;
    if (r >= size) r -= size;  // fmod(-tiny) + size can round up to size
    return r;
  }

  GeometryKind kind_ = GeometryKind::plane;
  double width_ = 0.0;
  double height_ = 0.0;
};

}  // namespace mobinfer
