#pragma once

#include <array>
#include <compare>
#include <iosfwd>

#include "prym/qfield.hpp"

namespace prym {

struct Vec2 {
  QuadElem x;
  QuadElem y;

  Vec2(QuadElem x_, QuadElem y_) : x(std::move(x_)), y(std::move(y_)) {}
  static Vec2 zero(QuadraticField f) { return {QuadElem(f), QuadElem(f)}; }

  QuadraticField field() const { return x.field(); }
  bool is_zero() const { return x.is_zero() && y.is_zero(); }

  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  friend Vec2 operator+(Vec2 u, const Vec2& v) { return u += v; }
  friend Vec2 operator-(Vec2 u, const Vec2& v) { return u -= v; }
  Vec2 operator-() const { return {-x, -y}; }
  friend Vec2 operator*(const QuadElem& s, const Vec2& v) { return {s * v.x, s * v.y}; }
  friend Vec2 operator*(const Rational& s, const Vec2& v) { return {s * v.x, s * v.y}; }

  friend bool operator==(const Vec2& u, const Vec2& v) { return u.x == v.x && u.y == v.y; }
};

inline QuadElem cross(const Vec2& u, const Vec2& v) { return u.x * v.y - u.y * v.x; }
inline QuadElem dot(const Vec2& u, const Vec2& v) { return u.x * v.x + u.y * v.y; }
inline QuadElem norm2(const Vec2& v) { return dot(v, v); }

/// Orientation of (u, v): +1 if v is counter-clockwise from u.
inline int orient(const Vec2& u, const Vec2& v) { return sign(cross(u, v)); }

/// True when u and v point the same way (parallel, positive multiple).
inline bool same_direction(const Vec2& u, const Vec2& v) {
  return sign(cross(u, v)) == 0 && sign(dot(u, v)) > 0;
}

/// Lexicographic order on (x, y); used for canonical sorting.
std::strong_ordering lex_compare(const Vec2& u, const Vec2& v);

/// Counter-clockwise angle comparison measured from `from`, angles in [0, 2pi).
/// Returns <0 if a comes strictly before b when sweeping counter-clockwise.
int ccw_angle_compare(const Vec2& from, const Vec2& a, const Vec2& b);

/// Membership of d in the half-open counter-clockwise sector [lo, hi).
/// lo == hi (same direction) denotes the full turn.
bool in_ccw_sector(const Vec2& lo, const Vec2& hi, const Vec2& d);

/// 2x2 matrix [[a, b], [c, d]] over Q(sqrt(D)).
struct Mat2 {
  QuadElem a, b, c, d;

  static Mat2 identity(QuadraticField f) { return {QuadElem(f, 1), QuadElem(f), QuadElem(f), QuadElem(f, 1)}; }
  /// [[a, b], [-b, a]]: sends (a, b) to (a^2 + b^2, 0).
  static Mat2 rotation_scaling(const Vec2& dir) { return {dir.x, dir.y, -dir.y, dir.x}; }

  QuadElem det() const { return a * d - b * c; }
  Vec2 operator()(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  friend Mat2 operator*(const Mat2& m, const Mat2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  }
  /// Throws SingularMatrix when det == 0.
  Mat2 inverse() const;
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

std::ostream& operator<<(std::ostream& os, const Vec2& v);

} // namespace prym
