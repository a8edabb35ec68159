#include "prym/vec2.hpp"

#include <ostream>

namespace prym {

std::strong_ordering lex_compare(const Vec2& u, const Vec2& v) {
  if (auto c = compare(u.x, v.x); c != 0) return c;
  return compare(u.y, v.y);
}

namespace {

// 0 for angles in [0, pi) measured from `from`, 1 for [pi, 2pi).
int half_turn(const Vec2& from, const Vec2& v) {
  int c = orient(from, v);
  if (c > 0) return 0;
  if (c < 0) return 1;
  return sign(dot(from, v)) > 0 ? 0 : 1;
}

} // namespace

int ccw_angle_compare(const Vec2& from, const Vec2& a, const Vec2& b) {
  int ha = half_turn(from, a);
  int hb = half_turn(from, b);
  if (ha != hb) return ha < hb ? -1 : 1;
  return -orient(a, b);
}

bool in_ccw_sector(const Vec2& lo, const Vec2& hi, const Vec2& d) {
  if (same_direction(lo, hi)) return true;
  return ccw_angle_compare(lo, d, hi) < 0;
}

Mat2 Mat2::inverse() const {
  QuadElem dt = det();
  if (dt.is_zero()) throw SingularMatrix("determinant is zero");
  QuadElem inv = prym::inverse(dt);
  return {d * inv, -b * inv, -c * inv, a * inv};
}

std::ostream& operator<<(std::ostream& os, const Vec2& v) { return os << "(" << v.x << ", " << v.y << ")"; }

} // namespace prym
