#include "prym/fixtures.hpp"

namespace prym::fixtures {

namespace {

Vec2 pt(QuadraticField, const QuadElem& x, const QuadElem& y) { return {x, y}; }

Vec2 pt(QuadraticField f, long x, long y) { return {QuadElem(f, x), QuadElem(f, y)}; }

} // namespace

TranslationSurface square_torus(long radicand) {
  QuadraticField f(radicand);
  PlanarPolygon sq({pt(f, 0, 0), pt(f, 1, 0), pt(f, 1, 1), pt(f, 0, 1)});
  return TranslationSurface({sq}, {{{0, 0}, {0, 2}}, {{0, 1}, {0, 3}}});
}

TranslationSurface regular_octagon() {
  QuadraticField f(2);
  const QuadElem zero(f), one(f, 1), h(f, 0, Rational(1, 2)); // h = sqrt(2)/2
  const QuadElem r2(f, 0, 1);
  std::vector<Vec2> vs{pt(f, zero, zero),   pt(f, one, zero),      pt(f, one + h, h),   pt(f, one + h, one + h),
                       pt(f, one, one + r2), pt(f, zero, one + r2), pt(f, -h, one + h), pt(f, -h, h)};
  Gluing g;
  for (int i = 0; i < 4; ++i) g.push_back({{0, i}, {0, i + 4}});
  return TranslationSurface({PlanarPolygon(vs)}, g);
}

TranslationSurface l_shape(long radicand) {
  QuadraticField f(radicand);
  PlanarPolygon l({pt(f, 0, 0), pt(f, 1, 0), pt(f, 2, 0), pt(f, 2, 1), pt(f, 1, 1), pt(f, 1, 2), pt(f, 0, 2),
                   pt(f, 0, 1)});
  return TranslationSurface({l}, {{{0, 0}, {0, 5}}, {{0, 1}, {0, 3}}, {{0, 2}, {0, 7}}, {{0, 4}, {0, 6}}});
}

TranslationSurface incommensurable_two_cylinder() {
  QuadraticField f(2);
  const QuadElem top = QuadElem(f, 2, 1); // 2 + sqrt(2)
  PlanarPolygon l({pt(f, 0, 0), pt(f, 1, 0), pt(f, 2, 0), pt(f, 2, 2), pt(f, 1, 2), pt(f, QuadElem(f, 1), top),
                   pt(f, QuadElem(f), top), pt(f, 0, 2)});
  return TranslationSurface({l}, {{{0, 0}, {0, 5}}, {{0, 1}, {0, 3}}, {{0, 2}, {0, 7}}, {{0, 4}, {0, 6}}});
}

TranslationSurface square_tiled(const std::vector<int>& right, const std::vector<int>& up, long radicand) {
  QuadraticField f(radicand);
  const int n = static_cast<int>(right.size());
  std::vector<PlanarPolygon> squares;
  for (int i = 0; i < n; ++i) squares.emplace_back(std::vector<Vec2>{pt(f, 0, 0), pt(f, 1, 0), pt(f, 1, 1), pt(f, 0, 1)});
  Gluing g;
  for (int i = 0; i < n; ++i) {
    g.push_back({{i, 1}, {right[i], 3}});
    g.push_back({{i, 2}, {up[i], 0}});
  }
  return TranslationSurface(std::move(squares), g);
}

} // namespace prym::fixtures
