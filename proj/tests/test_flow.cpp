#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "oracles.hpp"
#include "prym/fixtures.hpp"
#include "prym/flow.hpp"
#include "prym/models.hpp"

using namespace prym;

namespace {

QuadElem q(const Rational& a, const Rational& b = 0, long d = 2) { return QuadElem(QuadraticField(d), a, b); }
Vec2 v(const Rational& x, const Rational& y, long d = 2) { return {q(x, 0, d), q(y, 0, d)}; }

// Every periodic decomposition in this file goes through here.
Decomposition checked(const TranslationSurface& s, const Vec2& dir, int cap = kDefaultStepCap) {
  Decomposition d = decompose(s, dir, cap);
  if (d.periodic()) {
    QuadElem sum(s.field());
    for (const auto& c : d.cylinders) sum += c.circumference * c.height;
    CHECK(sum == d.surface_area);
    CHECK(d.surface_area == norm2(d.direction) * s.area());
  }
  return d;
}

std::multiset<std::pair<long, long>> integer_holonomies(const std::vector<SaddleConnection>& scs) {
  std::multiset<std::pair<long, long>> out;
  for (const auto& sc : scs) {
    REQUIRE(is_rational(sc.holonomy.x));
    REQUIRE(sc.holonomy.x.a().get_den() == 1);
    REQUIRE(sc.holonomy.y.a().get_den() == 1);
    out.insert({sc.holonomy.x.a().get_num().get_si(), sc.holonomy.y.a().get_num().get_si()});
  }
  return out;
}

} // namespace

TEST_CASE("rays on the torus") {
  const auto t = fixtures::square_torus();
  auto r = trace_ray(t, CornerRef{0, 0}, v(2, 1), 100);
  REQUIRE(std::holds_alternative<HitSingularity>(r));
  CHECK(std::get<HitSingularity>(r).holonomy == v(2, 1));
  CHECK(std::get<HitSingularity>(r).crossings.size() == 1);

  auto irrational = trace_ray(t, CornerRef{0, 0}, Vec2(q(1), q(0, 1)), 50);
  REQUIRE(std::holds_alternative<CapExceeded>(irrational));
  CHECK(std::get<CapExceeded>(irrational).steps == 50);

  CHECK_THROWS_AS(trace_ray(t, CornerRef{0, 0}, v(0, 0), 10), InvalidDirection);
  CHECK_THROWS_AS(trace_ray(t, CornerRef{0, 0}, v(-1, 1), 10), InvalidDirection);
  CHECK_THROWS_AS(trace_ray(t, SurfacePoint{0, v(1, 1)}, v(1, 0), 10), StartsOnVertexAmbiguous);

  auto from_inside = trace_ray(t, SurfacePoint{0, v(Rational(1, 2), 0)}, v(1, 2), 100);
  REQUIRE(std::holds_alternative<HitSingularity>(from_inside));
  CHECK(std::get<HitSingularity>(from_inside).holonomy == v(Rational(1, 2), 1));
}

TEST_CASE("sectors around the octagon's cone point") {
  const auto oct = fixtures::regular_octagon();
  // Cone angle 6 pi: every direction leaves three times.
  for (const Vec2& d : {v(1, 0), v(0, 1), v(-3, 2), Vec2(q(1), q(0, 1))}) {
    CHECK(outgoing_corners(oct, 0, d).size() == 3);
  }
}

TEST_CASE("torus saddle connections match the primitive-vector oracle") {
  const auto t = fixtures::square_torus();
  for (long bound : {1L, 2L, 5L, 10L}) {
    CAPTURE(bound);
    const auto scs = saddle_connections(t, q(bound));
    const auto expect = oracle::primitive_vectors(bound);
    const auto got = integer_holonomies(scs);
    CHECK(got.size() == expect.size());
    CHECK(std::set<std::pair<long, long>>(got.begin(), got.end()) == expect);
  }
  CHECK(saddle_connections(t, q(2)).size() == 8);
}

TEST_CASE("saddle connections are traceable and bounded") {
  const auto oct = fixtures::regular_octagon();
  const QuadElem bound = q(3);
  const auto scs = saddle_connections(oct, bound);
  CHECK(scs.size() % 2 == 0);
  for (const auto& sc : scs) {
    CHECK(norm2(sc.holonomy) <= bound * bound);
    auto r = trace_ray(oct, sc.start_corner, sc.holonomy, 1000);
    REQUIRE(std::holds_alternative<HitSingularity>(r));
    CHECK(std::get<HitSingularity>(r).holonomy == sc.holonomy);
  }
  // Reversal is a bijection on saddle connections.
  std::multiset<std::pair<double, double>> fwd, back;
  for (const auto& sc : scs) {
    fwd.insert({to_double(sc.holonomy.x), to_double(sc.holonomy.y)});
    back.insert({-to_double(sc.holonomy.x), -to_double(sc.holonomy.y)});
  }
  CHECK(fwd == back);
}

TEST_CASE("non-convex polygons give the same saddle connections as their squares") {
  // The L of three squares, once as one octagon and once square by square.
  const auto l = fixtures::l_shape();
  const auto squares = fixtures::square_tiled({1, 0, 2}, {2, 1, 0});
  for (long bound : {2L, 4L}) {
    CHECK(integer_holonomies(saddle_connections(l, q(bound))) ==
          integer_holonomies(saddle_connections(squares, q(bound))));
  }
}

TEST_CASE("torus directions match the lattice oracle") {
  const auto t = fixtures::square_torus();
  // Direction (p, q) with gcd 1: one cylinder; after scaling by |v| the
  // circumference is p^2 + q^2 and the height 1 (area p^2 + q^2).
  for (auto [p, r] : std::vector<std::pair<long, long>>{{1, 0}, {0, 1}, {2, 1}, {1, 3}, {-2, 5}, {4, 3}}) {
    CAPTURE(p);
    CAPTURE(r);
    const auto d = checked(t, v(p, r));
    REQUIRE(d.periodic());
    REQUIRE(d.cylinders.size() == 1);
    CHECK(d.cylinders[0].circumference == q(p * p + r * r));
    CHECK(d.cylinders[0].height == q(1));
  }
  const auto two_one = checked(t, v(2, 1));
  CHECK(two_one.cylinders[0].circumference == q(5));
  CHECK(two_one.cylinders[0].height == q(1));
  CHECK(two_one.cylinders[0].modulus() == q(Rational(1, 5)));

  const auto generic = checked(t, Vec2(q(1), q(0, 1)), 1000);
  CHECK_FALSE(generic.periodic());
  CHECK(generic.steps_used >= 1000);
}

TEST_CASE("canonical directions") {
  CHECK(canonical_direction(v(4, 2)) == v(2, 1));
  CHECK(canonical_direction(v(Rational(1, 3), Rational(1, 2))) == v(2, 3));
  CHECK(canonical_direction(v(-4, 2)) == v(-2, 1));
  CHECK(canonical_line(v(-4, -2)) == v(2, 1));
  CHECK(canonical_line(v(-1, 0)) == v(1, 0));
  const Vec2 irr(q(2, 2), q(0, 4));
  CHECK(canonical_direction(irr) == Vec2(q(1), q(4, -2)));
  CHECK(canonical_direction(Vec2(q(0), q(3, 3))) == v(0, 1));
}

TEST_CASE("random square-tiled surfaces match the permutation-cycle oracle") {
  std::mt19937_64 rng(2024);
  int mismatches = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 1 + trial % 8;
    auto [r, u] = oracle::random_origami(rng, n);
    CAPTURE(n);
    const auto s = fixtures::square_tiled(r, u);
    const auto h = checked(s, v(1, 0));
    const auto w = checked(s, v(0, 1));
    REQUIRE(h.periodic());
    REQUIRE(w.periodic());

    // Every vertex counts as a singularity, so each cycle of r is a
    // horizontal cylinder of height 1 and width the cycle length.
    const auto rows = oracle::cycles(r);
    const auto cols = oracle::cycles(u);
    std::multiset<long> oracle_widths, widths;
    for (const auto& c : rows) oracle_widths.insert(static_cast<long>(c.size()));
    bool ok = h.cylinders.size() == rows.size() && w.cylinders.size() == cols.size();
    for (const auto& c : h.cylinders) {
      ok &= c.height == q(1) && is_rational(c.circumference) && c.circumference.a().get_den() == 1;
      widths.insert(c.circumference.a().get_num().get_si());
    }
    ok &= widths == oracle_widths;

    // Crossing counts: square i lies in row cycle(r, i) and column cycle(u, i).
    std::vector<int> row_of(n), col_of(n);
    for (int k = 0; k < static_cast<int>(rows.size()); ++k) {
      for (int i : rows[k]) row_of[i] = k;
    }
    for (int k = 0; k < static_cast<int>(cols.size()); ++k) {
      for (int i : cols[k]) col_of[i] = k;
    }
    std::vector<std::vector<long>> expect(rows.size(), std::vector<long>(cols.size(), 0));
    for (int i = 0; i < n; ++i) ++expect[row_of[i]][col_of[i]];
    const IntMatrix got = crossing_counts(s, h, w);
    // Rows of `got` follow h.cylinders; the bottom of a cylinder runs along
    // the bottom edges of its squares.
    std::vector<std::vector<long>> got_by_row(rows.size());
    for (std::size_t k = 0; k < h.cylinders.size(); ++k) {
      const int sc = h.cylinders[k].bottom.front();
      got_by_row[row_of[h.saddle_connections[sc].start_corner.polygon]] = got[k];
    }
    // Columns are compared up to a permutation.
    auto column_multiset = [&](const std::vector<std::vector<long>>& m) {
      std::multiset<std::vector<long>> out;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        std::vector<long> c;
        for (const auto& row : m) c.push_back(j < row.size() ? row[j] : -1);
        out.insert(c);
      }
      return out;
    };
    ok &= column_multiset(got_by_row) == column_multiset(expect);
    if (!ok) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("decompositions of the L and the octagon") {
  const auto l = fixtures::l_shape();
  const auto h = checked(l, v(1, 0));
  REQUIRE(h.periodic());
  CHECK(h.cylinders.size() == 2);
  std::multiset<Rational> mod;
  for (const auto& m : h.moduli()) mod.insert(m.a());
  CHECK(mod == std::multiset<Rational>{Rational(1, 2), Rational(1)});

  const auto oct = fixtures::regular_octagon();
  const auto scs = saddle_connections(oct, q(2));
  std::set<std::pair<double, double>> seen;
  for (const auto& sc : scs) {
    const Vec2 line = canonical_line(sc.holonomy);
    if (!seen.insert({to_double(line.x), to_double(line.y)}).second) continue;
    const auto d = checked(oct, line);
    REQUIRE(d.periodic());
    // A lattice surface: the moduli of every periodic direction are commensurable.
    for (const auto& m : d.moduli()) CHECK(is_rational(m / d.moduli().front()));
  }
}

TEST_CASE("incommensurable fixture has moduli 1 and sqrt 2") {
  const auto s = fixtures::incommensurable_two_cylinder();
  const auto d = checked(s, v(1, 0));
  REQUIRE(d.periodic());
  std::vector<QuadElem> mods = d.moduli();
  std::sort(mods.begin(), mods.end());
  CHECK(mods == std::vector<QuadElem>{q(1), q(0, 1)});
}

TEST_CASE("cylinder regions tile the surface") {
  for (const auto& s : {fixtures::square_torus(), fixtures::l_shape(), fixtures::regular_octagon()}) {
    for (const Vec2& dir : {v(1, 0), v(1, 1), v(2, 1)}) {
      const auto d = checked(s, dir);
      REQUIRE(d.periodic());
      const auto regions = cylinder_regions(s, dir);
      std::vector<QuadElem> area(d.cylinders.size(), QuadElem(s.field()));
      for (const auto& r : regions) {
        REQUIRE(r.cylinder >= 0);
        REQUIRE(r.cylinder < static_cast<int>(d.cylinders.size()));
        QuadElem a2(s.field());
        for (std::size_t k = 0; k < r.vertices.size(); ++k) {
          a2 += cross(r.vertices[k], r.vertices[(k + 1) % r.vertices.size()]);
        }
        CHECK(sign(a2) > 0);
        area[r.cylinder] += a2 * Rational(1, 2);
      }
      // Regions are in input coordinates; cylinder data carries |v|^2.
      for (std::size_t k = 0; k < area.size(); ++k) {
        CHECK(area[k] * norm2(d.direction) == d.cylinders[k].circumference * d.cylinders[k].height);
      }
    }
  }
}
