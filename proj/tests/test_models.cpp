#include <doctest.h>

#include "prym/flow.hpp"
#include "prym/models.hpp"

using namespace prym;

namespace {

QuadElem q(long d, const Rational& a, const Rational& b = 0) { return QuadElem(QuadraticField(d), a, b); }

// Midpoint of the admissible slit interval, or nullopt when it is empty.
std::optional<CandidateSpec> midpoint_spec(int model, const Table1Row& row, const Rational& t1 = 0,
                                           const Rational& t2 = 0) {
  const auto& d = builtin_diagram(model);
  CandidateSpec s;
  s.model = std::to_string(model);
  s.radicand = row.radicand;
  s.w2 = row.w2;
  s.h2 = row.h2;
  s.t1 = q(row.radicand, t1);
  s.t2 = t2 * row.w2;
  const auto r = slit_range(d, row.w2);
  if (!r) {
    s.s = q(row.radicand, 0);
    return s;
  }
  if (!r->lo || !r->hi || sign(*r->hi - *r->lo) <= 0) return std::nullopt;
  s.s = (*r->lo + *r->hi) * Rational(1, 2);
  return s;
}

} // namespace

TEST_CASE("admissible table rows as printed") {
  const auto& rows = table1_rows();
  REQUIRE(rows.size() == 5);
  // Q[sqrt 2]: (72 48; 24 18), sqrt(2)/2, 2 sqrt(2)
  CHECK(rows[0].radicand == 2);
  CHECK(rows[0].matrix == IntMatrix{{72, 48}, {24, 18}});
  CHECK(rows[0].w2 == q(2, 0, 1) / q(2, 2));
  CHECK(rows[0].h2 == q(2, 2) * q(2, 0, 1));
  // Q[sqrt 3]: (72 24; 12 6), (-1 + sqrt 3)/2, -2 + 2 sqrt 3
  CHECK(rows[1].radicand == 3);
  CHECK(rows[1].matrix == IntMatrix{{72, 24}, {12, 6}});
  CHECK(rows[1].w2 == (q(3, -1) + q(3, 0, 1)) / q(3, 2));
  CHECK(rows[1].h2 == q(3, -2) + q(3, 2) * q(3, 0, 1));
  // Q[sqrt 3]: (72 24; 48 18), (1 + sqrt 3)/2, 2 + 2 sqrt 3
  CHECK(rows[2].radicand == 3);
  CHECK(rows[2].matrix == IntMatrix{{72, 24}, {48, 18}});
  CHECK(rows[2].w2 == (q(3, 1) + q(3, 0, 1)) / q(3, 2));
  CHECK(rows[2].h2 == q(3, 2) + q(3, 2) * q(3, 0, 1));
  // Q[sqrt 3]: (36 12; 30 12), sqrt 3, 2 sqrt(3)/3
  CHECK(rows[3].radicand == 3);
  CHECK(rows[3].matrix == IntMatrix{{36, 12}, {30, 12}});
  CHECK(rows[3].w2 == q(3, 0, 1));
  CHECK(rows[3].h2 == q(3, 2) * q(3, 0, 1) / q(3, 3));
  // Q[sqrt 33]: (6 24; 12 54), (3 + sqrt 33)/2, (3 + sqrt 33)/6
  CHECK(rows[4].radicand == 33);
  CHECK(rows[4].matrix == IntMatrix{{6, 24}, {12, 54}});
  CHECK(rows[4].w2 == (q(33, 3) + q(33, 0, 1)) / q(33, 2));
  CHECK(rows[4].h2 == (q(33, 3) + q(33, 0, 1)) / q(33, 6));
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].index == static_cast<int>(i) + 1);
}

TEST_CASE("built-in diagrams") {
  const auto names = builtin_diagram_names();
  CHECK(names.size() == 11);
  for (int m = 1; m <= 8; ++m) {
    const auto& d = builtin_diagram(m);
    CHECK(d.model == m);
    CHECK(d.cylinders.size() == 3);
    CHECK(d.expected_orders == std::vector<int>{2, 2});
    REQUIRE(d.involution);
    CHECK(d.involution->cylinders == std::vector<int>{2, 1, 0});
    CHECK(&builtin_diagram("M" + std::to_string(m)) == &d);
  }
  CHECK_THROWS_AS(builtin_diagram(9), UnknownModel);
  CHECK_THROWS_AS(builtin_diagram("M9"), UnknownModel);
}

TEST_CASE("every feasible model and row builds a Prym(2,2) surface") {
  int built = 0;
  for (int m = 1; m <= 8; ++m) {
    for (const auto& row : table1_rows()) {
      const auto spec = midpoint_spec(m, row, Rational(1, 3), Rational(1, 2));
      if (!spec) continue;
      CAPTURE(m);
      CAPTURE(row.index);
      const auto s = build_candidate(*spec);
      CHECK(s.stratum().genus == 3);
      CHECK(s.stratum().zero_orders() == std::vector<int>{2, 2});
      const auto map = builtin_diagram(m).cell_map();
      REQUIRE(map);
      CHECK(check_involution(s, *map));
      // Normalization w(C1) = h(C1) = 1 and the row's C2 data.
      const auto h = decompose(s, Vec2(q(row.radicand, 1), q(row.radicand, 0)));
      REQUIRE(h.periodic());
      CHECK(h.cylinders.size() == 3);
      ++built;
    }
  }
  CHECK(built > 0);
}

TEST_CASE("slit parameters outside the admissible interval are rejected") {
  const auto& row = table1_rows()[4];
  for (int m = 1; m <= 8; ++m) {
    const auto& d = builtin_diagram(m);
    const auto r = slit_range(d, row.w2);
    if (!r || !r->hi) continue;
    auto spec = midpoint_spec(m, row);
    if (!spec) continue;
    spec->s = *r->hi;
    CHECK_THROWS_AS(build_candidate(*spec), SegmentOverflow);
  }
  auto spec = midpoint_spec(5, row);
  if (spec) {
    spec->t1 = q(33, 1);
    CHECK_THROWS_AS(build_candidate(*spec), SegmentOverflow);
  }
}

TEST_CASE("diagram parsing errors") {
  const char* bad_width = R"({"id": "x", "expected_orders": [0], "lengths": {"0": [1, 0, 0]},
    "cylinders": [{"name": "C", "bottom": [0], "top": [0], "width": [2, 0, 0], "height": [1, 0], "twist": "t1"}]})";
  CHECK_THROWS_AS(parse_diagram(parse_json(bad_width, "d"), "d"), InvalidDiagram);
  const char* unmatched = R"({"id": "x", "expected_orders": [0], "lengths": {"0": [1, 0, 0], "1": [1, 0, 0]},
    "cylinders": [{"name": "C", "bottom": [0], "top": [1], "width": [1, 0, 0], "height": [1, 0], "twist": "t1"}]})";
  CHECK_THROWS_AS(parse_diagram(parse_json(unmatched, "d"), "d"), InvalidDiagram);
}

TEST_CASE("manifests") {
  const auto spec = midpoint_spec(4, table1_rows()[3], Rational(1, 2), Rational(1, 4));
  REQUIRE(spec);
  const std::string text = serialize_manifest({*spec, *spec});
  const auto back = load_manifest(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == *spec);
  CHECK(serialize_manifest(back) == text);
  CHECK(load_manifest("[]").empty());

  CHECK_THROWS_AS(load_manifest("[{\"model\": 1"), ParseError);
  CHECK_THROWS_AS(load_manifest("{}"), ParseError);
  Json j = to_json(*spec);
  j["model"] = 12;
  CHECK_THROWS_AS(manifest_from_json(Json::array({j})), UnknownModel);
  j["model"] = "no-such-diagram";
  CHECK_THROWS_AS(manifest_from_json(Json::array({j})), UnknownModel);
  j = to_json(*spec);
  j["h2"] = to_json(q(3, 5));
  CHECK_THROWS_AS(manifest_from_json(Json::array({j})), NonTable1Parameters);
  j = to_json(*spec);
  j["matrix"] = IntMatrix{{1, 2}, {3, 4}};
  CHECK_THROWS_AS(manifest_from_json(Json::array({j})), NonTable1Parameters);
  j = to_json(*spec);
  j["t1"] = to_json(q(2, 1));
  CHECK_THROWS_AS(manifest_from_json(Json::array({j})), ParseError);
}

TEST_CASE("intersection matrices need two transverse periodic directions") {
  const auto spec = midpoint_spec(4, table1_rows()[3]);
  REQUIRE(spec);
  const auto s = build_candidate(*spec);
  const QuadraticField f(3);
  const auto h = decompose(s, Vec2(QuadElem(f, 1), QuadElem(f)));
  CHECK_THROWS_AS(crossing_counts(s, h, h), NotTransverse);
  const auto generic = decompose(s, Vec2(QuadElem(f, 1), QuadElem(f, 0, 1)), 100);
  if (!generic.periodic()) CHECK_THROWS_AS(crossing_counts(s, h, generic), NotPeriodic);
}

TEST_CASE("fixture diagrams") {
  CandidateSpec s;
  s.model = "h2-two-cylinder";
  s.w2 = q(2, 1);
  s.h2 = q(2, 1);
  s.t1 = s.t2 = s.s = q(2, 0);
  const auto surface = build_candidate(s);
  CHECK(surface.stratum().zero_orders() == std::vector<int>{2});
  const QuadraticField f(2);
  const auto h = decompose(surface, Vec2(QuadElem(f, 1), QuadElem(f)));
  const auto v = decompose(surface, Vec2(QuadElem(f), QuadElem(f, 1)));
  REQUIRE(h.periodic());
  REQUIRE(v.periodic());
  CHECK(crossing_counts(surface, h, v) == IntMatrix{{1, 1}, {0, 1}});
  CHECK(intersection_matrix(surface, h, v) == crossing_counts(surface, h, v));
}

TEST_CASE("enumeration is sorted, duplicate free and independent of threads") {
  EnumerationOptions opt;
  opt.twist_denominator_bound = 3;
  opt.slit_grid_bound = 3;
  opt.require_matrix = false;
  for (int m : {4, 6}) {
    for (const auto& row : {table1_rows()[2], table1_rows()[4]}) {
      opt.jobs = 1;
      const auto one = enumerate_candidates(builtin_diagram(m), row, opt);
      opt.jobs = 3;
      const auto three = enumerate_candidates(builtin_diagram(m), row, opt);
      CHECK(one == three);
      for (std::size_t i = 1; i < one.size(); ++i) {
        const auto &a = one[i - 1], &b = one[i];
        const bool ordered = a.t1 < b.t1 || (a.t1 == b.t1 && (a.t2 < b.t2 || (a.t2 == b.t2 && a.s < b.s)));
        CHECK(ordered);
      }
      for (const auto& spec : one) {
        const auto s = build_candidate(spec);
        const QuadraticField f(row.radicand);
        CHECK(decompose(s, Vec2(QuadElem(f), QuadElem(f, 1))).periodic());
      }
    }
  }
}

TEST_CASE("strict enumeration keeps exactly the specs with the requested matrix") {
  const auto& d = builtin_diagram(4);
  const Table1Row& base = table1_rows()[2];
  EnumerationOptions opt;
  opt.twist_denominator_bound = 3;
  opt.slit_grid_bound = 3;
  opt.require_matrix = false;
  const auto relaxed = enumerate_candidates(d, base, opt);
  REQUIRE(relaxed.size() >= 4);
  opt.require_matrix = true;
  for (std::size_t k = 0; k < relaxed.size(); k += relaxed.size() / 4) {
    const auto s = build_candidate(relaxed[k]);
    const QuadraticField f(base.radicand);
    const auto h = decompose(s, Vec2(QuadElem(f, 1), QuadElem(f)));
    const auto v = decompose(s, Vec2(QuadElem(f), QuadElem(f, 1)));
    Table1Row target = base;
    target.matrix = intersection_matrix(s, h, v, d.cell_map());
    CAPTURE(k);
    const auto strict = enumerate_candidates(d, target, opt);
    int found = 0;
    for (const auto& spec : strict) {
      CHECK(spec.matrix == target.matrix);
      if (spec.t1 == relaxed[k].t1 && spec.t2 == relaxed[k].t2 && spec.s == relaxed[k].s) ++found;
    }
    CHECK(found == 1);
  }
}
