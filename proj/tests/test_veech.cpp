#include <doctest.h>

#include "prym/fixtures.hpp"
#include "prym/veech.hpp"

using namespace prym;

namespace {

QuadElem q(const Rational& a, const Rational& b = 0, long d = 2) { return QuadElem(QuadraticField(d), a, b); }

AuditConfig bound(long length, int jobs = 1, int step_cap = kDefaultStepCap) {
  AuditConfig c;
  c.length_bound = length;
  c.jobs = jobs;
  c.step_cap = step_cap;
  return c;
}

} // namespace

TEST_CASE("commensurability witnesses") {
  CHECK_FALSE(commensurability_witness({q(1), q(Rational(1, 5))}));
  const auto w = commensurability_witness({q(1), q(0, 1)});
  REQUIRE(w);
  CHECK(w->i == 0);
  CHECK(w->j == 1);
  CHECK(w->ratio == q(0, 1));
  // (-1 + sqrt 3)/2 and (-2 + 2 sqrt 3)/4 are the same number.
  CHECK_FALSE(commensurability_witness({q(Rational(-1, 2), Rational(1, 2), 3), q(-2, 2, 3) / q(4, 0, 3)}));
  // First pair in index order.
  const auto w2 = commensurability_witness({q(1), q(2), q(0, 1), q(0, 2)});
  REQUIRE(w2);
  CHECK(w2->i == 0);
  CHECK(w2->j == 2);
  CHECK_FALSE(commensurability_witness({q(3)}));
  CHECK_FALSE(commensurability_witness({}));
  CHECK_THROWS_AS(commensurability_witness({q(1), q(0)}), NonPositiveModulus);
  CHECK_THROWS_AS(commensurability_witness({q(1), q(1, -1)}), NonPositiveModulus);
}

TEST_CASE("the incommensurable fixture is eliminated at the horizontal direction") {
  const auto s = fixtures::incommensurable_two_cylinder();
  const auto r = audit_candidate(s, bound(5));
  REQUIRE(r.verdict == Verdict::eliminated);
  REQUIRE(r.certificate);
  CHECK(r.certificate->direction == Vec2(q(1), q(0)));
  CHECK(r.certificate->witness.ratio == q(0, 1));
  CHECK(r.stats.directions_scanned == 1);
  CHECK(verify_certificate(s, *r.certificate));
}

TEST_CASE("lattice surfaces are not eliminated") {
  for (const auto& s : {fixtures::square_torus(), fixtures::regular_octagon()}) {
    const auto r = audit_candidate(s, bound(10));
    CHECK(r.verdict == Verdict::not_eliminated);
    CHECK_FALSE(r.certificate);
    CHECK(r.stats.directions_scanned == r.stats.directions_available);
    CHECK(r.stats.undetermined_count == 0);
    CHECK(r.stats.periodic_count == r.stats.directions_scanned);
  }
}

TEST_CASE("audit directions are canonical, unique and ordered") {
  const auto t = fixtures::square_torus();
  const auto dirs = audit_directions(t, bound(5));
  REQUIRE(dirs.size() >= 2);
  CHECK(dirs[0] == Vec2(q(1), q(0)));
  CHECK(dirs[1] == Vec2(q(0), q(1)));
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    CHECK(canonical_line(dirs[i]) == dirs[i]);
    for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(dirs[i] == dirs[j]);
  }
  for (std::size_t i = 3; i < dirs.size(); ++i) CHECK(norm2(dirs[i - 1]) <= norm2(dirs[i]));
  // Primitive vectors of length <= 5 up to sign.
  CHECK(dirs.size() == 24);
  auto limited = bound(5);
  limited.max_directions = 7;
  CHECK(audit_directions(t, limited).size() == 7);
}

TEST_CASE("certificates are rechecked from scratch") {
  const auto s = fixtures::incommensurable_two_cylinder();
  const Certificate good = *audit_candidate(s, bound(3)).certificate;
  CHECK(verify_certificate(s, good));

  Certificate ratio = good;
  ratio.witness.ratio = q(0, 2);
  CHECK_FALSE(verify_certificate(s, ratio));

  Certificate swapped = good;
  std::swap(swapped.witness.i, swapped.witness.j);
  CHECK_FALSE(verify_certificate(s, swapped));
  swapped.witness.ratio = inverse(good.witness.ratio);
  CHECK(verify_certificate(s, swapped));

  Certificate height = good;
  height.cylinders[0].height += q(1);
  CHECK_FALSE(verify_certificate(s, height));

  Certificate modulus = good;
  modulus.cylinders[1].modulus = q(1);
  CHECK_FALSE(verify_certificate(s, modulus));

  Certificate direction = good;
  direction.direction = Vec2(q(1), q(1));
  CHECK_FALSE(verify_certificate(s, direction, 2000));

  Certificate index = good;
  index.witness.j = 7;
  CHECK_FALSE(verify_certificate(s, index));

  Certificate dropped = good;
  dropped.cylinders.pop_back();
  dropped.witness.j = 0;
  CHECK_FALSE(verify_certificate(s, dropped));

  Certificate reordered = good;
  std::swap(reordered.cylinders[0], reordered.cylinders[1]);
  std::swap(reordered.witness.i, reordered.witness.j);
  CHECK(verify_certificate(s, reordered));

  // The torus has no incommensurable pair in any direction.
  const auto torus = fixtures::square_torus();
  Certificate on_torus = good;
  on_torus.direction = Vec2(q(1), q(0));
  CHECK_FALSE(verify_certificate(torus, on_torus));

  Certificate other_field = good;
  other_field.witness.ratio = q(0, 1, 3);
  CHECK_FALSE(verify_certificate(s, other_field));
}

TEST_CASE("certificate JSON round trip") {
  const auto s = fixtures::incommensurable_two_cylinder();
  const Certificate c = *audit_candidate(s, bound(3)).certificate;
  const Certificate back = certificate_from_json(parse_json(pretty(to_json(c)), "cert"), 2);
  CHECK(back.direction == c.direction);
  CHECK(back.cylinders == c.cylinders);
  CHECK(back.witness.ratio == c.witness.ratio);
  CHECK(verify_certificate(s, back));
  CHECK_THROWS_AS(certificate_from_json(parse_json("{\"direction\": 1}", "cert"), 2), ParseError);
}

TEST_CASE("reports are independent of the number of workers") {
  for (const auto& s : {fixtures::regular_octagon(), fixtures::l_shape(), fixtures::incommensurable_two_cylinder()}) {
    const auto one = audit_candidate(s, bound(6, 1, 2000));
    const auto four = audit_candidate(s, bound(6, 4, 2000));
    CHECK(pretty(to_json(one)) == pretty(to_json(four)));
  }
}

TEST_CASE("report layout") {
  const auto r = audit_candidate(fixtures::square_torus(), bound(2));
  const Json j = to_json(r);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"candidate", "verdict", "certificate", "config", "stats", "disclaimer"});
  CHECK(j["verdict"] == "not_eliminated");
  CHECK(j["certificate"].is_null());
  CHECK(j["config"]["length_bound"] == "2");
  CHECK(j["disclaimer"] == kAuditDisclaimer);
}

TEST_CASE("verdicts are invariant under rational rescaling") {
  const auto s = fixtures::incommensurable_two_cylinder();
  const auto base = audit_candidate(s, bound(6));
  for (const Rational c : {Rational(1, 2), Rational(3), Rational(7, 5)}) {
    const QuadraticField f(2);
    const auto scaled = apply_linear(s, Mat2{QuadElem(f, c), QuadElem(f), QuadElem(f), QuadElem(f, c)});
    AuditConfig cfg = bound(6);
    cfg.length_bound *= c;
    const auto r = audit_candidate(scaled, cfg);
    CHECK(r.verdict == base.verdict);
    REQUIRE(r.certificate);
    CHECK(canonical_line(r.certificate->direction) == canonical_line(base.certificate->direction));
    CHECK(r.certificate->witness.ratio == base.certificate->witness.ratio);
    CHECK(verify_certificate(scaled, *r.certificate));
  }
  const auto oct = fixtures::regular_octagon();
  const QuadraticField f(2);
  const auto big = apply_linear(oct, Mat2{QuadElem(f, 2), QuadElem(f), QuadElem(f), QuadElem(f, 2)});
  AuditConfig cfg = bound(8);
  CHECK(audit_candidate(big, cfg).verdict == Verdict::not_eliminated);
}

TEST_CASE("a larger bound never loses an elimination") {
  const auto s = fixtures::incommensurable_two_cylinder();
  for (long b : {1L, 2L, 4L, 8L}) CHECK(audit_candidate(s, bound(b)).verdict == Verdict::eliminated);
}

TEST_CASE("one-cylinder directions never witness") {
  const auto t = fixtures::square_torus();
  for (const Vec2& d : audit_directions(t, bound(4))) {
    const auto dec = decompose(t, d);
    REQUIRE(dec.periodic());
    CHECK(dec.cylinders.size() == 1);
    CHECK_FALSE(commensurability_witness(dec.moduli()));
  }
}
