#include "prym/io.hpp"

#include <algorithm>
#include <limits>

namespace prym {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ParseError(where + ": " + what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing \"") + key + "\"");
  return *it;
}

} // namespace

Json integer_to_json(const Integer& n) {
  if (n.fits_slong_p() && sizeof(long) == sizeof(std::int64_t)) return Json(n.get_si());
  return Json(n.get_str());
}

Integer integer_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return Integer(std::to_string(j.get<std::uint64_t>()));
    return Integer(std::to_string(j.get<std::int64_t>()));
  }
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    const std::size_t start = !s.empty() && s[0] == '-' ? 1 : 0;
    if (s.size() == start || s.find_first_not_of("0123456789", start) != std::string::npos) {
      fail(where, "\"" + s + "\" is not a decimal integer");
    }
    return Integer(s);
  }
  fail(where, "expected an integer");
}

Json to_json(const QuadElem& x) {
  return Json::array({integer_to_json(x.a().get_num()), integer_to_json(x.a().get_den()),
                      integer_to_json(x.b().get_num()), integer_to_json(x.b().get_den()), x.radicand()});
}

QuadElem quad_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 5) fail(where, "expected [a_num, a_den, b_num, b_den, D]");
  Integer v[4];
  for (int i = 0; i < 4; ++i) v[i] = integer_from_json(j[i], where + "[" + std::to_string(i) + "]");
  if (v[1] <= 0 || v[3] <= 0) fail(where, "denominators must be positive");
  const Integer d = integer_from_json(j[4], where + "[4]");
  if (!d.fits_slong_p()) fail(where, "radicand out of range");
  Rational a(v[0], v[1]), b(v[2], v[3]);
  a.canonicalize();
  b.canonicalize();
  return QuadElem::make(a, b, d.get_si());
}

QuadElem quad_from_json(const Json& j, long radicand, const std::string& where) {
  QuadElem x = quad_from_json(j, where);
  if (x.radicand() != radicand) {
    fail(where, "element of Q(sqrt(" + std::to_string(x.radicand()) + ")) where Q(sqrt(" + std::to_string(radicand) +
                    ")) was expected");
  }
  return x;
}

Json to_json(const Vec2& v) { return Json::array({to_json(v.x), to_json(v.y)}); }

Vec2 vec_from_json(const Json& j, long radicand, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected a pair of field elements");
  return {quad_from_json(j[0], radicand, where + "[0]"), quad_from_json(j[1], radicand, where + "[1]")};
}

Json to_json(const TranslationSurface& s) {
  Json polys = Json::array();
  for (const auto& p : s.polygons()) {
    Json vs = Json::array();
    for (const auto& v : p.vertices()) vs.push_back(to_json(v));
    polys.push_back(std::move(vs));
  }
  Json gluing = Json::array();
  for (const auto& [e, f] : s.gluing()) {
    gluing.push_back(Json::array({Json::array({e.polygon, e.edge}), Json::array({f.polygon, f.edge})}));
  }
  Json out;
  out["D"] = s.field().radicand();
  out["polygons"] = std::move(polys);
  out["gluing"] = std::move(gluing);
  return out;
}

TranslationSurface surface_from_json(const Json& j) {
  const Json& dj = field(j, "D", "surface");
  if (!dj.is_number_integer()) fail("surface.D", "expected an integer");
  const long d = dj.get<long>();
  QuadraticField f(d);

  const Json& pj = field(j, "polygons", "surface");
  if (!pj.is_array()) fail("surface.polygons", "expected an array");
  std::vector<PlanarPolygon> polys;
  for (std::size_t p = 0; p < pj.size(); ++p) {
    const std::string where = "surface.polygons[" + std::to_string(p) + "]";
    if (!pj[p].is_array()) fail(where, "expected an array of vertices");
    std::vector<Vec2> vs;
    for (std::size_t i = 0; i < pj[p].size(); ++i) vs.push_back(vec_from_json(pj[p][i], d, where + "[" + std::to_string(i) + "]"));
    polys.emplace_back(std::move(vs));
  }

  const Json& gj = field(j, "gluing", "surface");
  if (!gj.is_array()) fail("surface.gluing", "expected an array");
  Gluing g;
  auto edge = [&](const Json& e, const std::string& where) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      fail(where, "expected [polygon, edge]");
    }
    return EdgeRef{e[0].get<int>(), e[1].get<int>()};
  };
  for (std::size_t i = 0; i < gj.size(); ++i) {
    const std::string where = "surface.gluing[" + std::to_string(i) + "]";
    if (!gj[i].is_array() || gj[i].size() != 2) fail(where, "expected a pair of edges");
    g.emplace_back(edge(gj[i][0], where + "[0]"), edge(gj[i][1], where + "[1]"));
  }
  return TranslationSurface(std::move(polys), g);
}

namespace {

bool flat(const Json& j) {
  if (j.is_object()) return false;
  if (!j.is_array()) return true;
  return std::all_of(j.begin(), j.end(), [](const Json& x) { return flat(x); });
}

void write(const Json& j, int depth, std::string& out) {
  const std::string pad(2 * depth + 2, ' ');
  if (flat(j)) {
    out += j.dump();
  } else if (j.is_array()) {
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      out += pad;
      write(j[i], depth + 1, out);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += std::string(2 * depth, ' ') + "]";
  } else if (j.empty()) {
    out += "{}";
  } else {
    out += "{\n";
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      out += pad + Json(it.key()).dump() + ": ";
      write(it.value(), depth + 1, out);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += std::string(2 * depth, ' ') + "}";
  }
}

} // namespace

std::string pretty(const Json& j) {
  std::string out;
  write(j, 0, out);
  return out;
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

} // namespace prym
