#include "prym/surface.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace prym {

namespace {

// Closed-segment intersection test with exact orientation predicates.
bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  // Assumes p collinear with a, b.
  return sign(dot(p - a, p - b)) <= 0;
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  int o1 = orient(b - a, c - a);
  int o2 = orient(b - a, d - a);
  int o3 = orient(d - c, a - c);
  int o4 = orient(d - c, b - c);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

std::string where(EdgeRef e) { return "(" + std::to_string(e.polygon) + ", " + std::to_string(e.edge) + ")"; }

} // namespace

PlanarPolygon::PlanarPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const int n = size();
  if (n < 3) throw InvalidPolygon("a polygon needs at least 3 vertices");
  const long d = vertices_.front().x.radicand();
  for (const Vec2& v : vertices_) {
    if (v.x.radicand() != d || v.y.radicand() != d) throw FieldMismatch("polygon vertices lie in different fields");
  }
  for (int i = 0; i < n; ++i) {
    if (edge(i).is_zero()) throw InvalidPolygon("edge " + std::to_string(i) + " has zero length");
  }
  for (int i = 0; i < n; ++i) {
    Vec2 e0 = edge(i), e1 = edge(i + 1);
    if (orient(e0, e1) == 0 && sign(dot(e0, e1)) < 0) {
      throw InvalidPolygon("edges " + std::to_string(i) + " and " + std::to_string(wrap(i + 1)) + " fold back");
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue; // adjacent through the wrap
      if (segments_intersect(vertex(i), vertex(i + 1), vertex(j), vertex(j + 1))) {
        throw InvalidPolygon("edges " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
      }
    }
  }
  if (sign(area()) <= 0) throw InvalidPolygon("vertices are not counter-clockwise");
}

QuadElem PlanarPolygon::area() const {
  QuadElem twice(field());
  for (int i = 0; i < size(); ++i) twice += cross(vertex(i), vertex(i + 1));
  return twice * Rational(1, 2);
}

bool PlanarPolygon::is_convex() const {
  for (int i = 0; i < size(); ++i) {
    if (orient(edge(i), edge(i + 1)) < 0) return false;
  }
  return true;
}

int StratumInfo::marked_points() const {
  return static_cast<int>(std::count(orders.begin(), orders.end(), 0));
}

std::vector<int> StratumInfo::zero_orders() const {
  std::vector<int> out;
  for (int k : orders) {
    if (k > 0) out.push_back(k);
  }
  return out;
}

TranslationSurface::TranslationSurface(std::vector<PlanarPolygon> polygons, const Gluing& gluing)
    : polygons_(std::move(polygons)) {
  if (polygons_.empty()) throw NonInvolutiveGluing("surface has no polygons");
  const long d = polygons_.front().field().radicand();
  for (const auto& p : polygons_) {
    if (p.field().radicand() != d) throw FieldMismatch("polygons lie in different fields");
  }

  const int np = num_polygons();
  constexpr EdgeRef unset{-1, -1};
  partner_.resize(np);
  for (int p = 0; p < np; ++p) partner_[p].assign(polygons_[p].size(), unset);

  auto valid = [&](EdgeRef e) {
    return e.polygon >= 0 && e.polygon < np && e.edge >= 0 && e.edge < polygons_[e.polygon].size();
  };
  for (const auto& [e, f] : gluing) {
    if (!valid(e) || !valid(f)) throw NonInvolutiveGluing("gluing references a nonexistent edge " + where(valid(e) ? f : e));
    if (e == f) throw NonInvolutiveGluing("edge " + where(e) + " is glued to itself");
    if (partner_[e.polygon][e.edge] != unset) throw NonInvolutiveGluing("edge " + where(e) + " is glued twice");
    if (partner_[f.polygon][f.edge] != unset) throw NonInvolutiveGluing("edge " + where(f) + " is glued twice");
    partner_[e.polygon][e.edge] = f;
    partner_[f.polygon][f.edge] = e;
  }
  for (int p = 0; p < np; ++p) {
    for (int i = 0; i < polygons_[p].size(); ++i) {
      if (partner_[p][i] == unset) throw NonInvolutiveGluing("edge " + where({p, i}) + " is not glued");
    }
  }

  for (int p = 0; p < np; ++p) {
    for (int i = 0; i < polygons_[p].size(); ++i) {
      EdgeRef e{p, i};
      if (!(edge_vector(e) == -edge_vector(partner(e)))) {
        throw HolonomyMismatch("edges " + where(e) + " and " + where(partner(e)) + " are not opposite");
      }
    }
  }

  // Connectivity over the gluing graph.
  std::vector<int> parent(np);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int num_edges = 0;
  for (int p = 0; p < np; ++p) {
    for (const EdgeRef& f : partner_[p]) {
      parent[find(p)] = find(f.polygon);
      ++num_edges;
    }
  }
  for (int p = 0; p < np; ++p) {
    if (find(p) != find(0)) throw DisconnectedSurface("polygon " + std::to_string(p) + " is not connected to polygon 0");
  }
  num_edges /= 2;

  // Vertex classes: orbits of next_ccw on corners, which also orders them.
  vertex_class_.resize(np);
  for (int p = 0; p < np; ++p) vertex_class_[p].assign(polygons_[p].size(), -1);
  const Vec2 reference{QuadElem(field(), 1), QuadElem(field())};
  for (int p = 0; p < np; ++p) {
    for (int v = 0; v < polygons_[p].size(); ++v) {
      if (vertex_class_[p][v] >= 0) continue;
      const int cls = num_vertex_classes();
      class_corners_.emplace_back();
      int turns = 0;
      CornerRef c{p, v};
      do {
        vertex_class_[c.polygon][c.edge] = cls;
        class_corners_[cls].push_back(c);
        const PlanarPolygon& poly = polygons_[c.polygon];
        Vec2 out = poly.edge(c.edge);
        Vec2 back = poly.vertex(c.edge - 1) - poly.vertex(c.edge);
        if (in_ccw_sector(out, back, reference)) ++turns;
        c = next_ccw(c);
      } while (!(c == CornerRef{p, v}));
      if (turns < 1) throw BadConeAngle("vertex class " + std::to_string(cls) + " has no positive cone angle");
      cone_angle_.push_back(turns);
    }
  }

  const int chi = num_vertex_classes() - num_edges + np;
  if (chi > 2 || chi % 2 != 0) throw BadConeAngle("Euler characteristic " + std::to_string(chi) + " is not that of a closed surface");
  stratum_.genus = (2 - chi) / 2;
  stratum_.cone_angles = cone_angle_;
  std::sort(stratum_.cone_angles.rbegin(), stratum_.cone_angles.rend());
  int excess = 0;
  for (int a : stratum_.cone_angles) {
    stratum_.orders.push_back(a - 1);
    excess += a - 1;
  }
  if (excess != 2 * stratum_.genus - 2) {
    throw BadConeAngle("cone angle excess " + std::to_string(excess) + " violates Gauss-Bonnet for genus " +
                       std::to_string(stratum_.genus));
  }
}

CornerRef TranslationSurface::next_ccw(CornerRef c) const {
  const int n = polygons_[c.polygon].size();
  return partner({c.polygon, ((c.edge - 1) % n + n) % n});
}

Vec2 TranslationSurface::gluing_translation(EdgeRef e) const {
  EdgeRef f = partner(e);
  return polygons_[f.polygon].vertex(f.edge + 1) - polygons_[e.polygon].vertex(e.edge);
}

Gluing TranslationSurface::gluing() const {
  Gluing out;
  for (int p = 0; p < num_polygons(); ++p) {
    for (int i = 0; i < polygons_[p].size(); ++i) {
      EdgeRef e{p, i};
      if (e < partner(e)) out.emplace_back(e, partner(e));
    }
  }
  return out;
}

QuadElem TranslationSurface::area() const {
  QuadElem total(field());
  for (const auto& p : polygons_) total += p.area();
  return total;
}

bool TranslationSurface::all_convex() const {
  return std::all_of(polygons_.begin(), polygons_.end(), [](const PlanarPolygon& p) { return p.is_convex(); });
}

TranslationSurface build_surface(std::vector<PlanarPolygon> polygons, const Gluing& gluing) {
  return TranslationSurface(std::move(polygons), gluing);
}

StratumInfo stratum(const TranslationSurface& surface) { return surface.stratum(); }

TranslationSurface apply_linear(const TranslationSurface& surface, const Mat2& m) {
  const QuadElem det = m.det();
  if (det.is_zero()) throw SingularMatrix("cannot deform by a matrix with zero determinant");
  const bool flip = sign(det) < 0;

  std::vector<PlanarPolygon> polys;
  polys.reserve(surface.num_polygons());
  for (const auto& poly : surface.polygons()) {
    std::vector<Vec2> vs;
    vs.reserve(poly.size());
    const int n = poly.size();
    for (int j = 0; j < n; ++j) {
      // Reversed order w_j = v_{-j} keeps vertex 0 in place.
      vs.push_back(m(poly.vertex(flip ? -j : j)));
    }
    polys.emplace_back(std::move(vs));
  }
  auto remap = [&](EdgeRef e) {
    if (!flip) return e;
    const int n = surface.polygon(e.polygon).size();
    return EdgeRef{e.polygon, ((n - 1 - e.edge) % n + n) % n};
  };
  Gluing g;
  for (const auto& [e, f] : surface.gluing()) g.emplace_back(remap(e), remap(f));
  return TranslationSurface(std::move(polys), g);
}

bool check_involution(const TranslationSurface& surface, const CellMap& map) {
  const int np = surface.num_polygons();
  if (static_cast<int>(map.target.size()) != np || static_cast<int>(map.shift.size()) != np) {
    throw MalformedMap("map must list a target and shift for each of the " + std::to_string(np) + " polygons");
  }
  for (int p = 0; p < np; ++p) {
    if (map.target[p] < 0 || map.target[p] >= np) throw MalformedMap("polygon " + std::to_string(p) + " maps outside the surface");
  }
  auto image = [&](EdgeRef e) {
    const int q = map.target[e.polygon];
    const int n = surface.polygon(q).size();
    return EdgeRef{q, (((e.edge + map.shift[e.polygon]) % n) + n) % n};
  };

  for (int p = 0; p < np; ++p) {
    const int q = map.target[p];
    if (surface.polygon(p).size() != surface.polygon(q).size()) return false;
    if (map.target[q] != p) return false;
    for (int i = 0; i < surface.polygon(p).size(); ++i) {
      EdgeRef e{p, i};
      EdgeRef fe = image(e);
      if (!(image(fe) == e)) return false;
      if (!(surface.edge_vector(fe) == -surface.edge_vector(e))) return false;
      if (!(image(surface.partner(e)) == surface.partner(fe))) return false;
    }
  }
  return true;
}

} // namespace prym
