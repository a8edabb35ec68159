#include "triangulate.hpp"

#include <array>
#include <map>
#include <stdexcept>

namespace prym::detail {

namespace {

// Closed triangle membership for CCW triangle (a, b, c).
bool in_triangle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  return orient(b - a, p - a) >= 0 && orient(c - b, p - b) >= 0 && orient(a - c, p - c) >= 0;
}

// Ear clipping; returns triangles as triples of vertex indices, CCW.
std::vector<std::array<int, 3>> ear_clip(const PlanarPolygon& poly) {
  std::vector<int> ring(poly.size());
  for (int i = 0; i < poly.size(); ++i) ring[i] = i;
  std::vector<std::array<int, 3>> out;
  while (ring.size() > 3) {
    const int m = static_cast<int>(ring.size());
    bool clipped = false;
    for (int k = 0; k < m && !clipped; ++k) {
      const int a = ring[(k + m - 1) % m], b = ring[k], c = ring[(k + 1) % m];
      const Vec2 &pa = poly.vertex(a), &pb = poly.vertex(b), &pc = poly.vertex(c);
      if (orient(pb - pa, pc - pb) <= 0) continue;
      bool empty = true;
      for (int j : ring) {
        if (j == a || j == b || j == c) continue;
        if (in_triangle(pa, pb, pc, poly.vertex(j))) {
          empty = false;
          break;
        }
      }
      if (!empty) continue;
      out.push_back({a, b, c});
      ring.erase(ring.begin() + k);
      clipped = true;
    }
    if (!clipped) throw std::logic_error("ear clipping found no ear");
  }
  out.push_back({ring[0], ring[1], ring[2]});
  return out;
}

} // namespace

Refinement triangulate(const TranslationSurface& surface) {
  std::vector<PlanarPolygon> polys;
  std::vector<std::vector<CornerRef>> origin;
  // Where each original edge ended up.
  std::vector<std::vector<EdgeRef>> placed(surface.num_polygons());
  Gluing gluing;

  for (int p = 0; p < surface.num_polygons(); ++p) {
    const PlanarPolygon& poly = surface.polygon(p);
    const int n = poly.size();
    placed[p].resize(n);
    if (poly.is_convex()) {
      const int id = static_cast<int>(polys.size());
      polys.push_back(poly);
      origin.emplace_back();
      for (int i = 0; i < n; ++i) {
        origin.back().push_back({p, i});
        placed[p][i] = {id, i};
      }
      continue;
    }
    std::map<std::pair<int, int>, EdgeRef> diagonals;
    for (const auto& tri : ear_clip(poly)) {
      const int id = static_cast<int>(polys.size());
      polys.emplace_back(std::vector<Vec2>{poly.vertex(tri[0]), poly.vertex(tri[1]), poly.vertex(tri[2])});
      origin.emplace_back();
      for (int k = 0; k < 3; ++k) {
        const int from = tri[k], to = tri[(k + 1) % 3];
        origin.back().push_back({p, from});
        if (to == poly.wrap(from + 1)) {
          placed[p][from] = {id, k};
        } else if (auto it = diagonals.find({to, from}); it != diagonals.end()) {
          gluing.emplace_back(it->second, EdgeRef{id, k});
          diagonals.erase(it);
        } else {
          diagonals[{from, to}] = {id, k};
        }
      }
    }
    if (!diagonals.empty()) throw std::logic_error("unpaired diagonal in triangulation");
  }

  for (const auto& [e, f] : surface.gluing()) gluing.emplace_back(placed[e.polygon][e.edge], placed[f.polygon][f.edge]);
  return {TranslationSurface(std::move(polys), gluing), std::move(origin)};
}

} // namespace prym::detail
