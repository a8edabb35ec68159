#pragma once

// Translation surfaces presented as planar polygons whose edges are glued in
// pairs by translations.
//
// Edge i of a polygon runs from vertex i to vertex i+1. Polygons are stored
// counter-clockwise, so the interior lies to the left of every edge. A
// TranslationSurface is validated once at construction and never mutated.

#include <compare>
#include <cstddef>
#include <utility>
#include <vector>

#include "prym/qfield.hpp"
#include "prym/vec2.hpp"

namespace prym {

/// (polygon, index) naming either an edge or a corner, depending on context.
struct EdgeRef {
  int polygon = 0;
  int edge = 0;
  friend auto operator<=>(const EdgeRef&, const EdgeRef&) = default;
};

using CornerRef = EdgeRef;
using Gluing = std::vector<std::pair<EdgeRef, EdgeRef>>;

class PlanarPolygon {
public:
  /// Throws InvalidPolygon unless the vertices form a simple, positively
  /// oriented polygon with nonzero edges over a single field.
  explicit PlanarPolygon(std::vector<Vec2> vertices);

  int size() const { return static_cast<int>(vertices_.size()); }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  /// Cyclic indexing.
  const Vec2& vertex(int i) const { return vertices_[wrap(i)]; }
  Vec2 edge(int i) const { return vertex(i + 1) - vertex(i); }
  int wrap(int i) const {
    int n = size();
    return ((i % n) + n) % n;
  }
  QuadraticField field() const { return vertices_.front().field(); }
  QuadElem area() const;
  /// Convex up to straight (angle pi) vertices.
  bool is_convex() const;

  friend bool operator==(const PlanarPolygon&, const PlanarPolygon&) = default;

private:
  std::vector<Vec2> vertices_;
};

/// Cone-point data of a surface. Angles are stored as multiples of 2*pi.
struct StratumInfo {
  std::vector<int> cone_angles; // one entry per vertex class, descending
  int genus = 0;
  std::vector<int> orders;      // angle - 1 per vertex class, descending

  int marked_points() const;
  /// Orders of the genuine zeros (marked points dropped), descending.
  std::vector<int> zero_orders() const;
  friend bool operator==(const StratumInfo&, const StratumInfo&) = default;
};

class TranslationSurface {
public:
  /// Validates every invariant; see build_surface.
  TranslationSurface(std::vector<PlanarPolygon> polygons, const Gluing& gluing);

  QuadraticField field() const { return polygons_.front().field(); }
  int num_polygons() const { return static_cast<int>(polygons_.size()); }
  const std::vector<PlanarPolygon>& polygons() const { return polygons_; }
  const PlanarPolygon& polygon(int p) const { return polygons_[p]; }

  EdgeRef partner(EdgeRef e) const { return partner_[e.polygon][e.edge]; }
  Vec2 edge_vector(EdgeRef e) const { return polygons_[e.polygon].edge(e.edge); }
  /// Translation carrying edge e onto its partner: x on e maps to x + t.
  Vec2 gluing_translation(EdgeRef e) const;
  /// Each glued pair once, lexicographically smaller edge first, sorted.
  Gluing gluing() const;

  int vertex_class(CornerRef c) const { return vertex_class_[c.polygon][c.edge]; }
  int num_vertex_classes() const { return static_cast<int>(class_corners_.size()); }
  /// Corners of one vertex class in counter-clockwise order around the point.
  const std::vector<CornerRef>& corners_of(int cls) const { return class_corners_[cls]; }
  /// Total cone angle of a vertex class, as a multiple of 2*pi.
  int cone_angle(int cls) const { return cone_angle_[cls]; }
  /// The corner following c counter-clockwise around their common vertex.
  CornerRef next_ccw(CornerRef c) const;

  const StratumInfo& stratum() const { return stratum_; }
  QuadElem area() const;
  bool all_convex() const;

  friend bool operator==(const TranslationSurface& s, const TranslationSurface& t) {
    return s.polygons_ == t.polygons_ && s.partner_ == t.partner_;
  }

private:
  std::vector<PlanarPolygon> polygons_;
  std::vector<std::vector<EdgeRef>> partner_;
  std::vector<std::vector<int>> vertex_class_;
  std::vector<std::vector<CornerRef>> class_corners_;
  std::vector<int> cone_angle_;
  StratumInfo stratum_;
};

/// Errors: NonInvolutiveGluing, HolonomyMismatch, BadConeAngle,
/// DisconnectedSurface, InvalidPolygon, FieldMismatch.
TranslationSurface build_surface(std::vector<PlanarPolygon> polygons, const Gluing& gluing);

StratumInfo stratum(const TranslationSurface& surface);

/// Maps every vertex by m; a negative determinant also reverses polygon
/// orientation so the result stays counter-clockwise. Throws SingularMatrix.
TranslationSurface apply_linear(const TranslationSurface& surface, const Mat2& m);

/// A candidate self-map of the polygon complex: polygon p goes to polygon
/// `target[p]` with edge i landing on edge i + shift[p] (mod size).
struct CellMap {
  std::vector<int> target;
  std::vector<int> shift;
};

/// True iff the map is a gluing-compatible isometry acting as -id on
/// holonomy and squaring to the identity. Throws MalformedMap.
bool check_involution(const TranslationSurface& surface, const CellMap& map);

} // namespace prym
