#include "prym/flow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "triangulate.hpp"

namespace prym {

namespace {

struct Exit {
  QuadElem lambda;
  int vertex = -1; // >= 0 when the ray stops at this polygon vertex
  int edge = -1;   // edge crossed otherwise
};

void consider(std::optional<Exit>& best, QuadElem lambda, int vertex, int edge) {
  if (!best) {
    best = Exit{std::move(lambda), vertex, edge};
    return;
  }
  int c = sign(lambda - best->lambda);
  if (c < 0) {
    best = Exit{std::move(lambda), vertex, edge};
  } else if (c == 0 && vertex >= 0) {
    best->vertex = vertex;
  }
}

// First boundary point of `poly` met by x + lambda*d with lambda > 0.
std::optional<Exit> first_exit(const PlanarPolygon& poly, const Vec2& x, const Vec2& d) {
  std::optional<Exit> best;
  const int n = poly.size();
  for (int k = 0; k < n; ++k) {
    const Vec2& a = poly.vertex(k);
    const Vec2 e = poly.edge(k);
    const Vec2 ax = a - x;
    const QuadElem den = cross(d, e);
    const int sd = sign(den);
    if (sd == 0) {
      if (sign(cross(ax, d)) != 0) continue;
      // Collinear edge: the ray first touches one of its endpoints.
      const QuadElem dd = dot(d, d);
      for (int end : {k, k + 1}) {
        QuadElem lam = dot(poly.vertex(end) - x, d) / dd;
        if (sign(lam) > 0) consider(best, std::move(lam), poly.wrap(end), k);
      }
      continue;
    }
    const QuadElem lnum = cross(ax, e);
    if (sign(lnum) * sd <= 0) continue;
    const QuadElem mnum = cross(ax, d);
    const int s0 = sign(mnum) * sd;
    if (s0 < 0) continue;
    const int s1 = sign(mnum - den) * sd;
    if (s1 > 0) continue;
    const int vertex = s0 == 0 ? k : (s1 == 0 ? poly.wrap(k + 1) : -1);
    consider(best, lnum / den, vertex, k);
  }
  return best;
}

std::optional<int> vertex_at(const PlanarPolygon& poly, const Vec2& x) {
  for (int i = 0; i < poly.size(); ++i) {
    if (poly.vertex(i) == x) return i;
  }
  return std::nullopt;
}

// One straight piece of a traced ray inside a polygon.
struct Piece {
  int polygon;
  Vec2 from;
  Vec2 to;
  bool along_edge = false;
  int edge = -1; // edge index when along_edge
};

struct RawTrace {
  bool closed = false;
  int steps = 0;
  CornerRef end_corner;
  QuadElem length;               // holonomy = length * d
  std::vector<EdgeRef> crossings;
  std::vector<Piece> pieces;
};

// Follows x + t*d through the complex starting inside polygon p.
void trace_interior(const TranslationSurface& s, int p, Vec2 x, const Vec2& d, int step_cap, RawTrace& out,
                    bool keep_pieces) {
  for (;;) {
    const PlanarPolygon& poly = s.polygon(p);
    auto ex = first_exit(poly, x, d);
    if (!ex) throw std::logic_error("ray left polygon " + std::to_string(p) + " without meeting its boundary");
    Vec2 y = x + ex->lambda * d;
    out.length += ex->lambda;
    if (keep_pieces) out.pieces.push_back({p, x, y});
    if (ex->vertex >= 0) {
      out.closed = true;
      out.end_corner = {p, ex->vertex};
      return;
    }
    if (out.steps >= step_cap) {
      out.closed = false;
      return;
    }
    ++out.steps;
    EdgeRef e{p, ex->edge};
    out.crossings.push_back(e);
    EdgeRef f = s.partner(e);
    x = y + s.gluing_translation(e);
    p = f.polygon;
  }
}

RawTrace trace_from_corner(const TranslationSurface& s, CornerRef c, const Vec2& d, int step_cap, bool keep_pieces) {
  RawTrace out{false, 0, {}, QuadElem(s.field()), {}, {}};
  const PlanarPolygon& poly = s.polygon(c.polygon);
  const Vec2 out_edge = poly.edge(c.edge);
  if (same_direction(out_edge, d)) {
    // Along the edge: the next vertex is reached immediately.
    out.closed = true;
    out.end_corner = {c.polygon, poly.wrap(c.edge + 1)};
    out.length = out_edge.x.is_zero() ? out_edge.y / d.y : out_edge.x / d.x;
    if (keep_pieces) out.pieces.push_back({c.polygon, poly.vertex(c.edge), poly.vertex(c.edge + 1), true, c.edge});
    return out;
  }
  trace_interior(s, c.polygon, poly.vertex(c.edge), d, step_cap, out, keep_pieces);
  return out;
}

TraceResult to_result(const TranslationSurface& s, RawTrace&& raw, const Vec2& d, const Vec2& start_offset) {
  if (!raw.closed) return CapExceeded{raw.steps};
  HitSingularity hit{raw.end_corner, s.vertex_class(raw.end_corner), raw.length * d + start_offset,
                     std::move(raw.crossings)};
  return hit;
}

} // namespace

bool sector_contains(const TranslationSurface& surface, CornerRef c, const Vec2& direction) {
  const PlanarPolygon& poly = surface.polygon(c.polygon);
  const Vec2 out = poly.edge(c.edge);
  const Vec2 back = poly.vertex(c.edge - 1) - poly.vertex(c.edge);
  return in_ccw_sector(out, back, direction);
}

std::vector<CornerRef> outgoing_corners(const TranslationSurface& surface, int cls, const Vec2& direction) {
  std::vector<CornerRef> out;
  for (const CornerRef& c : surface.corners_of(cls)) {
    if (sector_contains(surface, c, direction)) out.push_back(c);
  }
  return out;
}

TraceResult trace_ray(const TranslationSurface& surface, CornerRef start, const Vec2& direction, int step_cap) {
  if (direction.is_zero()) throw InvalidDirection("zero direction");
  if (step_cap < 1) throw InvalidDirection("step cap must be positive");
  if (!sector_contains(surface, start, direction)) {
    throw InvalidDirection("direction does not leave through corner (" + std::to_string(start.polygon) + ", " +
                           std::to_string(start.edge) + ")");
  }
  RawTrace raw = trace_from_corner(surface, start, direction, step_cap, false);
  return to_result(surface, std::move(raw), direction, Vec2::zero(surface.field()));
}

TraceResult trace_ray(const TranslationSurface& surface, const SurfacePoint& start, const Vec2& direction,
                      int step_cap) {
  if (direction.is_zero()) throw InvalidDirection("zero direction");
  if (step_cap < 1) throw InvalidDirection("step cap must be positive");
  const PlanarPolygon& poly = surface.polygon(start.polygon);
  if (vertex_at(poly, start.position)) {
    throw StartsOnVertexAmbiguous("start point is a cone point; give an outgoing corner");
  }
  RawTrace raw{false, 0, {}, QuadElem(surface.field()), {}, {}};
  int p = start.polygon;
  Vec2 x = start.position;
  for (int k = 0; k < poly.size(); ++k) {
    const Vec2 e = poly.edge(k);
    const Vec2 rel = x - poly.vertex(k);
    if (orient(e, rel) != 0 || sign(dot(rel, e)) < 0 || sign(dot(rel, e) - dot(e, e)) > 0) continue;
    // On the interior of edge k.
    int side = orient(e, direction);
    if (side == 0) {
      int end = sign(dot(direction, e)) > 0 ? k + 1 : k;
      raw.closed = true;
      raw.end_corner = {p, poly.wrap(end)};
      raw.length = (poly.vertex(end) - x).x.is_zero() ? (poly.vertex(end) - x).y / direction.y
                                                       : (poly.vertex(end) - x).x / direction.x;
      return to_result(surface, std::move(raw), direction, Vec2::zero(surface.field()));
    }
    if (side < 0) {
      // Pointing out of this polygon: the ray belongs to the glued neighbour.
      x = x + surface.gluing_translation({p, k});
      p = surface.partner({p, k}).polygon;
    }
    break;
  }
  trace_interior(surface, p, x, direction, step_cap, raw, false);
  return to_result(surface, std::move(raw), direction, Vec2::zero(surface.field()));
}

// ---------------------------------------------------------------------------
// Saddle connections by wedge narrowing.

namespace {

struct Wedge {
  Vec2 lo;
  Vec2 hi;
  bool lo_closed;
  bool hi_closed;
};

bool wedge_contains(const Wedge& w, const Vec2& d) {
  if (same_direction(w.lo, d)) return w.lo_closed;
  if (same_direction(w.hi, d)) return w.hi_closed;
  return orient(w.lo, d) > 0 && orient(d, w.hi) > 0;
}

// Point where the ray t*dir (t > 0) meets the line through a with direction e.
Vec2 ray_line_point(const Vec2& dir, const Vec2& a, const Vec2& e) {
  QuadElem t = cross(a, e) / cross(dir, e);
  return t * dir;
}

QuadElem segment_distance2(const Vec2& a, const Vec2& b) {
  const Vec2 e = b - a;
  const QuadElem ee = dot(e, e);
  if (ee.is_zero()) return norm2(a);
  const QuadElem t = -dot(a, e);
  if (sign(t) <= 0) return norm2(a);
  if (sign(t - ee) >= 0) return norm2(b);
  const QuadElem c = cross(a, e);
  return c * c / ee;
}

class WedgeSearch {
public:
  WedgeSearch(const TranslationSurface& s, const QuadElem& bound) : s_(s), bound2_(bound * bound) {}

  void run(CornerRef corner, std::vector<SaddleConnection>& out) {
    const PlanarPolygon& poly = s_.polygon(corner.polygon);
    const Vec2 origin = poly.vertex(corner.edge);
    const Vec2 out_dir = poly.edge(corner.edge);
    const Vec2 back = poly.vertex(corner.edge - 1) - origin;
    start_ = corner;
    start_class_ = s_.vertex_class(corner);

    // Quarter-turn pieces [b_i, b_{i+1}) clipped to the sector, each < pi.
    const Vec2 perp{-out_dir.y, out_dir.x};
    const std::vector<Vec2> bounds{out_dir, perp, -out_dir, -perp};
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      const Vec2& lo = bounds[i];
      const Vec2& next = bounds[(i + 1) % bounds.size()];
      // Sector ends at `back`; stop once lo reaches it.
      if (i > 0 && ccw_angle_compare(out_dir, back, lo) <= 0) break;
      Wedge w{lo, next, true, false};
      if (i + 1 == bounds.size() || ccw_angle_compare(out_dir, back, next) <= 0) w.hi = back;
      chain_.clear();
      Vec2 offset = -origin;
      explore_start(corner, w, offset, out);
    }
  }

private:
  void report(CornerRef end, const Vec2& holonomy, std::vector<SaddleConnection>& out) {
    out.push_back({start_class_, start_, s_.vertex_class(end), end, holonomy, chain_});
  }

  void visit_vertex(int q, int i, const Vec2& offset, const Wedge& w, std::vector<SaddleConnection>& out) {
    Vec2 v = s_.polygon(q).vertex(i) + offset;
    if (v.is_zero()) return;
    if (!wedge_contains(w, v)) return;
    if (sign(norm2(v) - bound2_) > 0) return;
    report({q, s_.polygon(q).wrap(i)}, v, out);
  }

  void explore_start(CornerRef c, const Wedge& w, const Vec2& offset, std::vector<SaddleConnection>& out) {
    const PlanarPolygon& poly = s_.polygon(c.polygon);
    const int n = poly.size();
    for (int j = 1; j < n; ++j) visit_vertex(c.polygon, c.edge + j, offset, w, out);
    for (int j = 1; j < n - 1; ++j) cross_edge(c.polygon, poly.wrap(c.edge + j), offset, w, out);
  }

  void explore(int q, int entry, const Vec2& offset, const Wedge& w, std::vector<SaddleConnection>& out) {
    const PlanarPolygon& poly = s_.polygon(q);
    const int n = poly.size();
    for (int j = 2; j < n; ++j) visit_vertex(q, entry + j, offset, w, out);
    for (int j = 1; j < n; ++j) cross_edge(q, poly.wrap(entry + j), offset, w, out);
  }

  void cross_edge(int q, int k, const Vec2& offset, const Wedge& w, std::vector<SaddleConnection>& out) {
    const PlanarPolygon& poly = s_.polygon(q);
    const Vec2 a = poly.vertex(k) + offset;
    const Vec2 b = poly.vertex(k + 1) + offset;
    if (orient(a, b) <= 0) return; // not an exit edge as seen from the origin

    Wedge child = w;
    // Tighten the lower side to direction a.
    if (int c = orient(w.lo, a); c > 0 || (c == 0 && sign(dot(w.lo, a)) > 0)) {
      child.lo = a;
      child.lo_closed = false;
    }
    if (int c = orient(b, w.hi); c > 0 || (c == 0 && sign(dot(b, w.hi)) > 0)) {
      child.hi = b;
      child.hi_closed = false;
    }
    if (orient(child.lo, child.hi) <= 0) return;

    const Vec2 e = b - a;
    const Vec2 a_clip = same_direction(child.lo, a) ? a : ray_line_point(child.lo, a, e);
    const Vec2 b_clip = same_direction(child.hi, b) ? b : ray_line_point(child.hi, a, e);
    if (sign(segment_distance2(a_clip, b_clip) - bound2_) > 0) return;

    const EdgeRef f = s_.partner({q, k});
    const PlanarPolygon& next = s_.polygon(f.polygon);
    const Vec2 next_offset = a - next.vertex(f.edge + 1);
    chain_.push_back({q, k});
    explore(f.polygon, f.edge, next_offset, child, out);
    chain_.pop_back();
  }

  const TranslationSurface& s_;
  QuadElem bound2_;
  CornerRef start_;
  int start_class_ = -1;
  std::vector<EdgeRef> chain_;
};

} // namespace

std::vector<SaddleConnection> saddle_connections(const TranslationSurface& surface, const QuadElem& length_bound) {
  if (sign(length_bound) <= 0) throw InvalidDirection("length bound must be positive");
  std::vector<SaddleConnection> out;

  if (surface.all_convex()) {
    WedgeSearch search(surface, length_bound);
    for (int p = 0; p < surface.num_polygons(); ++p) {
      for (int v = 0; v < surface.polygon(p).size(); ++v) search.run({p, v}, out);
    }
    return out;
  }

  // Non-convex input: search a triangulated copy, then re-trace each hit on
  // the original polygons to report crossings in its own terms.
  const detail::Refinement refined = detail::triangulate(surface);
  WedgeSearch search(refined.surface, length_bound);
  std::vector<SaddleConnection> raw;
  for (int p = 0; p < refined.surface.num_polygons(); ++p) {
    for (int v = 0; v < refined.surface.polygon(p).size(); ++v) search.run({p, v}, raw);
  }
  for (const SaddleConnection& sc : raw) {
    const CornerRef start = refined.original_corner(sc.start_corner);
    // The refined corner's sector sits inside the original one, except when
    // the direction runs along a cut that starts at this corner's far side.
    CornerRef origin = start;
    if (!sector_contains(surface, origin, sc.holonomy)) {
      for (const CornerRef& c : surface.corners_of(surface.vertex_class(start))) {
        if (sector_contains(surface, c, sc.holonomy)) {
          origin = c;
          break;
        }
      }
    }
    RawTrace t = trace_from_corner(surface, origin, sc.holonomy, 1 << 24, false);
    if (!t.closed || !(t.length == QuadElem(surface.field(), 1))) {
      throw std::logic_error("re-traced saddle connection does not close with the same holonomy");
    }
    out.push_back({surface.vertex_class(origin), origin, surface.vertex_class(t.end_corner), t.end_corner,
                   sc.holonomy, std::move(t.crossings)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition.

QuadElem cylinder_modulus(const Cylinder& c) { return c.modulus(); }

std::vector<QuadElem> Decomposition::moduli() const {
  std::vector<QuadElem> m;
  for (const auto& c : cylinders) m.push_back(c.modulus());
  return m;
}

namespace {

Vec2 clear_denominators(const Vec2& w) {
  Integer l = common_denominator(w.x);
  mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), common_denominator(w.y).get_mpz_t());
  Vec2 scaled = Rational(l) * w;
  Integer g = 0;
  for (const Rational* r : {&scaled.x.a(), &scaled.x.b(), &scaled.y.a(), &scaled.y.b()}) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), r->get_num_mpz_t());
  }
  if (g == 0) return scaled;
  return Rational(Integer(1), g) * scaled;
}

} // namespace

Vec2 canonical_direction(const Vec2& v) {
  if (v.is_zero()) throw InvalidDirection("zero direction");
  if (!v.x.is_zero()) {
    QuadElem inv = inverse(abs(v.x));
    return clear_denominators({v.x * inv, v.y * inv});
  }
  return {QuadElem(v.x.field()), QuadElem(v.x.field(), sign(v.y))};
}

Vec2 canonical_line(const Vec2& v) {
  Vec2 c = canonical_direction(v);
  if (sign(c.y) < 0 || (c.y.is_zero() && sign(c.x) < 0)) return canonical_direction(-v);
  return c;
}

namespace {

struct Prong {
  CornerRef corner;
  bool east;
};

// Horizontal saddle-connection piece used to stop vertical cross-cuts.
struct HPiece {
  QuadElem y;
  QuadElem x0;
  QuadElem x1;
  int sc;
  QuadElem offset; // distance from the saddle connection's start to x0
  bool start_is_vertex;
  bool end_is_vertex;
};

struct CrossCut {
  explicit CrossCut(QuadraticField f) : height(f), top_offset(f) {}
  bool ok = false;
  QuadElem height;
  int top_sc = -1;
  QuadElem top_offset; // position along top_sc
};

// Value of a field element with an error bound, for cheap comparisons.
struct Approx {
  double value;
  double error;
};

Approx approx(const QuadElem& x) {
  const double a = x.a().get_d();
  const double b = x.b().get_d() * std::sqrt(static_cast<double>(x.radicand()));
  return {a + b, 1e-14 * (std::abs(a) + std::abs(b)) + 1e-300};
}

// Sign of x - y, decided in floating point when the gap is clear.
int compare_filtered(const QuadElem& x, const Approx& xa, const QuadElem& y, const Approx& ya) {
  const double gap = xa.value - ya.value;
  const double err = xa.error + ya.error;
  if (gap > err) return 1;
  if (gap < -err) return -1;
  return sign(x - y);
}

// East-going rays through convex polygons only need their height: the exit
// edge is the unique upward edge spanning it.
class EastTracer {
public:
  explicit EastTracer(const TranslationSurface& s) : s_(s) {
    for (int p = 0; p < s.num_polygons(); ++p) {
      const PlanarPolygon& poly = s.polygon(p);
      std::vector<EdgeInfo> info;
      for (int k = 0; k < poly.size(); ++k) {
        const Vec2 e = poly.edge(k);
        info.push_back({sign(e.y) > 0, approx(poly.vertex(k).y), approx(poly.vertex(k + 1).y),
                        s.gluing_translation({p, k}).y});
      }
      edges_.push_back(std::move(info));
    }
  }

  struct Result {
    bool closed = false;
    int steps = 0;
  };

  Result trace(CornerRef c, int cap) const {
    const PlanarPolygon& start = s_.polygon(c.polygon);
    if (sign(start.edge(c.edge).y) == 0) return {true, 0}; // along the bottom edge
    int p = c.polygon;
    QuadElem y = start.vertex(c.edge).y;
    int skip_vertex = c.edge;
    for (int steps = 0;; ++steps) {
      const PlanarPolygon& poly = s_.polygon(p);
      const Approx ya = approx(y);
      int exit = -1;
      for (int k = 0; k < poly.size(); ++k) {
        const EdgeInfo& e = edges_[p][k];
        if (!e.up) continue;
        if (skip_vertex >= 0 && (k == skip_vertex || poly.wrap(k + 1) == skip_vertex)) continue;
        const int lo = compare_filtered(y, ya, poly.vertex(k).y, e.y0);
        if (lo < 0) continue;
        const int hi = compare_filtered(y, ya, poly.vertex(k + 1).y, e.y1);
        if (hi > 0) continue;
        if (lo == 0 || hi == 0) return {true, steps};
        exit = k;
        break;
      }
      if (exit < 0) throw std::logic_error("horizontal ray found no exit from polygon " + std::to_string(p));
      if (steps >= cap) return {false, steps};
      y += edges_[p][exit].ty;
      p = s_.partner({p, exit}).polygon;
      skip_vertex = -1;
    }
  }

private:
  struct EdgeInfo {
    bool up;
    Approx y0, y1;
    QuadElem ty;
  };
  const TranslationSurface& s_;
  std::vector<std::vector<EdgeInfo>> edges_;
};

class Decomposer {
public:
  Decomposer(const TranslationSurface& normalized, int step_cap)
      : s_(normalized), cap_(step_cap), east_(QuadElem(s_.field(), 1), QuadElem(s_.field())),
        north_(QuadElem(s_.field()), QuadElem(s_.field(), 1)), pieces_(s_.num_polygons()) {}

  // Returns false if some separatrix is still open after the cap.
  bool trace_all(int& steps) {
    steps = 0;
    prongs_.assign(s_.num_vertex_classes(), {});
    const Vec2 west = -east_;
    for (int cls = 0; cls < s_.num_vertex_classes(); ++cls) {
      for (const CornerRef& c : s_.corners_of(cls)) {
        const PlanarPolygon& poly = s_.polygon(c.polygon);
        const Vec2 out = poly.edge(c.edge);
        const Vec2 back = poly.vertex(c.edge - 1) - poly.vertex(c.edge);
        bool has_e = in_ccw_sector(out, back, east_);
        bool has_w = in_ccw_sector(out, back, west);
        if (has_e && has_w) {
          bool east_first = ccw_angle_compare(out, east_, west) < 0;
          prongs_[cls].push_back({c, east_first});
          prongs_[cls].push_back({c, !east_first});
        } else if (has_e) {
          prongs_[cls].push_back({c, true});
        } else if (has_w) {
          prongs_[cls].push_back({c, false});
        }
      }
    }

    // Screen every separatrix cheaply first; exact pieces only once all close.
    if (s_.all_convex()) {
      EastTracer fast(s_);
      int screened = 0;
      for (const auto& list : prongs_) {
        for (const Prong& pr : list) {
          if (!pr.east) continue;
          EastTracer::Result r = fast.trace(pr.corner, cap_);
          screened += r.steps;
          if (!r.closed) {
            steps = screened;
            return false;
          }
        }
      }
    }
    for (int cls = 0; cls < s_.num_vertex_classes(); ++cls) {
      for (int i = 0; i < static_cast<int>(prongs_[cls].size()); ++i) {
        if (!prongs_[cls][i].east) continue;
        RawTrace t = trace_from_corner(s_, prongs_[cls][i].corner, east_, cap_, true);
        steps += t.steps;
        if (!t.closed) return false;
        sc_start_.push_back({cls, i});
        traces_.push_back(std::move(t));
      }
    }
    return true;
  }

  std::vector<Cylinder> assemble(std::vector<SaddleConnection>& scs) {
    const int n = static_cast<int>(traces_.size());
    // Arrival prong of each saddle connection, then boundary successors.
    std::map<std::pair<int, int>, int> starting_at; // (class, prong index) -> sc
    for (int i = 0; i < n; ++i) starting_at[sc_start_[i]] = i;

    std::vector<int> bottom_next(n), top_next(n);
    std::vector<std::vector<bool>> west_used(s_.num_vertex_classes());
    for (int cls = 0; cls < s_.num_vertex_classes(); ++cls) west_used[cls].assign(prongs_[cls].size(), false);

    for (int i = 0; i < n; ++i) {
      CornerRef arrive = traces_[i].end_corner;
      const Vec2 west = -east_;
      if (!sector_contains(s_, arrive, west)) arrive = s_.next_ccw(arrive);
      const int cls = s_.vertex_class(arrive);
      const auto& pr = prongs_[cls];
      int k = -1;
      for (int j = 0; j < static_cast<int>(pr.size()); ++j) {
        if (!pr[j].east && pr[j].corner == arrive) k = j;
      }
      if (k < 0 || west_used[cls][k]) throw std::logic_error("horizontal separatrices do not pair up");
      west_used[cls][k] = true;
      const int m = static_cast<int>(pr.size());
      bottom_next[i] = starting_at.at({cls, (k - 1 + m) % m});
      top_next[i] = starting_at.at({cls, (k + 1) % m});
    }

    // Lengths and pieces.
    lengths_.clear();
    for (int i = 0; i < n; ++i) {
      lengths_.push_back(traces_[i].length);
      QuadElem offset(s_.field());
      const auto& ps = traces_[i].pieces;
      for (std::size_t j = 0; j < ps.size(); ++j) {
        const Piece& pc = ps[j];
        const bool first = j == 0, last = j + 1 == ps.size();
        pieces_[pc.polygon].push_back({pc.from.y, pc.from.x, pc.to.x, i, offset, first, last});
        if (pc.along_edge) {
          // The same segment is the upper boundary of the glued polygon.
          EdgeRef f = s_.partner({pc.polygon, pc.edge});
          const PlanarPolygon& q = s_.polygon(f.polygon);
          pieces_[f.polygon].push_back({q.vertex(f.edge).y, q.vertex(f.edge + 1).x, q.vertex(f.edge).x, i, offset,
                                        first, last});
        }
        offset += pc.to.x - pc.from.x;
      }
    }

    std::vector<int> bottom_cycle(n, -1), top_cycle(n, -1);
    std::vector<std::vector<int>> bottoms, tops;
    for (int i = 0; i < n; ++i) {
      if (bottom_cycle[i] < 0) bottoms.push_back(walk(i, bottom_next, bottom_cycle, static_cast<int>(bottoms.size())));
      if (top_cycle[i] < 0) tops.push_back(walk(i, top_next, top_cycle, static_cast<int>(tops.size())));
    }
    if (bottoms.size() != tops.size()) throw std::logic_error("cylinder boundary cycles do not match");

    std::vector<Cylinder> cylinders;
    top_owner_.assign(n, -1);
    std::vector<bool> top_taken(tops.size(), false);
    for (const auto& bottom : bottoms) {
      QuadElem circumference(s_.field());
      for (int i : bottom) circumference += lengths_[i];

      CrossCut cut = cross_cut(bottom.front());
      const int t = top_cycle[cut.top_sc];
      if (top_taken[t]) throw std::logic_error("two cylinders share a top boundary");
      top_taken[t] = true;

      QuadElem top_length(s_.field());
      QuadElem top_pos(s_.field());
      for (int i : tops[t]) {
        if (i == cut.top_sc) top_pos = top_length + cut.top_offset;
        top_length += lengths_[i];
      }
      if (!(top_length == circumference)) throw std::logic_error("cylinder top and bottom lengths differ");

      QuadElem twist = top_pos - cut_start_;
      while (sign(twist) < 0) twist += circumference;
      while (sign(twist - circumference) >= 0) twist -= circumference;
      for (int i : tops[t]) top_owner_[i] = static_cast<int>(cylinders.size());
      cylinders.push_back({circumference, cut.height, twist, bottom, tops[t]});
    }

    scs.clear();
    for (int i = 0; i < n; ++i) {
      const Prong& pr = prongs_[sc_start_[i].first][sc_start_[i].second];
      scs.push_back({sc_start_[i].first, pr.corner, s_.vertex_class(traces_[i].end_corner), traces_[i].end_corner,
                     Vec2(lengths_[i], QuadElem(s_.field())), traces_[i].crossings});
    }
    return cylinders;
  }

  // Splits every polygon into horizontal slabs at the heights of its vertices
  // and of the saddle-connection pieces inside it; each trapezoid of a slab
  // lies in one cylinder, found by cutting upward from an interior point.
  std::vector<CylinderRegion> regions() {
    std::vector<CylinderRegion> out;
    for (int p = 0; p < s_.num_polygons(); ++p) {
      const PlanarPolygon& poly = s_.polygon(p);
      std::vector<QuadElem> levels;
      for (const Vec2& v : poly.vertices()) levels.push_back(v.y);
      for (const HPiece& h : pieces_[p]) levels.push_back(h.y);
      std::sort(levels.begin(), levels.end());
      levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
      for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        const QuadElem& lo = levels[k];
        const QuadElem& hi = levels[k + 1];
        const QuadElem mid = (lo + hi) * Rational(1, 2);
        // Edges spanning the slab, ordered by where they cross its middle.
        std::vector<std::pair<QuadElem, int>> crossing;
        for (int e = 0; e < poly.size(); ++e) {
          const Vec2 &a = poly.vertex(e), &b = poly.vertex(e + 1);
          const QuadElem ymin = std::min(a.y, b.y), ymax = std::max(a.y, b.y);
          if (sign(ymin - lo) > 0 || sign(hi - ymax) > 0) continue;
          crossing.emplace_back(x_at(a, b, mid), e);
        }
        std::sort(crossing.begin(), crossing.end(),
                  [](const auto& u, const auto& v) { return sign(u.first - v.first) < 0; });
        for (std::size_t i = 0; i + 1 < crossing.size(); i += 2) {
          const int el = crossing[i].second, er = crossing[i + 1].second;
          const Vec2 &al = poly.vertex(el), &bl = poly.vertex(el + 1);
          const Vec2 &ar = poly.vertex(er), &br = poly.vertex(er + 1);
          CylinderRegion r{locate(p, crossing[i].first, crossing[i + 1].first, mid), p, {}};
          r.vertices = {Vec2(x_at(al, bl, lo), lo), Vec2(x_at(ar, br, lo), lo), Vec2(x_at(ar, br, hi), hi),
                        Vec2(x_at(al, bl, hi), hi)};
          if (r.vertices[2] == r.vertices[3]) r.vertices.pop_back();
          if (r.vertices[0] == r.vertices[1]) r.vertices.erase(r.vertices.begin());
          out.push_back(std::move(r));
        }
      }
    }
    return out;
  }

private:
  static QuadElem x_at(const Vec2& a, const Vec2& b, const QuadElem& y) {
    return a.x + (b.x - a.x) * ((y - a.y) / (b.y - a.y));
  }

  int locate(int p, const QuadElem& x0, const QuadElem& x1, const QuadElem& y) {
    for (int den = 2; den < 64; ++den) {
      for (int num = 1; num < den; ++num) {
        if (std::gcd(num, den) != 1) continue;
        CrossCut c = cut_from(p, Vec2(x0 + Rational(num, den) * (x1 - x0), y));
        if (c.ok) return top_owner_.at(c.top_sc);
      }
    }
    throw std::logic_error("no vertical cut from the region avoids the singularities");
  }

  static std::vector<int> walk(int start, const std::vector<int>& next, std::vector<int>& label, int id) {
    std::vector<int> cycle;
    int i = start;
    do {
      if (label[i] >= 0) throw std::logic_error("boundary successor map is not a permutation");
      label[i] = id;
      cycle.push_back(i);
      i = next[i];
    } while (i != start);
    // Canonical start: smallest id, order preserved.
    auto it = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), it, cycle.end());
    return cycle;
  }

  // Vertical cut from a point of saddle connection `sc` up to the next
  // horizontal saddle connection; retries at other points when it lands on a
  // singularity.
  CrossCut cross_cut(int sc) {
    const Piece& first = traces_[sc].pieces.front();
    const QuadElem width = first.to.x - first.from.x;
    for (int den = 2; den < 64; ++den) {
      for (int num = 1; num < den; ++num) {
        if (std::gcd(num, den) != 1) continue;
        Vec2 x{first.from.x + Rational(num, den) * width, first.from.y};
        CrossCut c = cut_from(first.polygon, x);
        if (c.ok) {
          cut_start_ = Rational(num, den) * width;
          return c;
        }
      }
    }
    throw std::logic_error("no vertical cross-cut avoids the singularities");
  }

  CrossCut cut_from(int p, Vec2 x) {
    CrossCut out(s_.field());
    for (int guard = 0; guard < 1 << 20; ++guard) {
      const PlanarPolygon& poly = s_.polygon(p);
      auto ex = first_exit(poly, x, north_);
      if (!ex) throw std::logic_error("vertical cut escaped polygon " + std::to_string(p));
      const HPiece* hit = nullptr;
      for (const HPiece& h : pieces_[p]) {
        if (sign(h.y - x.y) <= 0) continue;
        if (sign(h.y - x.y - ex->lambda) > 0) continue;
        if (sign(x.x - h.x0) < 0 || sign(h.x1 - x.x) < 0) continue;
        if (!hit || sign(h.y - hit->y) < 0) hit = &h;
      }
      if (hit) {
        if ((hit->start_is_vertex && x.x == hit->x0) || (hit->end_is_vertex && x.x == hit->x1)) return out;
        out.ok = true;
        out.height += hit->y - x.y;
        out.top_sc = hit->sc;
        out.top_offset = hit->offset + (x.x - hit->x0);
        return out;
      }
      if (ex->vertex >= 0) return out;
      out.height += ex->lambda;
      EdgeRef e{p, ex->edge};
      x = x + ex->lambda * north_ + s_.gluing_translation(e);
      p = s_.partner(e).polygon;
    }
    throw std::logic_error("vertical cut did not reach a horizontal saddle connection");
  }

  const TranslationSurface& s_;
  int cap_;
  Vec2 east_;
  Vec2 north_;
  std::vector<std::vector<Prong>> prongs_;
  std::vector<std::pair<int, int>> sc_start_;
  std::vector<RawTrace> traces_;
  std::vector<QuadElem> lengths_;
  std::vector<std::vector<HPiece>> pieces_;
  std::vector<int> top_owner_;
  QuadElem cut_start_{QuadraticField(2)};
};

} // namespace

std::vector<CylinderRegion> cylinder_regions(const TranslationSurface& surface, const Vec2& direction,
                                             int step_cap) {
  const Vec2 dir = canonical_direction(direction);
  const Mat2 r = Mat2::rotation_scaling(dir);
  const TranslationSurface normalized = apply_linear(surface, r);
  Decomposer d(normalized, step_cap);
  int steps = 0;
  if (!d.trace_all(steps)) return {};
  std::vector<SaddleConnection> scs;
  d.assemble(scs);
  std::vector<CylinderRegion> out = d.regions();
  const QuadElem scale = inverse(norm2(dir));
  const Mat2 back{scale * dir.x, -(scale * dir.y), scale * dir.y, scale * dir.x};
  for (auto& reg : out) {
    for (auto& v : reg.vertices) v = back(v);
  }
  return out;
}

Decomposition decompose(const TranslationSurface& surface, const Vec2& direction, int step_cap) {
  if (step_cap < 1) throw InvalidDirection("step cap must be positive");
  const QuadraticField f = surface.field();
  Decomposition out{canonical_direction(direction), FlowStatus::undetermined, {}, {}, 0, QuadElem(f), QuadElem(f)};
  const Mat2 r = Mat2::rotation_scaling(out.direction);
  const TranslationSurface normalized = apply_linear(surface, r);
  out.surface_area = normalized.area();

  Decomposer d(normalized, step_cap);
  if (!d.trace_all(out.steps_used)) return out;

  out.cylinders = d.assemble(out.saddle_connections);
  for (const auto& c : out.cylinders) out.cylinder_area += c.circumference * c.height;
  if (!(out.cylinder_area == out.surface_area)) {
    throw std::logic_error("cylinder areas do not add up to the surface area");
  }
  // Report holonomies in the caller's coordinates: R^{-1} (l, 0) = l/|v|^2 * v.
  const QuadElem scale = inverse(norm2(out.direction));
  for (auto& sc : out.saddle_connections) sc.holonomy = (sc.holonomy.x * scale) * out.direction;
  out.status = FlowStatus::periodic;
  return out;
}

} // namespace prym
