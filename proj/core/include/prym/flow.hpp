#pragma once

// Straight-line flow on translation surfaces, in exact arithmetic.
//
// trace_ray follows one geodesic through the polygon complex.
// saddle_connections enumerates every saddle connection up to a length bound
// by unfolding polygon chains inside a narrowing wedge of directions.
// decompose classifies one direction: completely periodic (with its cylinders)
// or undetermined after a bounded amount of tracing.

#include <optional>
#include <variant>
#include <vector>

#include "prym/qfield.hpp"
#include "prym/surface.hpp"
#include "prym/vec2.hpp"

namespace prym {

inline constexpr int kDefaultStepCap = 100000;

/// A point inside (or on the boundary of) one polygon, in that polygon's
/// coordinates.
struct SurfacePoint {
  int polygon = 0;
  Vec2 position;
};

struct HitSingularity {
  CornerRef end_corner;      // polygon corner where the ray stopped
  int end_class = -1;        // vertex class of that corner
  Vec2 holonomy;             // total displacement
  std::vector<EdgeRef> crossings; // edges crossed, in order (exit side)
};

struct CapExceeded {
  int steps = 0;
};

using TraceResult = std::variant<HitSingularity, CapExceeded>;

/// Whether `direction` leaves the cone point through corner c, i.e. lies in
/// the half-open sector [edge c, reversed edge c-1).
bool sector_contains(const TranslationSurface& surface, CornerRef c, const Vec2& direction);

/// Corners of vertex class `cls` whose sector contains `direction`; one per
/// outgoing ray in that direction, in counter-clockwise order.
std::vector<CornerRef> outgoing_corners(const TranslationSurface& surface, int cls, const Vec2& direction);

/// Ray from a singularity, leaving through corner `start`.
/// Throws InvalidDirection if the direction is zero or outside the sector.
TraceResult trace_ray(const TranslationSurface& surface, CornerRef start, const Vec2& direction, int step_cap);

/// Ray from an arbitrary point. Throws StartsOnVertexAmbiguous when the point
/// is a polygon vertex (use the corner overload to choose a sector).
TraceResult trace_ray(const TranslationSurface& surface, const SurfacePoint& start, const Vec2& direction,
                      int step_cap);

struct SaddleConnection {
  int start_class = -1;
  CornerRef start_corner; // outgoing sector at the start singularity
  int end_class = -1;
  CornerRef end_corner;
  Vec2 holonomy;
  std::vector<EdgeRef> crossings;
};

/// Every oriented saddle connection with |holonomy| <= length_bound, found by
/// wedge-narrowing unfolding. Order: start corners in index order, then
/// counter-clockwise within each sector.
std::vector<SaddleConnection> saddle_connections(const TranslationSurface& surface, const QuadElem& length_bound);

struct Cylinder {
  // Lengths are measured after the direction is rotated and scaled to the
  // horizontal by [[a, b], [-b, a]], so both pick up the factor |v|.
  QuadElem circumference;
  QuadElem height;
  QuadElem twist;          // in [0, circumference)
  std::vector<int> bottom; // saddle-connection ids (into Decomposition), left to right
  std::vector<int> top;
  QuadElem modulus() const { return height / circumference; }
};

QuadElem cylinder_modulus(const Cylinder& c);

enum class FlowStatus { periodic, undetermined };

struct Decomposition {
  Vec2 direction; // canonical representative
  FlowStatus status = FlowStatus::undetermined;
  std::vector<Cylinder> cylinders;
  /// Saddle connections parallel to the direction (positive orientation),
  /// holonomies in the input surface's coordinates.
  std::vector<SaddleConnection> saddle_connections;
  int steps_used = 0;
  QuadElem cylinder_area;  // sum of circumference * height
  QuadElem surface_area;   // area of the normalized surface, |v|^2 * area

  bool periodic() const { return status == FlowStatus::periodic; }
  std::vector<QuadElem> moduli() const;
};

/// Scales by a positive rational so all four rational coordinates are coprime
/// integers, after dividing by |x| (or |y| when x = 0). Equal projective,
/// same-sense directions map to the same vector.
Vec2 canonical_direction(const Vec2& v);

/// Like canonical_direction, also identifying v with -v (y > 0, or y = 0 and x > 0).
Vec2 canonical_line(const Vec2& v);

Decomposition decompose(const TranslationSurface& surface, const Vec2& direction, int step_cap = kDefaultStepCap);

/// A piece of one polygon lying in a single cylinder (index into the
/// decomposition's cylinder list), vertices counter-clockwise.
struct CylinderRegion {
  int cylinder = -1;
  int polygon = 0;
  std::vector<Vec2> vertices;
};

/// Tiles every polygon by trapezoids with sides parallel to the direction,
/// labelled by cylinder. Empty when the direction is undetermined.
std::vector<CylinderRegion> cylinder_regions(const TranslationSurface& surface, const Vec2& direction,
                                             int step_cap = kDefaultStepCap);

} // namespace prym
