#pragma once

// Internal: cut non-convex polygons into triangles so wedge narrowing can
// assume every polygon is convex.

#include <vector>

#include "prym/surface.hpp"

namespace prym::detail {

struct Refinement {
  TranslationSurface surface;
  // corner_origin[p][k]: the original corner that refined corner (p, k) sits in.
  std::vector<std::vector<CornerRef>> corner_origin;

  CornerRef original_corner(CornerRef c) const { return corner_origin[c.polygon][c.edge]; }
};

/// Convex polygons are kept whole; the others are ear-clipped.
Refinement triangulate(const TranslationSurface& surface);

} // namespace prym::detail
