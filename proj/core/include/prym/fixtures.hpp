#pragma once

// Small reference surfaces used by tests, benchmarks and the CLI demos.

#include <vector>

#include "prym/surface.hpp"

namespace prym::fixtures {

/// Unit square, opposite sides glued. Q(sqrt(D)) coordinates (all rational).
TranslationSurface square_torus(long radicand = 2);

/// Regular octagon with unit sides in Q(sqrt(2)), opposite sides glued: H(2).
TranslationSurface regular_octagon();

/// Three unit squares in an L, as one non-convex octagon: H(2).
TranslationSurface l_shape(long radicand = 2);

/// Two horizontal cylinders, a 2x2 one under a 1 x sqrt(2) one, as a single
/// non-convex polygon. Horizontal moduli 1 and sqrt(2).
TranslationSurface incommensurable_two_cylinder();

/// Square-tiled surface: square i has its right side glued to the left side
/// of square right[i] and its top glued to the bottom of square up[i].
/// Throws DisconnectedSurface if the permutations do not act transitively.
TranslationSurface square_tiled(const std::vector<int>& right, const std::vector<int>& up, long radicand = 2);

} // namespace prym::fixtures
