#pragma once

// JSON encodings shared by surface files, manifests and reports.
//
// A QuadElem a + b*sqrt(D) is the array [a_num, a_den, b_num, b_den, D].
// Integers outside the signed 64-bit range are written as decimal strings;
// both forms are accepted on input.

#include <string>

#include <nlohmann/json.hpp>

#include "prym/qfield.hpp"
#include "prym/surface.hpp"
#include "prym/vec2.hpp"

namespace prym {

using Json = nlohmann::ordered_json;

Json integer_to_json(const Integer& n);
/// Throws ParseError naming `where` on anything but an integer or a decimal string.
Integer integer_from_json(const Json& j, const std::string& where);

Json to_json(const QuadElem& x);
QuadElem quad_from_json(const Json& j, const std::string& where);
/// As quad_from_json, additionally requiring the radicand to be `radicand`.
QuadElem quad_from_json(const Json& j, long radicand, const std::string& where);

Json to_json(const Vec2& v);
Vec2 vec_from_json(const Json& j, long radicand, const std::string& where);

/// {"D": int, "polygons": [[[x, y], ...], ...], "gluing": [[[p, e], [p', e']], ...]}
Json to_json(const TranslationSurface& s);
/// ParseError on malformed documents; surface validation errors pass through.
TranslationSurface surface_from_json(const Json& j);

/// Indented output in which arrays without nested objects stay on one line.
std::string pretty(const Json& j);

/// Parses text, turning syntax errors into ParseError with byte offset.
Json parse_json(const std::string& text, const std::string& source);

} // namespace prym
