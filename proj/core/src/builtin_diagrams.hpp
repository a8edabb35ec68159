#pragma once

#include <string>
#include <utility>
#include <vector>

namespace prym::detail {

/// (file stem, JSON text) of every diagram under data/diagrams, embedded at build time.
const std::vector<std::pair<std::string, std::string>>& builtin_diagram_sources();

} // namespace prym::detail
