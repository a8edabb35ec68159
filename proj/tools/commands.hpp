#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "prym/flow.hpp"
#include "prym/qfield.hpp"
#include "prym/surface.hpp"
#include "prym/veech.hpp"

namespace prym::cli {

enum ExitCode { kOk = 0, kFailed = 1, kBadInput = 2 };

struct RunConfig {
  std::string command;
  std::string manifest;
  std::string out;
  std::string input;     // scan/render: surface file, manifest, report or audit output
  std::string direction; // scan: "x,y" with rational entries, or a JSON vector
  int index = 0;         // entry of a manifest or audit output
  Rational length_bound = 20;
  int step_cap = kDefaultStepCap;
  int max_directions = 10000;
  int jobs = 1;
  bool render = false;
};

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_audit(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_scan(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_render(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Parses arguments and dispatches. Usage errors exit with kBadInput.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& log);

/// A surface to draw, optionally with the cylinders of one direction.
struct RenderInput {
  TranslationSurface surface;
  std::optional<Certificate> certificate;
};

/// Reads a surface file, a manifest entry, a report or an entry of an audit
/// output. Throws prym::Error on malformed input.
RenderInput load_input(const std::string& path, int index);

/// SVG with one panel per polygon; glued edges share a colour and a label,
/// cylinder regions (if any) are shaded by cylinder.
std::string render_svg(const TranslationSurface& surface, const std::vector<CylinderRegion>& regions = {});

/// Decimal expansion of a + b*sqrt(D) to `digits` significant digits,
/// computed in 100-digit floating point.
std::string high_precision(const QuadElem& x, int digits = 12);

} // namespace prym::cli
