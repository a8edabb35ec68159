#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "prym/io.hpp"
#include "prym/models.hpp"

namespace prym::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw std::runtime_error("cannot write " + path);
}

std::string join(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

std::string label(const CandidateSpec& spec) {
  const bool numbered = spec.model.size() == 1 && spec.model[0] >= '1' && spec.model[0] <= '8';
  return (numbered ? "M" : "") + spec.model + " D=" + std::to_string(spec.radicand);
}

// Rational entries "p/q" separated by a comma, or a JSON vector.
Vec2 parse_direction(const std::string& text, long radicand) {
  if (!text.empty() && text.front() == '[') return vec_from_json(parse_json(text, "--direction"), radicand, "--direction");
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ParseError("--direction: expected x,y");
  auto component = [&](std::string s) {
    s.erase(0, s.find_first_not_of(' '));
    s.erase(s.find_last_not_of(' ') + 1);
    Rational q;
    if (s.empty() || q.set_str(s, 10) != 0) throw ParseError("--direction: '" + s + "' is not a rational number");
    q.canonicalize();
    return QuadElem(QuadraticField(radicand), q);
  };
  Vec2 v{component(text.substr(0, comma)), component(text.substr(comma + 1))};
  if (v.is_zero()) throw ParseError("--direction: zero vector");
  return v;
}

AuditConfig audit_config(const RunConfig& c) {
  AuditConfig a;
  a.length_bound = c.length_bound;
  a.step_cap = c.step_cap;
  a.max_directions = c.max_directions;
  a.jobs = c.jobs;
  return a;
}

std::string svg_path(const std::string& out, int k) {
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + "-" + std::to_string(k) + ".svg")).string();
}

} // namespace

RenderInput load_input(const std::string& path, int index) {
  const Json j = parse_json(read_file(path), path);
  auto entry = [&](const Json& arr, const std::string& what) -> const Json& {
    if (index < 0 || index >= static_cast<int>(arr.size())) {
      throw ParseError(path + ": " + what + " has no entry " + std::to_string(index));
    }
    return arr[index];
  };
  if (j.is_array()) {
    return {build_candidate(manifest_from_json(Json::array({entry(j, "manifest")}), path).front()), std::nullopt};
  }
  if (!j.is_object()) throw ParseError(path + ": expected a surface, manifest, report or audit output");
  if (j.contains("polygons")) return {surface_from_json(j), std::nullopt};
  const Json* report = &j;
  if (j.contains("reports")) {
    if (!j["reports"].is_array()) throw ParseError(path + ": reports must be an array");
    report = &entry(j["reports"], "audit output");
  }
  if (!report->contains("candidate") || !(*report)["candidate"].is_object()) {
    throw ParseError(path + ": report has no candidate");
  }
  const CandidateSpec spec = manifest_from_json(Json::array({(*report)["candidate"]}), path).front();
  RenderInput in{build_candidate(spec), std::nullopt};
  if (report->contains("certificate") && !(*report)["certificate"].is_null()) {
    in.certificate = certificate_from_json((*report)["certificate"], spec.radicand);
  }
  return in;
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& log) {
  std::vector<CandidateSpec> specs;
  try {
    specs = load_manifest(read_file(config.manifest), config.manifest);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kBadInput;
  }
  int invalid = 0;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const CandidateSpec& spec = specs[k];
    out << k << " " << label(spec);
    try {
      const TranslationSurface s = build_candidate(spec);
      const StratumInfo& st = s.stratum();
      out << " genus=" << st.genus << " orders=" << join(st.orders)
          << " involution=" << (diagram_for(spec).involution ? "ok" : "none") << "\n";
    } catch (const Error& e) {
      ++invalid;
      out << " invalid: " << e.what() << "\n";
      log << "error: candidate " << k << " (" << label(spec) << "): " << e.what() << "\n";
    }
  }
  return invalid ? kFailed : kOk;
}

int cmd_audit(const RunConfig& config, std::ostream& out, std::ostream& log) {
  std::vector<CandidateSpec> specs;
  try {
    specs = load_manifest(read_file(config.manifest), config.manifest);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kBadInput;
  }
  const AuditConfig ac = audit_config(config);
  Json reports = Json::array();
  int eliminated = 0, not_eliminated = 0, invalid = 0;
  long undetermined = 0;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const CandidateSpec& spec = specs[k];
    try {
      const TranslationSurface s = build_candidate(spec);
      AuditReport r = audit_candidate(s, ac);
      r.candidate = spec;
      undetermined += r.stats.undetermined_count;
      if (r.verdict == Verdict::eliminated) {
        ++eliminated;
        if (config.render && !config.out.empty()) {
          write_file(svg_path(config.out, static_cast<int>(k)),
                     render_svg(s, cylinder_regions(s, r.certificate->direction, ac.step_cap)));
        }
      } else {
        ++not_eliminated;
      }
      log << "[" << k + 1 << "/" << specs.size() << "] " << label(spec) << ": "
          << (r.verdict == Verdict::eliminated ? "eliminated" : "not eliminated") << " after "
          << r.stats.directions_scanned << " directions (" << r.wall_time << " s)\n";
      reports.push_back(to_json(r));
    } catch (const Error& e) {
      ++invalid;
      log << "error: candidate " << k << " (" << label(spec) << "): " << e.what() << "\n";
      reports.push_back({{"candidate", to_json(spec)}, {"verdict", "invalid"}, {"error", e.what()}});
    }
  }
  Json doc = {{"reports", reports},
              {"summary",
               {{"eliminated", eliminated},
                {"not_eliminated", not_eliminated},
                {"invalid", invalid},
                {"undetermined_totals", undetermined}}}};
  const std::string text = pretty(doc) + "\n";
  if (config.out.empty()) {
    out << text;
  } else {
    write_file(config.out, text);
  }
  log << "eliminated " << eliminated << ", not eliminated " << not_eliminated << ", invalid " << invalid << "\n";
  return not_eliminated || invalid ? kFailed : kOk;
}

int cmd_scan(const RunConfig& config, std::ostream& out, std::ostream& log) {
  try {
    const RenderInput in = load_input(config.input, config.index);
    const Vec2 v = parse_direction(config.direction, in.surface.field().radicand());
    const Decomposition d = decompose(in.surface, v, config.step_cap);
    out << "direction " << d.direction << ": ";
    if (!d.periodic()) {
      out << "undetermined after " << d.steps_used << " steps\n";
      return kOk;
    }
    out << "periodic, " << d.cylinders.size() << " cylinder" << (d.cylinders.size() == 1 ? "" : "s") << "\n";
    out << "cylinder\tcircumference\theight\tmodulus\n";
    for (std::size_t k = 0; k < d.cylinders.size(); ++k) {
      const Cylinder& c = d.cylinders[k];
      out << k << "\t" << c.circumference << "\t" << c.height << "\t" << c.modulus() << "\n";
    }
    if (auto w = commensurability_witness(d.moduli())) {
      out << "VIOLATION: moduli " << w->i << " and " << w->j << " have irrational ratio m_j/m_i = " << w->ratio << "\n";
    } else {
      out << "parabolic\n";
    }
    return kOk;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kBadInput;
  }
}

int cmd_render(const RunConfig& config, std::ostream& out, std::ostream& log) {
  try {
    const RenderInput in = load_input(config.input, config.index);
    std::vector<CylinderRegion> regions;
    if (in.certificate) regions = cylinder_regions(in.surface, in.certificate->direction, config.step_cap);
    const std::string svg = render_svg(in.surface, regions);
    if (config.out.empty()) {
      out << svg;
    } else {
      write_file(config.out, svg);
    }
    return kOk;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kBadInput;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& log) {
  CLI::App app{"Exact cylinder decompositions and Veech-dichotomy audits of translation surfaces", "veech-audit"};
  app.require_subcommand(1);
  RunConfig config;
  std::string bound = "20";

  auto add_audit_flags = [&](CLI::App* cmd) {
    cmd->add_option("--length-bound", bound, "Saddle connection length bound (rational)");
    cmd->add_option("--max-directions", config.max_directions, "Directions to scan at most")->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", config.jobs, "Worker threads")->envname("VEECH_AUDIT_JOBS")->check(CLI::PositiveNumber);
  };
  auto add_step_cap = [&](CLI::App* cmd) {
    cmd->add_option("--step-cap", config.step_cap, "Edge crossings per separatrix")->check(CLI::PositiveNumber);
  };

  CLI::App* validate = app.add_subcommand("validate", "Build every candidate of a manifest and report its stratum");
  validate->add_option("--manifest", config.manifest, "Manifest file")->required();

  CLI::App* audit = app.add_subcommand("audit", "Search every candidate of a manifest for a witness direction");
  audit->add_option("--manifest", config.manifest, "Manifest file")->required();
  audit->add_option("--out", config.out, "Report file (default: standard output)");
  audit->add_flag("--render", config.render, "Draw eliminated candidates next to the report");
  add_audit_flags(audit);
  add_step_cap(audit);

  CLI::App* scan = app.add_subcommand("scan", "Decompose one direction of a surface");
  scan->add_option("input", config.input, "Surface file, manifest, report or audit output")->required();
  scan->add_option("--direction", config.direction, "Direction as x,y")->required();
  scan->add_option("--index", config.index, "Entry of a manifest or audit output");
  add_step_cap(scan);

  CLI::App* render = app.add_subcommand("render", "Draw a surface as SVG");
  render->add_option("input", config.input, "Surface file, manifest, report or audit output")->required();
  render->add_option("--out", config.out, "SVG file (default: standard output)");
  render->add_option("--index", config.index, "Entry of a manifest or audit output");
  add_step_cap(render);

  try {
    app.parse(argc, argv);
    if (config.length_bound.set_str(bound, 10) != 0) throw CLI::ValidationError("--length-bound", "not a rational number");
    config.length_bound.canonicalize();
    if (sgn(config.length_bound) <= 0) throw CLI::ValidationError("--length-bound", "must be positive");
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    log << "error: " << e.what() << "\n";
    return kBadInput;
  }

  if (*validate) return cmd_validate(config, out, log);
  if (*audit) return cmd_audit(config, out, log);
  if (*scan) return cmd_scan(config, out, log);
  return cmd_render(config, out, log);
}

} // namespace prym::cli
