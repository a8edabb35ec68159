#include "prym/veech.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <thread>

namespace prym {

std::optional<Witness> commensurability_witness(const std::vector<QuadElem>& moduli) {
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    if (sign(moduli[i]) <= 0) throw NonPositiveModulus("modulus " + std::to_string(i) + " is " + to_string(moduli[i]));
  }
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    for (std::size_t j = i + 1; j < moduli.size(); ++j) {
      QuadElem r = moduli[j] / moduli[i];
      if (!is_rational(r)) return Witness{static_cast<int>(i), static_cast<int>(j), std::move(r)};
    }
  }
  return std::nullopt;
}

Certificate make_certificate(const Decomposition& d, const Witness& w) {
  Certificate c{d.direction, {}, w};
  for (const Cylinder& cyl : d.cylinders) c.cylinders.push_back({cyl.circumference, cyl.height, cyl.modulus()});
  return c;
}

namespace {

bool cylinder_less(const CylinderData& u, const CylinderData& v) {
  if (auto o = compare(u.circumference, v.circumference); o != 0) return o < 0;
  return compare(u.height, v.height) < 0;
}

} // namespace

bool verify_certificate(const TranslationSurface& surface, const Certificate& cert, int step_cap) {
  try {
    const auto& cyls = cert.cylinders;
    const int n = static_cast<int>(cyls.size());
    const Witness& w = cert.witness;
    if (w.i < 0 || w.j < 0 || w.i >= n || w.j >= n || w.i == w.j) return false;
    for (const CylinderData& c : cyls) {
      if (sign(c.circumference) <= 0 || sign(c.height) <= 0) return false;
      if (!(c.modulus == c.height / c.circumference)) return false;
    }
    const QuadElem ratio = cyls[w.j].modulus / cyls[w.i].modulus;
    if (!(ratio == w.ratio) || is_rational(ratio)) return false;

    const Decomposition d = decompose(surface, cert.direction, step_cap);
    if (!d.periodic() || !(d.cylinder_area == d.surface_area)) return false;
    if (!(d.direction == cert.direction)) return false;
    std::vector<CylinderData> found;
    for (const Cylinder& c : d.cylinders) found.push_back({c.circumference, c.height, c.modulus()});
    std::vector<CylinderData> recorded = cyls;
    std::sort(found.begin(), found.end(), cylinder_less);
    std::sort(recorded.begin(), recorded.end(), cylinder_less);
    return found == recorded;
  } catch (const Error&) {
    return false;
  }
}

std::vector<Vec2> audit_directions(const TranslationSurface& surface, const AuditConfig& config,
                                   int* saddle_connection_count) {
  const QuadraticField f = surface.field();
  struct Entry {
    QuadElem length2;
    Vec2 line;
  };
  std::vector<Entry> entries;
  const auto scs = saddle_connections(surface, QuadElem(f, config.length_bound));
  if (saddle_connection_count) *saddle_connection_count = static_cast<int>(scs.size());
  for (const SaddleConnection& sc : scs) entries.push_back({norm2(sc.holonomy), canonical_line(sc.holonomy)});
  std::sort(entries.begin(), entries.end(), [](const Entry& u, const Entry& v) {
    if (auto o = compare(u.length2, v.length2); o != 0) return o < 0;
    return lex_compare(u.line, v.line) < 0;
  });

  std::vector<Vec2> out{Vec2(QuadElem(f, 1), QuadElem(f)), Vec2(QuadElem(f), QuadElem(f, 1))};
  std::vector<Vec2> seen = out;
  auto lex_less = [](const Vec2& u, const Vec2& v) { return lex_compare(u, v) < 0; };
  std::sort(seen.begin(), seen.end(), lex_less);
  for (const Entry& e : entries) {
    auto it = std::lower_bound(seen.begin(), seen.end(), e.line, lex_less);
    if (it != seen.end() && *it == e.line) continue;
    seen.insert(it, e.line);
    out.push_back(e.line);
  }
  if (static_cast<int>(out.size()) > config.max_directions) out.erase(out.begin() + std::max(config.max_directions, 0), out.end());
  return out;
}

namespace {

struct Scan {
  Decomposition decomposition;
  std::optional<Witness> witness;
};

Scan scan_direction(const TranslationSurface& surface, const Vec2& v, int step_cap) {
  Scan s{decompose(surface, v, step_cap), std::nullopt};
  if (s.decomposition.periodic()) s.witness = commensurability_witness(s.decomposition.moduli());
  return s;
}

} // namespace

AuditReport audit_candidate(const TranslationSurface& surface, const AuditConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  AuditReport report;
  report.config = config;
  AuditStats& st = report.stats;
  const std::vector<Vec2> dirs = audit_directions(surface, config, &st.saddle_connections);
  st.directions_available = static_cast<int>(dirs.size());

  const int jobs = std::max(config.jobs, 1);
  const std::size_t batch = jobs == 1 ? 1 : static_cast<std::size_t>(jobs) * 4;
  for (std::size_t begin = 0; begin < dirs.size() && !report.certificate; begin += batch) {
    const std::size_t end = std::min(dirs.size(), begin + batch);
    std::vector<std::optional<Scan>> results(end - begin);
    if (jobs == 1) {
      for (std::size_t k = begin; k < end; ++k) results[k - begin] = scan_direction(surface, dirs[k], config.step_cap);
    } else {
      std::atomic<std::size_t> next{begin};
      std::atomic<std::size_t> stop{end}; // one past the earliest witness so far
      std::vector<std::exception_ptr> errors(jobs);
      std::vector<std::thread> pool;
      for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&, t] {
          try {
            for (std::size_t k; (k = next++) < stop.load();) {
              auto& r = results[k - begin];
              r = scan_direction(surface, dirs[k], config.step_cap);
              if (!r->witness) continue;
              std::size_t cur = stop.load();
              while (k + 1 < cur && !stop.compare_exchange_weak(cur, k + 1)) {
              }
            }
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    // Sequential reduction: the first witness in scan order wins.
    for (auto& r : results) {
      if (!r) break;
      ++st.directions_scanned;
      st.steps_used += r->decomposition.steps_used;
      if (!r->decomposition.periodic()) {
        ++st.undetermined_count;
        continue;
      }
      ++st.periodic_count;
      if (r->witness) {
        report.certificate = make_certificate(r->decomposition, *r->witness);
        report.verdict = Verdict::eliminated;
        break;
      }
    }
  }
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

Json to_json(const Certificate& cert) {
  Json cyls = Json::array();
  for (const CylinderData& c : cert.cylinders) {
    cyls.push_back({{"circumference", to_json(c.circumference)}, {"height", to_json(c.height)},
                    {"modulus", to_json(c.modulus)}});
  }
  return {{"direction", to_json(cert.direction)},
          {"cylinders", cyls},
          {"witness", {{"i", cert.witness.i}, {"j", cert.witness.j}, {"ratio", to_json(cert.witness.ratio)}}}};
}

Certificate certificate_from_json(const Json& j, long radicand) {
  if (!j.is_object() || !j.contains("direction") || !j.contains("cylinders") || !j.contains("witness")) {
    throw ParseError("certificate: expected an object with direction, cylinders and witness");
  }
  const Json& w = j["witness"];
  if (!w.is_object() || !w.contains("i") || !w.contains("j") || !w.contains("ratio") ||
      !w["i"].is_number_integer() || !w["j"].is_number_integer()) {
    throw ParseError("certificate.witness: expected {\"i\": int, \"j\": int, \"ratio\": number}");
  }
  Certificate c{vec_from_json(j["direction"], radicand, "certificate.direction"), {},
                Witness{w["i"].get<int>(), w["j"].get<int>(), quad_from_json(w["ratio"], radicand, "certificate.witness.ratio")}};
  if (!j["cylinders"].is_array()) throw ParseError("certificate.cylinders: expected an array");
  int k = 0;
  for (const Json& cj : j["cylinders"]) {
    const std::string where = "certificate.cylinders[" + std::to_string(k++) + "]";
    if (!cj.is_object() || !cj.contains("circumference") || !cj.contains("height") || !cj.contains("modulus")) {
      throw ParseError(where + ": expected circumference, height and modulus");
    }
    c.cylinders.push_back({quad_from_json(cj["circumference"], radicand, where + ".circumference"),
                           quad_from_json(cj["height"], radicand, where + ".height"),
                           quad_from_json(cj["modulus"], radicand, where + ".modulus")});
  }
  return c;
}

Json to_json(const AuditConfig& config) {
  return {{"length_bound", config.length_bound.get_str()},
          {"step_cap", config.step_cap},
          {"max_directions", config.max_directions}};
}

Json to_json(const AuditReport& report) {
  const AuditStats& st = report.stats;
  return {{"candidate", report.candidate ? to_json(*report.candidate) : Json(nullptr)},
          {"verdict", report.verdict == Verdict::eliminated ? "eliminated" : "not_eliminated"},
          {"certificate", report.certificate ? to_json(*report.certificate) : Json(nullptr)},
          {"config", to_json(report.config)},
          {"stats",
           {{"saddle_connections", st.saddle_connections},
            {"directions_available", st.directions_available},
            {"directions_scanned", st.directions_scanned},
            {"periodic", st.periodic_count},
            {"undetermined", st.undetermined_count},
            {"steps_used", st.steps_used}}},
          {"disclaimer", kAuditDisclaimer}};
}

} // namespace prym
