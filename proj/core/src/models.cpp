#include "prym/models.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "builtin_diagrams.hpp"

namespace prym {

// ---------------------------------------------------------------------------
// Forms and diagrams.

QuadElem LengthForm::eval(const QuadElem& w2, const QuadElem& s) const {
  return QuadElem(w2.field(), c[0]) + c[1] * w2 + c[2] * s;
}

QuadElem HeightForm::eval(const QuadElem& h2) const { return QuadElem(h2.field(), c[0]) + c[1] * h2; }

std::optional<CellMap> CylinderDiagram::cell_map() const {
  if (!involution) return std::nullopt;
  CellMap m;
  for (std::size_t i = 0; i < cylinders.size(); ++i) {
    m.target.push_back(involution->cylinders[i]);
    // Vertex 0 of the image polygon is the image of the top-right corner.
    m.shift.push_back(-static_cast<int>(cylinders[i].bottom.size()) - 1);
  }
  return m;
}

namespace {

[[noreturn]] void bad_diagram(const std::string& where, const std::string& what) {
  throw InvalidDiagram(where + ": " + what);
}

Rational rational_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) {
    try {
      Rational r(j.get<std::string>());
      r.canonicalize();
      return r;
    } catch (const std::invalid_argument&) {
    }
  }
  bad_diagram(where, "expected an integer or a \"p/q\" string");
}

template <std::size_t N> std::array<Rational, N> coefficients(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != N) bad_diagram(where, "expected " + std::to_string(N) + " coefficients");
  std::array<Rational, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = rational_from_json(j[i], where + "[" + std::to_string(i) + "]");
  return out;
}

std::vector<int> labels_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad_diagram(where, "expected a non-empty array of labels");
  std::vector<int> out;
  for (const auto& x : j) {
    if (!x.is_number_integer()) bad_diagram(where, "labels are integers");
    out.push_back(x.get<int>());
  }
  return out;
}

const Json& member(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) bad_diagram(where, std::string("missing \"") + key + "\"");
  return *it;
}

LengthForm sum_forms(const CylinderDiagram& d, const std::vector<int>& labels) {
  LengthForm total{};
  for (int x : labels) {
    for (int i = 0; i < 3; ++i) total.c[i] += d.lengths.at(x).c[i];
  }
  return total;
}

void validate(const CylinderDiagram& d) {
  const std::string& where = d.id;
  std::map<int, int> on_bottom, on_top;
  for (const auto& c : d.cylinders) {
    for (int x : c.bottom) ++on_bottom[x];
    for (int x : c.top) ++on_top[x];
  }
  for (const auto& [x, form] : d.lengths) {
    if (on_bottom[x] != 1 || on_top[x] != 1) {
      bad_diagram(where, "label " + std::to_string(x) + " must appear once on a bottom and once on a top");
    }
  }
  for (const auto* side : {&on_bottom, &on_top}) {
    for (const auto& [x, n] : *side) {
      if (!d.lengths.count(x)) bad_diagram(where, "label " + std::to_string(x) + " has no length");
    }
  }
  for (const auto& c : d.cylinders) {
    if (!(sum_forms(d, c.bottom) == c.width) || !(sum_forms(d, c.top) == c.width)) {
      bad_diagram(where, "segments of " + c.name + " do not add up to its width");
    }
  }
  if (d.involution) {
    const auto& inv = *d.involution;
    const int n = static_cast<int>(d.cylinders.size());
    if (static_cast<int>(inv.cylinders.size()) != n) bad_diagram(where, "involution must map every cylinder");
    for (int i = 0; i < n; ++i) {
      const int j = inv.cylinders[i];
      if (j < 0 || j >= n || inv.cylinders[j] != i) bad_diagram(where, "cylinder map is not an involution");
      // The half-turn sends the top of cylinder i onto the bottom of j.
      std::vector<int> image;
      for (auto it = d.cylinders[i].top.rbegin(); it != d.cylinders[i].top.rend(); ++it) {
        auto f = inv.labels.find(*it);
        if (f == inv.labels.end()) bad_diagram(where, "label map misses " + std::to_string(*it));
        image.push_back(f->second);
      }
      if (image != d.cylinders[j].bottom) {
        bad_diagram(where, "label map does not carry the top of " + d.cylinders[i].name + " to the bottom of " +
                               d.cylinders[j].name);
      }
      if (d.cylinders[i].twist != d.cylinders[j].twist) {
        bad_diagram(where, "exchanged cylinders must share a twist parameter");
      }
    }
    for (const auto& [x, y] : inv.labels) {
      if (!d.lengths.count(y) || !(d.lengths.at(x) == d.lengths.at(y))) {
        bad_diagram(where, "label map must preserve segment lengths");
      }
    }
  }
}

} // namespace

CylinderDiagram parse_diagram(const Json& j, const std::string& source) {
  if (!j.is_object()) bad_diagram(source, "expected an object");
  CylinderDiagram d;
  const Json& id = member(j, "id", source);
  if (!id.is_string()) bad_diagram(source, "id must be a string");
  d.id = id.get<std::string>();
  const std::string where = source + " (" + d.id + ")";
  if (auto it = j.find("model"); it != j.end()) d.model = it->get<int>();
  for (const auto& k : member(j, "expected_orders", where)) d.expected_orders.push_back(k.get<int>());
  std::sort(d.expected_orders.rbegin(), d.expected_orders.rend());

  for (const auto& [key, value] : member(j, "lengths", where).items()) {
    d.lengths[std::stoi(key)] = LengthForm{coefficients<3>(value, where + ".lengths." + key)};
  }
  for (const auto& c : member(j, "cylinders", where)) {
    DiagramCylinder cyl;
    cyl.name = member(c, "name", where).get<std::string>();
    const std::string cw = where + "." + cyl.name;
    cyl.bottom = labels_from_json(member(c, "bottom", cw), cw + ".bottom");
    cyl.top = labels_from_json(member(c, "top", cw), cw + ".top");
    cyl.width = LengthForm{coefficients<3>(member(c, "width", cw), cw + ".width")};
    cyl.height = HeightForm{coefficients<2>(member(c, "height", cw), cw + ".height")};
    const std::string twist = member(c, "twist", cw).get<std::string>();
    if (twist == "t1") {
      cyl.twist = TwistParam::t1;
    } else if (twist == "t2") {
      cyl.twist = TwistParam::t2;
    } else {
      bad_diagram(cw, "twist must be \"t1\" or \"t2\"");
    }
    d.cylinders.push_back(std::move(cyl));
  }
  if (d.cylinders.empty()) bad_diagram(where, "no cylinders");
  if (auto it = j.find("involution"); it != j.end()) {
    DiagramInvolution inv;
    for (const auto& c : member(*it, "cylinders", where)) inv.cylinders.push_back(c.get<int>());
    for (const auto& [key, value] : member(*it, "labels", where).items()) inv.labels[std::stoi(key)] = value.get<int>();
    d.involution = std::move(inv);
  }
  if (auto it = j.find("slit"); it != j.end()) d.slit_label = it->get<int>();
  validate(d);
  return d;
}

namespace {

struct Builtins {
  std::vector<CylinderDiagram> diagrams;
  std::map<std::string, std::size_t> by_id;
};

const Builtins& builtins() {
  static const Builtins b = [] {
    Builtins out;
    for (const auto& [name, text] : detail::builtin_diagram_sources()) {
      out.diagrams.push_back(parse_diagram(parse_json(text, name), name));
    }
    std::sort(out.diagrams.begin(), out.diagrams.end(), [](const auto& x, const auto& y) {
      if ((x.model > 0) != (y.model > 0)) return x.model > 0;
      if (x.model != y.model) return x.model < y.model;
      return x.id < y.id;
    });
    for (std::size_t i = 0; i < out.diagrams.size(); ++i) out.by_id[out.diagrams[i].id] = i;
    return out;
  }();
  return b;
}

} // namespace

const CylinderDiagram& builtin_diagram(int model) {
  if (model < 1 || model > 8) throw UnknownModel("model " + std::to_string(model) + " (expected 1..8)");
  return builtin_diagram("M" + std::to_string(model));
}

const CylinderDiagram& builtin_diagram(const std::string& name) {
  const auto& b = builtins();
  auto it = b.by_id.find(name);
  if (it == b.by_id.end()) throw UnknownModel("no diagram named \"" + name + "\"");
  return b.diagrams[it->second];
}

std::vector<std::string> builtin_diagram_names() {
  std::vector<std::string> out;
  for (const auto& d : builtins().diagrams) out.push_back(d.id);
  return out;
}

const std::vector<Table1Row>& table1_rows() {
  static const std::vector<Table1Row> rows = [] {
    auto q = [](long d, Rational a, Rational b) { return QuadElem(QuadraticField(d), a, b); };
    return std::vector<Table1Row>{
        {1, 2, {{72, 48}, {24, 18}}, q(2, 0, Rational(1, 2)), q(2, 0, 2)},
        {2, 3, {{72, 24}, {12, 6}}, q(3, Rational(-1, 2), Rational(1, 2)), q(3, -2, 2)},
        {3, 3, {{72, 24}, {48, 18}}, q(3, Rational(1, 2), Rational(1, 2)), q(3, 2, 2)},
        {4, 3, {{36, 12}, {30, 12}}, q(3, 0, 1), q(3, 0, Rational(2, 3))},
        {5, 33, {{6, 24}, {12, 54}}, q(33, Rational(3, 2), Rational(1, 2)), q(33, Rational(1, 2), Rational(1, 6))},
    };
  }();
  return rows;
}

const CylinderDiagram& diagram_for(const CandidateSpec& spec) {
  if (spec.model.size() == 1 && spec.model[0] >= '1' && spec.model[0] <= '8') return builtin_diagram(spec.model[0] - '0');
  return builtin_diagram(spec.model);
}

std::optional<SlitRange> slit_range(const CylinderDiagram& d, const QuadElem& w2) {
  SlitRange r;
  bool used = false, infeasible = false;
  const QuadElem zero(w2.field());
  for (const auto& [x, f] : d.lengths) {
    const int cs = sgn(f.c[2]);
    if (cs == 0) {
      if (sign(f.eval(w2, zero)) <= 0) infeasible = true;
      continue;
    }
    used = true;
    // c0 + c1 w2 + c2 s > 0  <=>  s > -(c0 + c1 w2)/c2 (c2 > 0), or s < ... (c2 < 0)
    QuadElem bound = -f.eval(w2, zero) * Rational(1 / f.c[2]);
    if (cs > 0) {
      if (!r.lo || sign(bound - *r.lo) > 0) r.lo = bound;
    } else {
      if (!r.hi || sign(bound - *r.hi) < 0) r.hi = bound;
    }
  }
  if (infeasible) return SlitRange{zero, zero};
  if (!used) return std::nullopt;
  return r;
}

// ---------------------------------------------------------------------------
// Construction.

TranslationSurface build_from_diagram(const CylinderDiagram& d, const CandidateSpec& spec) {
  const QuadraticField f(spec.radicand);
  for (const QuadElem* x : {&spec.w2, &spec.h2, &spec.t1, &spec.t2, &spec.s}) {
    if (x->radicand() != spec.radicand) throw FieldMismatch("candidate parameters must lie in Q(sqrt(" + std::to_string(spec.radicand) + "))");
  }
  std::map<int, QuadElem> len;
  for (const auto& [x, form] : d.lengths) {
    QuadElem l = form.eval(spec.w2, spec.s);
    if (sign(l) <= 0) {
      throw SegmentOverflow(d.id + ": segment " + std::to_string(x) + " has length " + to_string(l) +
                            " (slit or width out of range)");
    }
    len.emplace(x, l);
  }

  const int nc = static_cast<int>(d.cylinders.size());
  std::vector<PlanarPolygon> polys;
  std::map<int, EdgeRef> bottom_edge, top_edge;
  Gluing g;
  for (int ci = 0; ci < nc; ++ci) {
    const DiagramCylinder& c = d.cylinders[ci];
    const QuadElem w = c.width.eval(spec.w2, spec.s);
    const QuadElem h = c.height.eval(spec.h2);
    const QuadElem& t = c.twist == TwistParam::t1 ? spec.t1 : spec.t2;
    if (sign(h) <= 0) throw SegmentOverflow(d.id + ": " + c.name + " has non-positive height " + to_string(h));
    if (sign(t) < 0 || sign(t - w) >= 0) {
      throw SegmentOverflow(d.id + ": twist " + to_string(t) + " of " + c.name + " is outside [0, " + to_string(w) + ")");
    }
    std::vector<Vec2> vs;
    QuadElem x(f);
    vs.push_back(Vec2::zero(f));
    const int k = static_cast<int>(c.bottom.size());
    const int m = static_cast<int>(c.top.size());
    for (int i = 0; i < k; ++i) {
      bottom_edge[c.bottom[i]] = {ci, i};
      x += len.at(c.bottom[i]);
      vs.push_back({x, QuadElem(f)});
    }
    x = t + w;
    vs.push_back({x, h});
    for (int j = 0; j < m; ++j) {
      const int label = c.top[m - 1 - j];
      top_edge[label] = {ci, k + 1 + j};
      x -= len.at(label);
      if (j + 1 < m) vs.push_back({x, h});
    }
    // The last top point is (t, h); the left side closes the polygon.
    vs.push_back({t, h});
    polys.emplace_back(std::move(vs));
    g.push_back({{ci, k}, {ci, k + m + 1}});
  }
  for (const auto& [label, e] : bottom_edge) g.push_back({e, top_edge.at(label)});

  TranslationSurface surface(std::move(polys), g);
  if (surface.stratum().orders != d.expected_orders) {
    std::string got;
    for (int o : surface.stratum().orders) got += (got.empty() ? "" : ", ") + std::to_string(o);
    throw WrongStratum(d.id + ": built surface has zero orders {" + got + "}");
  }
  if (auto map = d.cell_map(); map && !check_involution(surface, *map)) {
    throw InvolutionFailure(d.id + ": the half-turn exchanging the outer cylinders is not an involution of the surface");
  }
  return surface;
}

TranslationSurface build_candidate(const CandidateSpec& spec) { return build_from_diagram(diagram_for(spec), spec); }

// ---------------------------------------------------------------------------
// Intersection counts.

namespace {

QuadElem reduce_mod(QuadElem x, const QuadElem& c) {
  const double q = std::floor(to_double(x) / to_double(c));
  if (std::isfinite(q) && q != 0) x -= Rational(static_cast<long>(q)) * c;
  while (sign(x) < 0) x += c;
  while (sign(x - c) >= 0) x -= c;
  return x;
}

struct BoundaryPoint {
  int sc;
  QuadElem offset;
};

// Flow transverse to a periodic direction, seen as a piecewise translation
// of the union of its saddle connections (each one is the bottom of the
// cylinder above it and the top of the cylinder below it).
class TransverseMap {
public:
  TransverseMap(const Decomposition& h, const QuadElem& slope) : h_(h) {
    const int n = static_cast<int>(h.saddle_connections.size());
    const QuadraticField f = h.direction.field();
    len_.assign(n, QuadElem(f));
    above_.assign(n, -1);
    below_.assign(n, -1);
    bottom_prefix_.assign(n, QuadElem(f));
    top_prefix_.assign(n, QuadElem(f));
    for (int i = 0; i < n; ++i) len_[i] = dot(h.saddle_connections[i].holonomy, h.direction);
    for (int c = 0; c < static_cast<int>(h.cylinders.size()); ++c) {
      const Cylinder& cyl = h.cylinders[c];
      QuadElem acc(f);
      for (int i : cyl.bottom) {
        above_[i] = c;
        bottom_prefix_[i] = acc;
        acc += len_[i];
      }
      acc = QuadElem(f);
      for (int i : cyl.top) {
        below_[i] = c;
        top_prefix_[i] = acc;
        acc += len_[i];
      }
      shift_.push_back(reduce_mod(cyl.twist + cyl.height * slope, cyl.circumference));
    }
  }

  int num_sc() const { return static_cast<int>(len_.size()); }
  const QuadElem& length(int sc) const { return len_[sc]; }
  int above(int sc) const { return above_[sc]; }
  int below(int sc) const { return below_[sc]; }

  BoundaryPoint forward(const BoundaryPoint& x) const {
    const int c = above_[x.sc];
    const Cylinder& cyl = h_.cylinders[c];
    QuadElem q = reduce_mod(bottom_prefix_[x.sc] + x.offset + shift_[c], cyl.circumference);
    return locate(cyl.top, top_prefix_, q);
  }

  BoundaryPoint backward(const BoundaryPoint& x) const {
    const int c = below_[x.sc];
    const Cylinder& cyl = h_.cylinders[c];
    QuadElem p = reduce_mod(top_prefix_[x.sc] + x.offset - shift_[c], cyl.circumference);
    return locate(cyl.bottom, bottom_prefix_, p);
  }

private:
  BoundaryPoint locate(const std::vector<int>& cycle, const std::vector<QuadElem>& prefix, const QuadElem& pos) const {
    int hit = cycle.front();
    for (int i : cycle) {
      if (sign(pos - prefix[i]) >= 0) hit = i;
    }
    return {hit, pos - prefix[hit]};
  }

  const Decomposition& h_;
  std::vector<QuadElem> len_;
  std::vector<int> above_, below_;
  std::vector<QuadElem> bottom_prefix_, top_prefix_;
  std::vector<QuadElem> shift_;
};

struct TransverseCylinders {
  // Intervals of the saddle connections, cut at every point of a transverse
  // separatrix; the map permutes them and its cycles are the cylinders.
  std::vector<std::vector<QuadElem>> cuts; // per sc, sorted, starting at 0
  std::vector<std::vector<int>> interval_id;
  std::vector<std::pair<int, int>> interval; // id -> (sc, index)
  std::vector<int> cycle_of;                 // id -> cycle
  int num_cycles = 0;

  int find(const BoundaryPoint& p) const {
    const auto& c = cuts[p.sc];
    auto it = std::upper_bound(c.begin(), c.end(), p.offset,
                               [](const QuadElem& x, const QuadElem& y) { return sign(x - y) < 0; });
    return interval_id[p.sc][std::max<std::ptrdiff_t>(it - c.begin() - 1, 0)];
  }

  QuadElem midpoint(const TransverseMap& t, int id) const {
    const auto [sc, j] = interval[id];
    const QuadElem& lo = cuts[sc][j];
    const QuadElem hi = j + 1 < static_cast<int>(cuts[sc].size()) ? cuts[sc][j + 1] : t.length(sc);
    return (lo + hi) * Rational(1, 2);
  }
};

TransverseCylinders transverse_cylinders(const TransverseMap& t, int step_cap) {
  const int n = t.num_sc();
  const QuadraticField f = t.length(0).field();
  TransverseCylinders out;
  out.cuts.assign(n, {QuadElem(f)});
  auto follow = [&](bool fwd, int sc) {
    BoundaryPoint x{sc, QuadElem(f)};
    for (int step = 0;; ++step) {
      if (step > step_cap) throw NotPeriodic("transverse separatrix does not close within the step cap");
      x = fwd ? t.forward(x) : t.backward(x);
      if (x.offset.is_zero()) return;
      out.cuts[x.sc].push_back(x.offset);
    }
  };
  for (int i = 0; i < n; ++i) {
    follow(true, i);
    follow(false, i);
  }
  for (auto& c : out.cuts) {
    std::sort(c.begin(), c.end(), [](const QuadElem& a, const QuadElem& b) { return sign(a - b) < 0; });
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  out.interval_id.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < static_cast<int>(out.cuts[i].size()); ++j) {
      out.interval_id[i].push_back(static_cast<int>(out.interval.size()));
      out.interval.emplace_back(i, j);
    }
  }
  const int m = static_cast<int>(out.interval.size());
  std::vector<int> next(m);
  for (int id = 0; id < m; ++id) next[id] = out.find(t.forward({out.interval[id].first, out.midpoint(t, id)}));
  out.cycle_of.assign(m, -1);
  for (int id = 0; id < m; ++id) {
    if (out.cycle_of[id] >= 0) continue;
    for (int k = id; out.cycle_of[k] < 0; k = next[k]) out.cycle_of[k] = out.num_cycles;
    ++out.num_cycles;
  }
  return out;
}

struct Crossings {
  std::unique_ptr<TransverseMap> map;
  IntMatrix counts; // rows: h cylinders; columns: transverse cycles
  TransverseCylinders cyl;
};

Crossings crossings(const Decomposition& h, const Decomposition& v) {
  if (!h.periodic() || !v.periodic()) throw NotPeriodic("both directions must be completely periodic");
  if (!(h.direction.field() == v.direction.field())) throw FieldMismatch("directions over different fields");
  Vec2 w = Mat2::rotation_scaling(h.direction)(v.direction);
  if (w.y.is_zero()) throw NotTransverse("directions are parallel");
  if (sign(w.y) < 0) w = -w;
  Crossings out;
  out.map = std::make_unique<TransverseMap>(h, w.x / w.y);
  out.cyl = transverse_cylinders(*out.map, 1 << 20);
  if (out.cyl.num_cycles != static_cast<int>(v.cylinders.size())) {
    throw std::logic_error("transverse first-return map disagrees with the decomposition on the cylinder count");
  }
  out.counts.assign(h.cylinders.size(), std::vector<long>(out.cyl.num_cycles, 0));
  for (std::size_t id = 0; id < out.cyl.interval.size(); ++id) {
    const int sc = out.cyl.interval[id].first;
    ++out.counts[out.map->above(sc)][out.cyl.cycle_of[id]];
  }
  return out;
}

IntMatrix canonical_columns(const IntMatrix& m) {
  if (m.empty()) return m;
  const std::size_t cols = m.front().size();
  std::vector<std::vector<long>> columns(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    for (const auto& row : m) columns[j].push_back(row[j]);
  }
  std::sort(columns.begin(), columns.end());
  IntMatrix out(m.size(), std::vector<long>(cols));
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < m.size(); ++i) out[i][j] = columns[j][i];
  }
  return out;
}

// Orbits of an involution on {0..n-1}: pairs first, then fixed points.
std::vector<std::vector<int>> orbit_groups(const std::vector<int>& inv) {
  std::vector<std::vector<int>> pairs, fixed;
  for (int i = 0; i < static_cast<int>(inv.size()); ++i) {
    if (inv[inv[i]] != i) throw InvolutionFailure("induced map on cylinders is not an involution");
    if (inv[i] == i) {
      fixed.push_back({i});
    } else if (i < inv[i]) {
      pairs.push_back({i, inv[i]});
    }
  }
  pairs.insert(pairs.end(), fixed.begin(), fixed.end());
  return pairs;
}

} // namespace

IntMatrix crossing_counts(const TranslationSurface&, const Decomposition& h, const Decomposition& v) {
  return canonical_columns(crossings(h, v).counts);
}

IntMatrix intersection_matrix(const TranslationSurface& surface, const Decomposition& h, const Decomposition& v,
                              const std::optional<CellMap>& involution) {
  if (!involution) return crossing_counts(surface, h, v);
  const Crossings x = crossings(h, v);
  const TransverseMap* map = x.map.get();

  // The involution reverses every saddle connection of h: the one arriving
  // at corner a comes back out of the image corner of a.
  const int n = map->num_sc();
  std::map<CornerRef, int> starting_at;
  for (int i = 0; i < n; ++i) starting_at[h.saddle_connections[i].start_corner] = i;
  const Vec2 back = -h.direction;
  std::vector<int> sc_image(n);
  for (int i = 0; i < n; ++i) {
    CornerRef a = h.saddle_connections[i].end_corner;
    if (!sector_contains(surface, a, back)) a = surface.next_ccw(a);
    const int q = involution->target.at(a.polygon);
    const CornerRef image{q, surface.polygon(q).wrap(a.edge + involution->shift.at(a.polygon))};
    auto it = starting_at.find(image);
    if (it == starting_at.end()) throw InvolutionFailure("involution does not map saddle connections to saddle connections");
    sc_image[i] = it->second;
  }

  std::vector<int> h_image(h.cylinders.size());
  for (std::size_t c = 0; c < h.cylinders.size(); ++c) h_image[c] = map->below(sc_image[h.cylinders[c].bottom.front()]);
  std::vector<int> v_image(x.cyl.num_cycles, -1);
  for (std::size_t id = 0; id < x.cyl.interval.size(); ++id) {
    const int sc = x.cyl.interval[id].first;
    const QuadElem mid = x.cyl.midpoint(*map, static_cast<int>(id));
    const int img = x.cyl.find({sc_image[sc], map->length(sc) - mid});
    v_image[x.cyl.cycle_of[id]] = x.cyl.cycle_of[img];
  }

  const auto rows = orbit_groups(h_image);
  const auto cols = orbit_groups(v_image);
  IntMatrix out(rows.size(), std::vector<long>(cols.size(), 0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      for (int r : rows[i]) {
        for (int c : cols[j]) out[i][j] += x.counts[r][c];
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifests.

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) { throw ParseError(where + ": " + what); }

bool is_model_number(const std::string& m) { return m.size() == 1 && m[0] >= '1' && m[0] <= '8'; }

CandidateSpec spec_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) parse_fail(where, "expected an object");
  auto get = [&](const char* key) -> const Json& {
    auto it = j.find(key);
    if (it == j.end()) parse_fail(where, std::string("missing \"") + key + "\"");
    return *it;
  };
  CandidateSpec s;
  const Json& model = get("model");
  if (model.is_number_integer()) {
    const long m = model.get<long>();
    if (m < 1 || m > 8) throw UnknownModel(where + ": model " + std::to_string(m) + " (expected 1..8)");
    s.model = std::to_string(m);
  } else if (model.is_string()) {
    s.model = model.get<std::string>();
    builtin_diagram(s.model);
    if (is_model_number(s.model)) parse_fail(where + ".model", "numbered models are written as integers");
  } else {
    parse_fail(where + ".model", "expected an integer or a string");
  }
  const Json& d = get("D");
  if (!d.is_number_integer()) parse_fail(where + ".D", "expected an integer");
  s.radicand = d.get<long>();
  QuadraticField field(s.radicand);
  s.w2 = quad_from_json(get("w2"), s.radicand, where + ".w2");
  s.h2 = quad_from_json(get("h2"), s.radicand, where + ".h2");
  s.t1 = quad_from_json(get("t1"), s.radicand, where + ".t1");
  s.t2 = quad_from_json(get("t2"), s.radicand, where + ".t2");
  s.s = quad_from_json(get("s"), s.radicand, where + ".s");
  if (auto it = j.find("matrix"); it != j.end()) {
    IntMatrix m;
    if (!it->is_array()) parse_fail(where + ".matrix", "expected an array of rows");
    for (const auto& row : *it) {
      if (!row.is_array()) parse_fail(where + ".matrix", "expected an array of rows");
      std::vector<long> r;
      for (const auto& x : row) {
        if (!x.is_number_integer()) parse_fail(where + ".matrix", "entries are integers");
        r.push_back(x.get<long>());
      }
      m.push_back(std::move(r));
    }
    s.matrix = std::move(m);
  }

  if (is_model_number(s.model)) {
    const Table1Row* row = nullptr;
    for (const auto& r : table1_rows()) {
      if (r.radicand == s.radicand && r.w2 == s.w2 && r.h2 == s.h2) row = &r;
    }
    if (!row) {
      throw NonTable1Parameters(where + ": (D, w2, h2) = (" + std::to_string(s.radicand) + ", " + to_string(s.w2) +
                                ", " + to_string(s.h2) + ") is not a row of the admissible table");
    }
    if (s.matrix && *s.matrix != row->matrix) {
      throw NonTable1Parameters(where + ": matrix does not match table row " + std::to_string(row->index));
    }
  }
  return s;
}

} // namespace

std::vector<CandidateSpec> manifest_from_json(const Json& j, const std::string& source) {
  if (!j.is_array()) parse_fail(source, "expected an array of candidates");
  std::vector<CandidateSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(spec_from_json(j[i], source + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<CandidateSpec> load_manifest(const std::string& text, const std::string& source) {
  return manifest_from_json(parse_json(text, source), source);
}

Json to_json(const CandidateSpec& spec) {
  Json j;
  if (is_model_number(spec.model)) {
    j["model"] = spec.model[0] - '0';
  } else {
    j["model"] = spec.model;
  }
  j["D"] = spec.radicand;
  j["w2"] = to_json(spec.w2);
  j["h2"] = to_json(spec.h2);
  j["t1"] = to_json(spec.t1);
  j["t2"] = to_json(spec.t2);
  j["s"] = to_json(spec.s);
  if (spec.matrix) j["matrix"] = *spec.matrix;
  return j;
}

std::string serialize_manifest(const std::vector<CandidateSpec>& specs) {
  Json j = Json::array();
  for (const auto& s : specs) j.push_back(to_json(s));
  return pretty(j) + "\n";
}

// ---------------------------------------------------------------------------
// Enumeration.

namespace {

std::vector<Rational> grid_fractions(int bound, bool include_zero) {
  std::set<Rational> fr;
  for (int n = 1; n <= bound; ++n) {
    for (int k = include_zero ? 0 : 1; k < n; ++k) fr.insert(Rational(k, n));
  }
  return {fr.begin(), fr.end()};
}

// Floating-point screen: do all upward separatrices of the diagram's vertical
// flow come back to a cone point within the cap? Exact checks follow.
class VerticalScreen {
public:
  VerticalScreen(const CylinderDiagram& d, const QuadElem& w2, const QuadElem& h2, const QuadElem& slit) {
    const int n = d.lengths.empty() ? 0 : d.lengths.rbegin()->first + 1;
    len_.assign(n, 0);
    bottom_prefix_.assign(n, 0);
    top_prefix_.assign(n, 0);
    above_.assign(n, -1);
    for (const auto& [x, f] : d.lengths) {
      len_[x] = to_double(f.eval(w2, slit));
      labels_.push_back(x);
    }
    for (const auto& c : d.cylinders) {
      Cyl cyl;
      cyl.width = to_double(c.width.eval(w2, slit));
      cyl.height = to_double(c.height.eval(h2));
      cyl.uses_t1 = c.twist == TwistParam::t1;
      double acc = 0;
      for (int x : c.bottom) {
        above_[x] = static_cast<int>(cyls_.size());
        bottom_prefix_[x] = acc;
        acc += len_[x];
      }
      acc = 0;
      for (int x : c.top) {
        top_prefix_[x] = acc;
        acc += len_[x];
      }
      cyl.top = c.top;
      cyls_.push_back(std::move(cyl));
    }
  }

  void set_twists(double t1, double t2) {
    // In the polygon the top starts t to the right of the bottom.
    for (Cyl& c : cyls_) c.shift = -(c.uses_t1 ? t1 : t2);
  }

  // On success `length` is the total length of the upward vertical saddle
  // connections, which is also the sum of the vertical circumferences.
  bool periodic(int cap, double* length = nullptr) const {
    double total = 0;
    for (int x : labels_) {
      int sc = x;
      double o = 0;
      bool closed = false;
      for (int step = 0; step < cap && !closed; ++step) {
        const Cyl& c = cyls_[above_[sc]];
        total += c.height;
        double q = bottom_prefix_[sc] + o + c.shift;
        while (q < 0) q += c.width;
        while (q >= c.width) q -= c.width;
        int hit = c.top.front();
        for (int y : c.top) {
          if (q >= top_prefix_[y] - kTol) hit = y;
        }
        o = q - top_prefix_[hit];
        sc = hit;
        if (std::abs(o) < kTol || std::abs(o - len_[sc]) < kTol || std::abs(q - c.width) < kTol) closed = true;
      }
      if (!closed) return false;
    }
    if (length) *length = total;
    return true;
  }

private:
  static constexpr double kTol = 1e-9;
  struct Cyl {
    double width = 0;
    double height = 0;
    double shift = 0;
    bool uses_t1 = true;
    std::vector<int> top;
  };
  std::vector<int> labels_;
  std::vector<double> len_, bottom_prefix_, top_prefix_;
  std::vector<int> above_;
  std::vector<Cyl> cyls_;
};

// Possible values of the sum of vertical circumferences for a surface whose
// grouped intersection matrix is `m`: row g contributes its entry sum times
// the height of the horizontal orbit it stands for. Rows list exchanged pairs
// before fixed cylinders, so only orbits of the same size can be swapped.
std::vector<double> circumference_totals(const CylinderDiagram& d, const Table1Row& row) {
  std::vector<int> inv(d.cylinders.size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = d.involution ? d.involution->cylinders[i] : static_cast<int>(i);
  const auto groups = orbit_groups(inv);
  if (groups.size() != row.matrix.size()) return {};
  std::vector<double> height, sums;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    height.push_back(to_double(d.cylinders[groups[g].front()].height.eval(row.h2)));
    long sum = 0;
    for (long x : row.matrix[g]) sum += x;
    sums.push_back(static_cast<double>(sum));
  }
  std::vector<int> perm(groups.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> out;
  do {
    bool sizes_match = true;
    double total = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      sizes_match = sizes_match && groups[g].size() == groups[perm[g]].size();
      total += sums[g] * height[perm[g]];
    }
    if (sizes_match) out.push_back(total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

bool matches_any(double x, const std::vector<double>& targets) {
  for (double t : targets) {
    if (std::abs(x - t) <= 1e-7 * std::max(1.0, std::abs(t))) return true;
  }
  return false;
}

std::optional<CandidateSpec> check_candidate(const CylinderDiagram& d, const Table1Row& row, CandidateSpec spec,
                                             const EnumerationOptions& opt) {
  try {
    const TranslationSurface s = build_from_diagram(d, spec);
    const QuadraticField f(row.radicand);
    const Vec2 north{QuadElem(f), QuadElem(f, 1)};
    const Vec2 east{QuadElem(f, 1), QuadElem(f)};
    Decomposition v = decompose(s, north, opt.step_cap);
    if (!v.periodic()) return std::nullopt;
    Decomposition h = decompose(s, east, opt.step_cap);
    if (!h.periodic()) return std::nullopt;
    IntMatrix m = intersection_matrix(s, h, v, d.cell_map());
    if (opt.require_matrix && m != row.matrix) return std::nullopt;
    spec.matrix = row.matrix;
    if (!opt.require_matrix) spec.matrix.reset();
    return spec;
  } catch (const Error&) {
    return std::nullopt;
  }
}

} // namespace

std::vector<CandidateSpec> enumerate_candidates(const CylinderDiagram& d, const Table1Row& row,
                                                const EnumerationOptions& opt) {
  if (opt.twist_denominator_bound < 1 || opt.slit_grid_bound < 1) return {};
  if (d.model == 0 || d.expected_orders != std::vector<int>{2, 2}) return {};
  const QuadraticField f(row.radicand);
  const auto range = slit_range(d, row.w2);
  std::vector<QuadElem> slits;
  if (!range) {
    slits.emplace_back(f);
  } else {
    if (!range->lo || !range->hi || sign(*range->hi - *range->lo) <= 0) return {};
    for (const Rational& r : grid_fractions(opt.slit_grid_bound, false)) slits.push_back(*range->lo + r * (*range->hi - *range->lo));
  }
  const std::vector<Rational> twists = grid_fractions(opt.twist_denominator_bound, true);

  // One bucket per t1 value keeps the output order independent of scheduling.
  std::vector<std::vector<CandidateSpec>> buckets(twists.size());
  std::vector<VerticalScreen> base_screens;
  for (const QuadElem& s : slits) base_screens.emplace_back(d, row.w2, row.h2, s);
  const std::vector<double> totals = circumference_totals(d, row);
  if (opt.require_matrix && totals.empty()) return {};
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::vector<VerticalScreen> screens = base_screens;
    for (std::size_t i; (i = next++) < twists.size();) {
      for (std::size_t k = 0; k < slits.size(); ++k) {
        VerticalScreen& screen = screens[k];
        const QuadElem& s = slits[k];
        for (const Rational& r2 : twists) {
          screen.set_twists(twists[i].get_d(), to_double(r2 * row.w2));
          double length = 0;
          if (!screen.periodic(opt.step_cap, &length)) continue;
          if (opt.require_matrix && !matches_any(length, totals)) continue;
          CandidateSpec spec;
          spec.model = std::to_string(d.model);
          spec.radicand = row.radicand;
          spec.w2 = row.w2;
          spec.h2 = row.h2;
          spec.t1 = QuadElem(f, twists[i]);
          spec.t2 = r2 * row.w2;
          spec.s = s;
          if (auto ok = check_candidate(d, row, std::move(spec), opt)) buckets[i].push_back(std::move(*ok));
        }
      }
      std::sort(buckets[i].begin(), buckets[i].end(), [](const CandidateSpec& a, const CandidateSpec& b) {
        if (auto o = compare(a.t2, b.t2); o != 0) return o < 0;
        return compare(a.s, b.s) < 0;
      });
    }
  };
  const int jobs = std::max(1, opt.jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<CandidateSpec> out;
  for (auto& b : buckets) {
    for (auto& s : b) out.push_back(std::move(s));
  }
  return out;
}

} // namespace prym
