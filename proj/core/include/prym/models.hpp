#pragma once

// Candidate surfaces built from three-cylinder diagrams.
//
// A diagram lists, for every horizontal cylinder, the labels of the segments
// along its bottom and top boundaries (left to right). The segment labelled x
// on some top is glued to the segment labelled x on some bottom. Segment
// lengths are affine forms c0 + c1*w2 + c2*s in the free parameters.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prym/flow.hpp"
#include "prym/io.hpp"
#include "prym/qfield.hpp"
#include "prym/surface.hpp"

namespace prym {

using IntMatrix = std::vector<std::vector<long>>;

/// c0 + c1*w2 + c2*s.
struct LengthForm {
  std::array<Rational, 3> c;
  QuadElem eval(const QuadElem& w2, const QuadElem& s) const;
  friend bool operator==(const LengthForm&, const LengthForm&) = default;
};

/// c0 + c1*h2.
struct HeightForm {
  std::array<Rational, 2> c;
  QuadElem eval(const QuadElem& h2) const;
};

enum class TwistParam { t1, t2 };

struct DiagramCylinder {
  std::string name;
  std::vector<int> bottom; // labels, left to right
  std::vector<int> top;    // labels, left to right
  LengthForm width;
  HeightForm height;
  TwistParam twist = TwistParam::t1;
};

struct DiagramInvolution {
  std::vector<int> cylinders;  // image of each cylinder
  std::map<int, int> labels;   // image of each segment label
};

struct CylinderDiagram {
  std::string id;
  int model = 0; // 1..8 for the built-in candidate models, 0 otherwise
  std::vector<int> expected_orders;
  std::map<int, LengthForm> lengths;
  std::vector<DiagramCylinder> cylinders;
  std::optional<DiagramInvolution> involution;
  std::optional<int> slit_label;

  /// Polygon-level form of the involution: cylinder i is polygon i.
  std::optional<CellMap> cell_map() const;
};

/// Throws InvalidDiagram when the labels, widths or involution are inconsistent.
CylinderDiagram parse_diagram(const Json& j, const std::string& source);

/// Built-in diagrams: models 1..8 and the fixtures "torus", "h2-two-cylinder",
/// "incommensurable". Throws UnknownModel.
const CylinderDiagram& builtin_diagram(int model);
const CylinderDiagram& builtin_diagram(const std::string& name);
std::vector<std::string> builtin_diagram_names();

struct Table1Row {
  int index; // 1..5
  long radicand;
  IntMatrix matrix;
  QuadElem w2;
  QuadElem h2;
};

const std::vector<Table1Row>& table1_rows();

struct CandidateSpec {
  std::string model; // "1".."8" or a built-in diagram name
  long radicand = 2;
  QuadElem w2{QuadraticField(2)};
  QuadElem h2{QuadraticField(2)};
  QuadElem t1{QuadraticField(2)};
  QuadElem t2{QuadraticField(2)};
  QuadElem s{QuadraticField(2)};
  std::optional<IntMatrix> matrix;

  friend bool operator==(const CandidateSpec&, const CandidateSpec&) = default;
};

/// Diagram named by spec.model.
const CylinderDiagram& diagram_for(const CandidateSpec& spec);

/// Open interval of admissible slit values for a given w2, or nullopt when no
/// segment length depends on s. An empty interval has lo >= hi.
struct SlitRange {
  std::optional<QuadElem> lo;
  std::optional<QuadElem> hi;
};
std::optional<SlitRange> slit_range(const CylinderDiagram& d, const QuadElem& w2);

/// Builds the surface: one parallelogram per cylinder, polygon i for cylinder i.
/// Errors: SegmentOverflow (non-positive length, twist outside [0, width)),
/// WrongStratum, InvolutionFailure, FieldMismatch.
TranslationSurface build_from_diagram(const CylinderDiagram& d, const CandidateSpec& spec);
TranslationSurface build_candidate(const CandidateSpec& spec);

/// Geometric crossing counts between core curves: rows follow h.cylinders,
/// columns the cylinders of v in canonical (lexicographic column) order.
/// Errors: NotPeriodic, NotTransverse.
IntMatrix crossing_counts(const TranslationSurface& surface, const Decomposition& h, const Decomposition& v);

/// Crossing counts with cylinders grouped into orbits of the involution
/// (exchanged pairs first, then fixed cylinders, in order of appearance). Without an
/// involution this is crossing_counts.
IntMatrix intersection_matrix(const TranslationSurface& surface, const Decomposition& h, const Decomposition& v,
                              const std::optional<CellMap>& involution = std::nullopt);

/// Manifest I/O. load_manifest throws ParseError (with location),
/// UnknownModel, NonTable1Parameters.
std::vector<CandidateSpec> load_manifest(const std::string& text, const std::string& source = "manifest");
std::vector<CandidateSpec> manifest_from_json(const Json& j, const std::string& source = "manifest");
Json to_json(const CandidateSpec& spec);
std::string serialize_manifest(const std::vector<CandidateSpec>& specs);

struct EnumerationOptions {
  int twist_denominator_bound = 4;
  int slit_grid_bound = 4;
  int step_cap = 2000;  // per vertical separatrix during the search
  bool require_matrix = true;
  int jobs = 1;
};

/// Grid search over (t1, t2, s): t_i = (k/n)*w_i with 0 <= k < n <= twist
/// bound, s = lo + (k/m)*(hi - lo) with 0 < k < m <= slit bound inside the
/// admissible interval. Keeps specs that build, whose vertical direction is
/// periodic, and (if required) whose intersection matrix equals the row's.
/// Output is sorted by (t1, t2, s) and free of duplicates.
std::vector<CandidateSpec> enumerate_candidates(const CylinderDiagram& d, const Table1Row& row,
                                                const EnumerationOptions& options = {});

} // namespace prym
