#pragma once

// Elimination of candidate Veech surfaces.
//
// A completely periodic direction whose cylinders have two moduli with an
// irrational ratio shows that a surface is not a lattice surface. The audit
// scans directions of short saddle connections for such a witness and
// records it as a Certificate that can be rechecked from scratch.

#include <optional>
#include <string>
#include <vector>

#include "prym/flow.hpp"
#include "prym/io.hpp"
#include "prym/models.hpp"
#include "prym/qfield.hpp"
#include "prym/surface.hpp"

namespace prym {

struct Witness {
  int i = 0;
  int j = 0;
  QuadElem ratio; // modulus_j / modulus_i
};

/// First pair (i, j), i < j, in index order whose ratio is irrational.
/// Throws NonPositiveModulus.
std::optional<Witness> commensurability_witness(const std::vector<QuadElem>& moduli);

struct CylinderData {
  QuadElem circumference;
  QuadElem height;
  QuadElem modulus;
  friend bool operator==(const CylinderData&, const CylinderData&) = default;
};

struct Certificate {
  Vec2 direction; // canonical
  std::vector<CylinderData> cylinders;
  Witness witness;
};

Certificate make_certificate(const Decomposition& d, const Witness& w);

/// Recomputes the decomposition in cert.direction and checks that it is
/// periodic, fills the surface, carries the recorded cylinders (in any order)
/// and that the recorded witness ratio is the irrational ratio of the
/// recorded moduli.
bool verify_certificate(const TranslationSurface& surface, const Certificate& cert, int step_cap = kDefaultStepCap);

struct AuditConfig {
  Rational length_bound = 20;
  int step_cap = kDefaultStepCap;
  int max_directions = 10000;
  int jobs = 1;
};

struct AuditStats {
  int saddle_connections = 0; // found within the length bound
  int directions_available = 0;
  int directions_scanned = 0;
  int periodic_count = 0;
  int undetermined_count = 0;
  long steps_used = 0;
};

enum class Verdict { eliminated, not_eliminated };

struct AuditReport {
  std::optional<CandidateSpec> candidate;
  Verdict verdict = Verdict::not_eliminated;
  std::optional<Certificate> certificate;
  AuditConfig config;
  AuditStats stats;
  double wall_time = 0; // seconds; not serialized
};

inline const char* const kAuditDisclaimer =
    "not_eliminated only means no witness was found within the bounds; it is not a proof that the surface is Veech";

/// Horizontal, vertical, then saddle-connection directions of length at most
/// the bound, ordered by length and then lexicographically, one per line.
std::vector<Vec2> audit_directions(const TranslationSurface& surface, const AuditConfig& config,
                                   int* saddle_connection_count = nullptr);

/// Scans audit_directions in order and stops at the first witness. With
/// jobs > 1 directions are decomposed in parallel batches; the reported
/// witness and statistics are those of the sequential scan.
AuditReport audit_candidate(const TranslationSurface& surface, const AuditConfig& config = {});

Json to_json(const Certificate& cert);
Certificate certificate_from_json(const Json& j, long radicand);
Json to_json(const AuditConfig& config);
/// {"candidate", "verdict", "certificate", "config", "stats", "disclaimer"}.
Json to_json(const AuditReport& report);

} // namespace prym
