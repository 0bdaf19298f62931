#pragma once
// Read-only inference over a store: temporal hierarchy closure, succession
// chains, time-scoped membership, mobility and institutional timelines.

#include <optional>
#include <string>
#include <vector>

#include "etd/model.hpp"
#include "etd/store.hpp"

namespace etd {

enum class Role { Student, Professor, Any };

std::string_view roleName(Role r);

struct MobilityEvent {
  Iri person;
  Iri fromInstitution;
  Iri toInstitution;
  Role fromRole;
  Role toRole;
  TimePoint departure;
  TimePoint arrival;
  int gapYears;  // arrival year - departure year

  friend bool operator==(const MobilityEvent&, const MobilityEvent&) = default;
};

// Two stays at different institutions that overlap in time; no move is
// derived between them.
struct AffiliationOverlap {
  Iri person;
  Iri firstInstitution;
  Iri secondInstitution;
  TimePoint secondStart;
};

struct MobilityAnalysis {
  std::vector<MobilityEvent> events;
  std::vector<AffiliationOverlap> overlaps;
};

enum class StructureEventKind {
  Established,
  SubdivisionAdded,
  SubdivisionRemoved,
  Renamed,
  ChangedTo,
};

std::string_view structureEventKindName(StructureEventKind k);

struct StructureEvent {
  Iri body;
  StructureEventKind kind;
  TimePoint when;
  std::optional<Iri> counterpart;
  std::string detail;  // new label for Renamed
};

// Bodies reachable upward through hasSubdivision edges valid at t, nearest
// first (ties by Iri). Throws NotABody or HierarchyCycle.
std::vector<Iri> ancestorsAt(const Store& store, const Iri& body,
                             const TimePoint& t);

// Bodies reachable downward through hasSubdivision edges valid at t, sorted.
std::vector<Iri> subdivisionsAt(const Store& store, const Iri& body,
                                const TimePoint& t);

// The root of the hierarchy above `body` at t, or `body` itself.
Iri topInstitutionAt(const Store& store, const Iri& body, const TimePoint& t);

// [body, successor, successor's successor, ...] through changedTo.
// Throws NotABody, SequenceCycle or AmbiguousSuccession.
std::vector<Iri> successorChain(const Store& store, const Iri& body);

// Persons affiliated with `body` at t in the given role, optionally widened to
// the subdivision subtree at t and to the succession chain (both directions).
std::vector<Iri> membersAt(const Store& store, const Iri& body,
                           const TimePoint& t, Role role,
                           bool includeSubdivisions, bool followSuccessors);

// Moves between top-level institutions, sorted by departure. Throws
// NotAPerson.
std::vector<MobilityEvent> deriveMobility(const Store& store,
                                          const Iri& person);
MobilityAnalysis analyzeMobility(const Store& store, const Iri& person);

// Chronological events across the university's subtree and the bodies its
// members changed into. Throws NotABody.
std::vector<StructureEvent> structureTimeline(const Store& store,
                                              const Iri& university);

}  // namespace etd
