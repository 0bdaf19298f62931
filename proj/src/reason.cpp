#include "etd/reason.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace etd {

std::string_view roleName(Role r) {
  switch (r) {
    case Role::Student: return "student";
    case Role::Professor: return "professor";
    case Role::Any: return "any";
  }
  return "";
}

std::string_view structureEventKindName(StructureEventKind k) {
  switch (k) {
    case StructureEventKind::Established: return "Established";
    case StructureEventKind::SubdivisionAdded: return "SubdivisionAdded";
    case StructureEventKind::SubdivisionRemoved: return "SubdivisionRemoved";
    case StructureEventKind::Renamed: return "Renamed";
    case StructureEventKind::ChangedTo: return "ChangedTo";
  }
  return "";
}

namespace {

void requireKind(const Store& store, const Iri& iri, EntityKind kind,
                 ErrorCode code) {
  if (store.kindOf(iri) != kind) {
    throw Error(code, "<" + iri.str() + "> is not a " +
                          std::string(entityKindName(kind)));
  }
}

std::vector<Iri> parentsAt(const Store& store, const Iri& body,
                           const TimePoint& t) {
  std::vector<Iri> out;
  for (const auto& m : store.matchPattern({std::nullopt,
                                           store.vocab().ids().hasSubdivision,
                                           Term{body}, TimeConstraint::at(t),
                                           Inference::None})) {
    out.push_back(m.triple.subject);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Iri> childrenAt(const Store& store, const Iri& body,
                            const std::optional<TimePoint>& t) {
  std::vector<Iri> out;
  Pattern p{body, store.vocab().ids().hasSubdivision, std::nullopt,
            std::nullopt, Inference::None};
  if (t) p.time = TimeConstraint::at(*t);
  for (const auto& m : store.matchPattern(p)) {
    out.push_back(std::get<Iri>(m.triple.object));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// DFS over parent edges; reports the first cycle found as a path.
void detectHierarchyCycle(const Store& store, const Iri& start,
                          const TimePoint& t) {
  enum class Color { Grey, Black };
  std::map<Iri, Color> color;
  std::vector<Iri> stack;

  const auto visit = [&](auto&& self, const Iri& node) -> void {
    color[node] = Color::Grey;
    stack.push_back(node);
    for (const auto& parent : parentsAt(store, node, t)) {
      const auto it = color.find(parent);
      if (it == color.end()) {
        self(self, parent);
      } else if (it->second == Color::Grey) {
        std::string cycle;
        const auto from = std::find(stack.begin(), stack.end(), parent);
        for (auto n = from; n != stack.end(); ++n) cycle += "<" + n->str() + "> -> ";
        cycle += "<" + parent.str() + ">";
        throw Error(ErrorCode::HierarchyCycle,
                    "subdivision cycle at " + t.toString() + ": " + cycle);
      }
    }
    stack.pop_back();
    color[node] = Color::Black;
  };
  visit(visit, start);
}

}  // namespace

std::vector<Iri> ancestorsAt(const Store& store, const Iri& body,
                             const TimePoint& t) {
  requireKind(store, body, EntityKind::CorporateBody, ErrorCode::NotABody);
  detectHierarchyCycle(store, body, t);

  std::map<Iri, std::size_t> distance{{body, 0}};
  std::deque<Iri> queue{body};
  while (!queue.empty()) {
    const auto node = queue.front();
    queue.pop_front();
    for (const auto& parent : parentsAt(store, node, t)) {
      if (distance.emplace(parent, distance[node] + 1).second) {
        queue.push_back(parent);
      }
    }
  }
  std::vector<std::pair<std::size_t, Iri>> ordered;
  for (const auto& [iri, d] : distance) {
    if (d != 0) ordered.emplace_back(d, iri);
  }
  std::sort(ordered.begin(), ordered.end());
  std::vector<Iri> out;
  for (auto& [_, iri] : ordered) out.push_back(iri);
  return out;
}

std::vector<Iri> subdivisionsAt(const Store& store, const Iri& body,
                                const TimePoint& t) {
  std::set<Iri> seen;
  std::deque<Iri> queue{body};
  while (!queue.empty()) {
    const auto node = queue.front();
    queue.pop_front();
    for (const auto& child : childrenAt(store, node, t)) {
      if (child != body && seen.insert(child).second) queue.push_back(child);
    }
  }
  return {seen.begin(), seen.end()};
}

Iri topInstitutionAt(const Store& store, const Iri& body, const TimePoint& t) {
  const auto ancestors = ancestorsAt(store, body, t);
  return ancestors.empty() ? body : ancestors.back();
}

std::vector<Iri> successorChain(const Store& store, const Iri& body) {
  requireKind(store, body, EntityKind::CorporateBody, ErrorCode::NotABody);
  const auto& changedTo = store.vocab().ids().changedTo;
  std::vector<Iri> chain{body};
  std::set<Iri> visited{body};
  Iri current = body;
  while (true) {
    std::set<Iri> next;
    for (const auto& m : store.matchPattern(
             {current, changedTo, std::nullopt, std::nullopt, Inference::None})) {
      next.insert(std::get<Iri>(m.triple.object));
    }
    if (next.empty()) break;
    if (next.size() > 1) {
      throw Error(ErrorCode::AmbiguousSuccession,
                  "<" + current.str() + "> changed into " +
                      std::to_string(next.size()) + " bodies");
    }
    const auto& successor = *next.begin();
    if (!visited.insert(successor).second) {
      throw Error(ErrorCode::SequenceCycle,
                  "succession returns to <" + successor.str() + ">");
    }
    chain.push_back(successor);
    current = successor;
  }
  return chain;
}

namespace {

std::vector<Iri> predecessorsOf(const Store& store, const Iri& body) {
  const auto& changedTo = store.vocab().ids().changedTo;
  std::set<Iri> seen;
  std::deque<Iri> queue{body};
  while (!queue.empty()) {
    const auto node = queue.front();
    queue.pop_front();
    for (const auto& m : store.matchPattern(
             {std::nullopt, changedTo, Term{node}, std::nullopt, Inference::None})) {
      if (m.triple.subject != body && seen.insert(m.triple.subject).second) {
        queue.push_back(m.triple.subject);
      }
    }
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

std::vector<Iri> membersAt(const Store& store, const Iri& body,
                           const TimePoint& t, Role role,
                           bool includeSubdivisions, bool followSuccessors) {
  requireKind(store, body, EntityKind::CorporateBody, ErrorCode::NotABody);
  std::set<Iri> targets{body};
  if (followSuccessors) {
    for (const auto& b : successorChain(store, body)) targets.insert(b);
    for (const auto& b : predecessorsOf(store, body)) targets.insert(b);
  }
  if (includeSubdivisions) {
    std::set<Iri> widened = targets;
    for (const auto& b : targets) {
      for (const auto& sub : subdivisionsAt(store, b, t)) widened.insert(sub);
    }
    targets = std::move(widened);
  }

  const auto& ids = store.vocab().ids();
  std::vector<Iri> properties;
  if (role != Role::Professor) properties.push_back(ids.isStudentOf);
  if (role != Role::Student) properties.push_back(ids.isProfessorAt);

  std::set<Iri> members;
  for (const auto& target : targets) {
    for (const auto& property : properties) {
      for (const auto& m : store.matchPattern({std::nullopt, property,
                                               Term{target},
                                               TimeConstraint::at(t),
                                               Inference::None})) {
        members.insert(m.triple.subject);
      }
    }
  }
  return {members.begin(), members.end()};
}

// ---------------------------------------------------------------------------
// Mobility

namespace {

struct Affiliation {
  Iri body;
  Iri institution;
  Role role;
  TimePoint start;
  std::optional<TimePoint> end;  // absent: open
};

bool laterEnd(const std::optional<TimePoint>& a,
              const std::optional<TimePoint>& b) {
  if (!a) return false;
  if (!b) return true;
  return a->lastDay() > b->lastDay();
}

// Student affiliations end no earlier than the study period of a work the
// person created at that body (or a body above or below it).
std::optional<TimePoint> studyEndFor(const Store& store, const Iri& person,
                                     const Affiliation& aff) {
  const auto& ids = store.vocab().ids();
  std::optional<TimePoint> best;
  for (const auto& created : store.subjectsOf(ids.createdBy, person)) {
    if (created.property != ids.createdBy) continue;
    const auto& iv = created.validity.interval();
    if (!iv || !iv->end()) continue;
    const auto& studyEnd = *iv->end();
    for (const auto& grant : store.objectsOf(created.subject, ids.degreeGrantedBy)) {
      const auto& grantor = std::get<Iri>(grant.object);
      bool related = grantor == aff.body;
      if (!related) {
        const auto up = ancestorsAt(store, grantor, studyEnd);
        related = std::find(up.begin(), up.end(), aff.body) != up.end();
      }
      if (!related) {
        const auto up = ancestorsAt(store, aff.body, aff.start);
        related = std::find(up.begin(), up.end(), grantor) != up.end();
      }
      if (related && (!best || studyEnd.lastDay() > best->lastDay())) {
        best = studyEnd;
      }
    }
  }
  return best;
}

}  // namespace

MobilityAnalysis analyzeMobility(const Store& store, const Iri& person) {
  requireKind(store, person, EntityKind::Person, ErrorCode::NotAPerson);
  const auto& ids = store.vocab().ids();

  std::vector<Affiliation> affiliations;
  for (const auto& [property, role] :
       {std::pair{ids.isStudentOf, Role::Student},
        std::pair{ids.isProfessorAt, Role::Professor}}) {
    for (const auto& t : store.objectsOf(person, property)) {
      const auto& iv = t.validity.interval();
      if (!iv || !iv->start()) continue;
      const auto& body = std::get<Iri>(t.object);
      Affiliation aff{body, topInstitutionAt(store, body, *iv->start()), role,
                      *iv->start(), iv->end()};
      if (role == Role::Student && aff.end) {
        if (auto studyEnd = studyEndFor(store, person, aff);
            studyEnd && studyEnd->lastDay() > aff.end->lastDay()) {
          aff.end = studyEnd;
        }
      }
      affiliations.push_back(std::move(aff));
    }
  }
  std::sort(affiliations.begin(), affiliations.end(),
            [](const Affiliation& a, const Affiliation& b) {
              if (a.start.firstDay() != b.start.firstDay()) {
                return a.start.firstDay() < b.start.firstDay();
              }
              if (a.institution != b.institution) return a.institution < b.institution;
              return a.body < b.body;
            });

  struct Stay {
    Iri institution;
    Role firstRole;
    Role lastRole;
    TimePoint start;
    std::optional<TimePoint> end;
  };
  std::vector<Stay> stays;
  for (const auto& aff : affiliations) {
    if (!stays.empty() && stays.back().institution == aff.institution) {
      auto& stay = stays.back();
      if (laterEnd(aff.end, stay.end) || !aff.end) {
        stay.end = aff.end;
        stay.lastRole = aff.role;
      }
      continue;
    }
    stays.push_back({aff.institution, aff.role, aff.role, aff.start, aff.end});
  }

  MobilityAnalysis out;
  for (std::size_t i = 1; i < stays.size(); ++i) {
    const auto& from = stays[i - 1];
    const auto& to = stays[i];
    if (!from.end || from.end->lastDay() >= to.start.firstDay()) {
      out.overlaps.push_back(
          {person, from.institution, to.institution, to.start});
      continue;
    }
    out.events.push_back({person, from.institution, to.institution,
                          from.lastRole, to.firstRole, *from.end, to.start,
                          to.start.year() - from.end->year()});
  }
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const MobilityEvent& a, const MobilityEvent& b) {
                     return a.departure.firstDay() < b.departure.firstDay();
                   });
  return out;
}

std::vector<MobilityEvent> deriveMobility(const Store& store,
                                          const Iri& person) {
  return analyzeMobility(store, person).events;
}

// ---------------------------------------------------------------------------
// Structure

namespace {

// Within one day a split reads in causal order: the old body changes, leaves
// its parent, the new body is established and attached, then renames.
int sameDayRank(StructureEventKind k) {
  switch (k) {
    case StructureEventKind::ChangedTo: return 0;
    case StructureEventKind::SubdivisionRemoved: return 1;
    case StructureEventKind::Established: return 2;
    case StructureEventKind::SubdivisionAdded: return 3;
    case StructureEventKind::Renamed: return 4;
  }
  return 5;
}

}  // namespace

std::vector<StructureEvent> structureTimeline(const Store& store,
                                              const Iri& university) {
  requireKind(store, university, EntityKind::CorporateBody, ErrorCode::NotABody);
  const auto& ids = store.vocab().ids();

  // Every body ever below the university, plus the bodies they changed into.
  std::set<Iri> scope{university};
  std::deque<Iri> queue{university};
  while (!queue.empty()) {
    const auto node = queue.front();
    queue.pop_front();
    std::vector<Iri> next = childrenAt(store, node, std::nullopt);
    for (const auto& m : store.matchPattern(
             {node, ids.changedTo, std::nullopt, std::nullopt, Inference::None})) {
      next.push_back(std::get<Iri>(m.triple.object));
    }
    for (const auto& n : next) {
      if (scope.insert(n).second) queue.push_back(n);
    }
  }

  std::vector<StructureEvent> events;
  for (const auto& body : scope) {
    for (const auto& t : store.objectsOf(body, ids.establishedIn)) {
      const auto& lit = std::get<Literal>(t.object);
      events.push_back({body, StructureEventKind::Established,
                        TimePoint::parse(lit.lexical()), std::nullopt, {}});
    }
    for (const auto& m : store.matchPattern(
             {body, ids.hasSubdivision, std::nullopt, std::nullopt, Inference::None})) {
      const auto& iv = *m.triple.validity.interval();
      const auto& child = std::get<Iri>(m.triple.object);
      if (iv.start()) {
        events.push_back({body, StructureEventKind::SubdivisionAdded, *iv.start(),
                          child, {}});
      }
      if (iv.end()) {
        events.push_back({body, StructureEventKind::SubdivisionRemoved, *iv.end(),
                          child, {}});
      }
    }
    auto labels = store.objectsOf(body, ids.label);
    std::sort(labels.begin(), labels.end(),
              [](const TemporalTriple& a, const TemporalTriple& b) {
                return a.validity.days().first < b.validity.days().first;
              });
    for (std::size_t i = 1; i < labels.size(); ++i) {
      const auto& iv = labels[i].validity.interval();
      if (!iv || !iv->start()) continue;
      if (labels[i].validity.days().first == labels[0].validity.days().first) continue;
      events.push_back({body, StructureEventKind::Renamed, *iv->start(),
                        std::nullopt,
                        std::get<Literal>(labels[i].object).lexical()});
    }
    for (const auto& m : store.matchPattern(
             {body, ids.changedTo, std::nullopt, std::nullopt, Inference::None})) {
      events.push_back({body, StructureEventKind::ChangedTo,
                        *m.triple.validity.interval()->start(),
                        std::get<Iri>(m.triple.object), {}});
    }
  }
  std::sort(events.begin(), events.end(),
            [](const StructureEvent& a, const StructureEvent& b) {
              if (a.when.firstDay() != b.when.firstDay()) {
                return a.when.firstDay() < b.when.firstDay();
              }
              if (a.kind != b.kind) return sameDayRank(a.kind) < sameDayRank(b.kind);
              if (a.body != b.body) return a.body < b.body;
              if (a.counterpart != b.counterpart) return a.counterpart < b.counterpart;
              return a.detail < b.detail;
            });
  events.erase(std::unique(events.begin(), events.end(),
                           [](const StructureEvent& a, const StructureEvent& b) {
                             return a.body == b.body && a.kind == b.kind &&
                                    a.when == b.when &&
                                    a.counterpart == b.counterpart &&
                                    a.detail == b.detail;
                           }),
               events.end());
  return events;
}

}  // namespace etd
