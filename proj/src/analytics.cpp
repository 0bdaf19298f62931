#include "etd/analytics.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "etd/error.hpp"

namespace etd {

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::InvalidLiteral, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num < 0 ? -num : num, den);
  return g ? Rational{num / g, den / g} : Rational{0, 1};
}

std::string Rational::toDecimal(int places) const {
  std::int64_t scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const bool negative = num < 0;
  const std::int64_t magnitude = negative ? -num : num;
  const std::int64_t scaled = (magnitude * scale * 2 + den) / (den * 2);
  std::string out = std::to_string(scaled / scale);
  if (places > 0) {
    auto frac = std::to_string(scaled % scale);
    out += "." + std::string(places - frac.size(), '0') + frac;
  }
  return negative && scaled != 0 ? "-" + out : out;
}

std::string_view tallyRoleName(TallyRole r) {
  switch (r) {
    case TallyRole::Student: return "student";
    case TallyRole::Professor: return "professor";
    case TallyRole::Advisor: return "advisor";
    case TallyRole::Committee: return "committee";
    case TallyRole::Dissertant: return "dissertant";
  }
  return "";
}

std::optional<TallyRole> tallyRoleFromName(std::string_view name) {
  for (auto r : {TallyRole::Student, TallyRole::Professor, TallyRole::Advisor,
                 TallyRole::Committee, TallyRole::Dissertant}) {
    if (tallyRoleName(r) == name) return r;
  }
  return std::nullopt;
}

std::optional<WorkKindFilter> workKindFilterFromName(std::string_view name) {
  if (name == "master") return WorkKindFilter::Master;
  if (name == "phd") return WorkKindFilter::Phd;
  if (name == "any") return WorkKindFilter::Any;
  return std::nullopt;
}

GenderKey genderAt(const Store& store, const Iri& person, const TimePoint& t) {
  GenderKey best;
  for (const auto& m : store.matchPattern({person, store.vocab().ids().hasGender,
                                           std::nullopt, TimeConstraint::at(t),
                                           Inference::None})) {
    const auto& g = std::get<Iri>(m.triple.object);
    if (!best || g < *best) best = g;
  }
  return best;
}

std::size_t GenderTally::total() const {
  std::size_t sum = unspecified;
  for (const auto& [_, n] : counts) sum += n;
  return sum;
}

std::optional<Validity> studyPeriod(const Store& store, const Iri& work) {
  const auto created = store.objectsOf(work, store.vocab().ids().createdBy);
  if (created.empty()) return std::nullopt;
  return created.front().validity;
}

namespace {

std::set<Iri> objectIris(const Store& store, const Iri& subject,
                         const Iri& property) {
  std::set<Iri> out;
  for (const auto& t : store.objectsOf(subject, property)) {
    if (const auto* iri = std::get_if<Iri>(&t.object)) out.insert(*iri);
  }
  return out;
}

bool kindMatches(const Store& store, const Iri& work, WorkKindFilter filter) {
  if (filter == WorkKindFilter::Any) return true;
  const auto want = filter == WorkKindFilter::Master ? WorkSubkind::MasterThesis
                                                     : WorkSubkind::PhDDissertation;
  for (const auto& term : objectIris(store, work, store.vocab().ids().workKind)) {
    if (store.vocab().workKindFromTerm(term) == want) return true;
  }
  return false;
}

// The point a work's facts are read at: the study end, else its start, else
// the end (or start) of the surrounding query interval.
TimePoint referencePoint(const Validity& study, const TimeInterval& fallback) {
  if (const auto& iv = study.interval()) {
    if (iv->end()) return *iv->end();
    if (iv->start()) return *iv->start();
  }
  return fallback.end() ? *fallback.end() : *fallback.start();
}

struct ScopedWork {
  Iri work;
  Validity study;
  TimePoint reference;
};

std::vector<ScopedWork> worksIn(const Store& store, const TimeInterval& interval,
                                WorkKindFilter filter) {
  std::vector<ScopedWork> out;
  for (const auto& work : store.entitiesOfKind(EntityKind::Work)) {
    const auto study = studyPeriod(store, work);
    if (!study || !study->overlaps(interval) || !kindMatches(store, work, filter)) {
      continue;
    }
    out.push_back({work, *study, referencePoint(*study, interval)});
  }
  return out;
}

GenderKey firstDissertant(const Store& store, const Iri& work) {
  const auto d = objectIris(store, work, store.vocab().ids().createdBy);
  if (d.empty()) return std::nullopt;
  return *d.begin();
}

}  // namespace

GenderTally genderTally(const Store& store, const Iri& scope, TallyRole role,
                        const TimePoint& t, bool includeSubdivisions) {
  if (store.kindOf(scope) != EntityKind::CorporateBody) {
    throw Error(ErrorCode::NotABody, "<" + scope.str() + "> is not a CorporateBody");
  }
  const auto& ids = store.vocab().ids();
  std::set<Iri> persons;
  if (role == TallyRole::Student || role == TallyRole::Professor) {
    for (auto& p : membersAt(store, scope, t,
                             role == TallyRole::Student ? Role::Student
                                                        : Role::Professor,
                             includeSubdivisions, false)) {
      persons.insert(std::move(p));
    }
  } else {
    std::set<Iri> grantors{scope};
    if (includeSubdivisions) {
      for (auto& b : subdivisionsAt(store, scope, t)) grantors.insert(std::move(b));
    }
    const auto year = TimeInterval::instant(TimePoint::make(t.year()));
    const auto& property = role == TallyRole::Advisor     ? ids.advisedBy
                           : role == TallyRole::Committee ? ids.committeeMember
                                                          : ids.createdBy;
    for (const auto& work : store.entitiesOfKind(EntityKind::Work)) {
      const auto study = studyPeriod(store, work);
      if (!study || !study->overlaps(year)) continue;
      const auto granted = objectIris(store, work, ids.degreeGrantedBy);
      if (std::none_of(granted.begin(), granted.end(),
                       [&](const Iri& g) { return grantors.contains(g); })) {
        continue;
      }
      for (auto& p : objectIris(store, work, property)) persons.insert(std::move(p));
    }
  }

  GenderTally tally{scope, role, t, {}, 0, {persons.begin(), persons.end()}};
  for (const auto& p : persons) {
    if (auto g = genderAt(store, p, t)) {
      ++tally.counts[*g];
    } else {
      ++tally.unspecified;
    }
  }
  return tally;
}

SupervisorGenderRate supervisorGenderRate(const Store& store,
                                          const TimeInterval& interval,
                                          WorkKindFilter kind) {
  SupervisorGenderRate rate;
  std::size_t specified = 0;
  for (const auto& w : worksIn(store, interval, kind)) {
    for (const auto& advisor :
         objectIris(store, w.work, store.vocab().ids().advisedBy)) {
      if (auto g = genderAt(store, advisor, w.reference)) {
        ++rate.byGender[*g].supervisions;
        ++specified;
      } else {
        ++rate.unspecified;
      }
    }
  }
  for (auto& [_, s] : rate.byGender) {
    s.share = Rational::make(std::int64_t(s.supervisions), std::int64_t(specified));
  }
  return rate;
}

SupervisionMatrix supervisionGenderMatrix(const Store& store,
                                          const TimeInterval& interval,
                                          WorkKindFilter kind) {
  SupervisionMatrix matrix;
  for (const auto& w : worksIn(store, interval, kind)) {
    const auto dissertant = firstDissertant(store, w.work);
    const GenderKey dissertantGender =
        dissertant ? genderAt(store, *dissertant, w.reference) : std::nullopt;
    for (const auto& advisor :
         objectIris(store, w.work, store.vocab().ids().advisedBy)) {
      ++matrix[genderAt(store, advisor, w.reference)][dissertantGender];
    }
  }
  return matrix;
}

InterdisciplinaryResult interdisciplinaryCount(const Store& store,
                                               const TimeInterval& interval) {
  struct Placement {
    Iri university;
    std::optional<Iri> branch;  // direct subdivision of the university
  };
  InterdisciplinaryResult result;
  for (const auto& w : worksIn(store, interval, WorkKindFilter::Any)) {
    std::vector<Placement> placements;
    for (const auto& g :
         objectIris(store, w.work, store.vocab().ids().degreeGrantedBy)) {
      if (store.kindOf(g) != EntityKind::CorporateBody) continue;
      const auto up = ancestorsAt(store, g, w.reference);
      if (up.empty()) {
        placements.push_back({g, std::nullopt});
      } else {
        placements.push_back({up.back(), up.size() >= 2 ? up[up.size() - 2] : g});
      }
    }
    bool diverge = false;
    for (std::size_t i = 0; i < placements.size() && !diverge; ++i) {
      for (std::size_t j = i + 1; j < placements.size() && !diverge; ++j) {
        const auto& a = placements[i];
        const auto& b = placements[j];
        diverge = a.university != b.university ||
                  (a.branch && b.branch && *a.branch != *b.branch);
      }
    }
    if (diverge) result.works.push_back(w.work);
  }
  std::sort(result.works.begin(), result.works.end());
  result.count = result.works.size();
  return result;
}

MobilityByGender mobilityByGender(const Store& store,
                                  const TimeInterval& interval) {
  MobilityByGender out;
  std::map<GenderKey, std::int64_t> gapSums;
  for (const auto& person : store.entitiesOfKind(EntityKind::Person)) {
    for (auto& e : deriveMobility(store, person)) {
      if (!intervalContains(interval, e.arrival)) continue;
      const auto g = genderAt(store, person, e.arrival);
      ++out.byGender[g].moves;
      gapSums[g] += e.gapYears;
      out.events.push_back(std::move(e));
    }
  }
  for (auto& [g, stats] : out.byGender) {
    stats.avgGapYears = Rational::make(gapSums[g], std::int64_t(stats.moves));
  }
  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const MobilityEvent& a, const MobilityEvent& b) {
                     if (a.arrival.firstDay() != b.arrival.firstDay()) {
                       return a.arrival.firstDay() < b.arrival.firstDay();
                     }
                     return a.person < b.person;
                   });
  return out;
}

std::vector<Cooperation> institutionCooperation(const Store& store,
                                                const TimeInterval& interval) {
  const auto& ids = store.vocab().ids();
  std::map<std::pair<Iri, Iri>, std::set<Iri>> shared;
  for (const auto& w : worksIn(store, interval, WorkKindFilter::Any)) {
    std::set<Iri> granting;
    for (const auto& g : objectIris(store, w.work, ids.degreeGrantedBy)) {
      if (store.kindOf(g) == EntityKind::CorporateBody) {
        granting.insert(topInstitutionAt(store, g, w.reference));
      }
    }
    std::set<Iri> people = objectIris(store, w.work, ids.advisedBy);
    for (auto& p : objectIris(store, w.work, ids.committeeMember)) people.insert(p);

    const auto studyDays = w.study.days();
    for (const auto& person : people) {
      for (const auto& t : store.objectsOf(person, ids.isProfessorAt)) {
        const auto affDays = t.validity.days();
        if (affDays.first > studyDays.last || studyDays.first > affDays.last) continue;
        // Read the hierarchy where the affiliation and the study first meet.
        TimePoint at = w.reference;
        if (const auto& iv = t.validity.interval(); iv && iv->start()) {
          at = *iv->start();
          if (const auto& sv = w.study.interval();
              sv && sv->start() && sv->start()->firstDay() > at.firstDay()) {
            at = *sv->start();
          }
        }
        const auto b = topInstitutionAt(store, std::get<Iri>(t.object), at);
        for (const auto& a : granting) {
          if (a == b) continue;
          shared[std::minmax(a, b)].insert(w.work);
        }
      }
    }
  }
  std::vector<Cooperation> out;
  for (const auto& [pair, works] : shared) {
    out.push_back({pair.first, pair.second, works.size()});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Cooperation& x, const Cooperation& y) {
                     return x.sharedWorks > y.sharedWorks;
                   });
  return out;
}

}  // namespace etd
