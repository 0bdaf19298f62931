#pragma once
// Canned analytics over an academic network.
//
// Gender is always read from etd:hasGender statements valid at one point in
// time; each function documents the point it uses. A person without such a
// statement counts as unspecified (an absent key in the maps below).
//
// Definitions used where the domain leaves room:
// - a work is interdisciplinary when two of its degree grantors belong to
//   different universities, or hang from different direct subdivisions of
//   the same university;
// - two institutions cooperate on a work when it is granted by one of them
//   and an advisor or committee member is a professor at the other during
//   the study period.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "etd/model.hpp"
#include "etd/reason.hpp"
#include "etd/store.hpp"

namespace etd {

// Exact non-negative fraction in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  double value() const { return double(num) / double(den); }
  // Rounded half up to `places` decimals, e.g. "0.5000".
  std::string toDecimal(int places = 4) const;

  friend bool operator==(const Rational&, const Rational&) = default;
};

enum class TallyRole { Student, Professor, Advisor, Committee, Dissertant };
enum class WorkKindFilter { Master, Phd, Any };

std::string_view tallyRoleName(TallyRole r);
std::optional<TallyRole> tallyRoleFromName(std::string_view name);
std::optional<WorkKindFilter> workKindFilterFromName(std::string_view name);

using GenderKey = std::optional<Iri>;  // nullopt: unspecified

// The gender valid at t (smallest Iri if several are).
GenderKey genderAt(const Store& store, const Iri& person, const TimePoint& t);

struct GenderTally {
  Iri scope;
  TallyRole role;
  TimePoint at;
  std::map<Iri, std::size_t> counts;
  std::size_t unspecified = 0;
  std::vector<Iri> persons;  // the matched persons, sorted

  std::size_t total() const;
};

// Students and professors come from membersAt (without following
// successions). Advisors, committee members and dissertants come from works
// granted by the scope whose study period overlaps the year of t. Gender is
// read at t. Throws NotABody.
GenderTally genderTally(const Store& store, const Iri& scope, TallyRole role,
                        const TimePoint& t, bool includeSubdivisions);

struct SupervisionShare {
  std::size_t supervisions = 0;
  Rational share;
};

struct SupervisorGenderRate {
  std::map<Iri, SupervisionShare> byGender;  // shares sum to 1
  std::size_t unspecified = 0;
};

// One supervision per advisedBy edge on a work of the kind whose study
// period overlaps the interval; advisor gender is read at the study end.
SupervisorGenderRate supervisorGenderRate(const Store& store,
                                          const TimeInterval& interval,
                                          WorkKindFilter kind);

// advisor gender -> dissertant gender -> count, both read at the study end.
using SupervisionMatrix = std::map<GenderKey, std::map<GenderKey, std::size_t>>;
SupervisionMatrix supervisionGenderMatrix(const Store& store,
                                          const TimeInterval& interval,
                                          WorkKindFilter kind);

struct InterdisciplinaryResult {
  std::size_t count = 0;
  std::vector<Iri> works;  // sorted
};

// Hierarchies are read at the study end.
InterdisciplinaryResult interdisciplinaryCount(const Store& store,
                                               const TimeInterval& interval);

struct MobilityStats {
  std::size_t moves = 0;
  Rational avgGapYears;
};

struct MobilityByGender {
  std::map<GenderKey, MobilityStats> byGender;
  std::vector<MobilityEvent> events;  // the counted events
};

// Events whose arrival lies in the interval; gender is read at arrival.
MobilityByGender mobilityByGender(const Store& store,
                                  const TimeInterval& interval);

struct Cooperation {
  Iri institutionA;  // A < B
  Iri institutionB;
  std::size_t sharedWorks = 0;

  friend bool operator==(const Cooperation&, const Cooperation&) = default;
};

// Sorted by count descending, then by the pair.
std::vector<Cooperation> institutionCooperation(const Store& store,
                                                const TimeInterval& interval);

// Study period of a work: the validity of its createdBy statement.
std::optional<Validity> studyPeriod(const Store& store, const Iri& work);

}  // namespace etd
