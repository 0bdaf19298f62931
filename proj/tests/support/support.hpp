#pragma once
// Test-only helpers: the bundled fixture, brute-force oracles that share no
// code with the library's algorithms, and seeded random generators.

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "etd/ingest.hpp"
#include "etd/model.hpp"
#include "etd/query.hpp"
#include "etd/store.hpp"

namespace etd::testing {

// The code of the etd::Error `fn` throws, if any.
template <typename Fn>
std::optional<ErrorCode> errorCodeOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string fixturePath();
std::string fixtureText();
std::vector<Record> fixtureRecords();
// Ingested with a fixed batch date so exports are reproducible.
Store fixtureStore();
Iri fixtureIri(std::string_view relative);  // "person/pA" -> full Iri

// Enumerates every calendar day of [firstYear, lastYear] with its own
// leap-year rule. Day indexes stand in for day numbers; index -1 represents
// everything before the window and size() everything after it.
class DayOracle {
 public:
  DayOracle(int firstYear, int lastYear);

  long size() const { return long(days_.size()); }
  std::pair<long, long> span(const TimePoint& t) const;
  std::pair<long, long> span(const std::optional<TimePoint>& start,
                             const std::optional<TimePoint>& end) const;
  std::pair<long, long> span(const TimeInterval& iv) const;
  std::pair<long, long> span(const Validity& v) const;

  // Membership vector over [-1, size()] (offset by one).
  std::vector<bool> members(std::pair<long, long> range) const;

  bool contains(const Validity& v, const TimePoint& t) const;
  bool overlaps(const Validity& v, const TimeInterval& iv) const;

 private:
  std::vector<std::tuple<int, int, int>> days_;
};

// Stored triples plus the inverse of every stored triple whose property has
// one, derived here without the store's matching code.
struct Fact {
  TemporalTriple triple;
  bool derived = false;
};
std::vector<Fact> allFacts(const Store& store);

// Nested-loop join in clause order, scanning every fact per clause.
std::set<std::vector<Term>> bruteForceQuery(const Store& store, const QueryAst& ast,
                                            const DayOracle& days);

struct TimedEdge {
  int parent;
  int child;
  TimeInterval validity;
};
// Per-edge day coverage, built once per graph; ancestors() then answers by
// repeated relaxation over the edges live at t.
class ClosureOracle {
 public:
  ClosureOracle(const std::vector<TimedEdge>& edges, const DayOracle& days);
  // Hop distance of every ancestor of `node` at t.
  std::map<int, int> ancestors(int node, const TimePoint& t) const;

 private:
  const DayOracle& days_;
  std::map<std::pair<int, int>, std::vector<bool>> cover_;
};

struct RandomStoreOptions {
  int persons = 6;
  int bodies = 6;
  int works = 5;
  std::size_t minTriples = 20;
  std::size_t maxTriples = 200;
  int firstYear = 1970;
  int lastYear = 2020;
};

TimePoint randomPoint(std::mt19937& rng, int firstYear, int lastYear);
// Ordered bounds; `openChance` of dropping one side.
TimeInterval randomInterval(std::mt19937& rng, int firstYear, int lastYear,
                            double openChance = 0.0);
Store randomStore(std::mt19937& rng, const RandomStoreOptions& options = {});
QueryAst randomQuery(std::mt19937& rng, const Store& store, int maxClauses,
                     int firstYear = 1970, int lastYear = 2020);

}  // namespace etd::testing
