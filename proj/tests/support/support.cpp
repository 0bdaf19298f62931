#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "etd/vocab.hpp"

#ifndef ETD_FIXTURE_PATH
#error "ETD_FIXTURE_PATH must point at the bundled fixture"
#endif

namespace etd::testing {

std::string fixturePath() { return ETD_FIXTURE_PATH; }

std::string fixtureText() {
  std::ifstream in(fixturePath(), std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<Record> fixtureRecords() { return parseRecords(fixtureText()); }

Store fixtureStore() {
  IngestOptions options;
  options.batchDate = TimePoint::make(2024, 1, 1);
  auto result = recordsToGraph(fixtureRecords(), options);
  if (!result.report.ok()) {
    throw std::runtime_error("fixture failed to ingest:\n" + result.report.toString());
  }
  return std::move(result.store);
}

Iri fixtureIri(std::string_view relative) {
  return Iri::parse(std::string(kDefaultBaseIri) + "/" + std::string(relative));
}

// ---------------------------------------------------------------------------

namespace {

bool leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

int monthLength(int y, int m) {
  static constexpr int kLengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : kLengths[m - 1];
}

}  // namespace

DayOracle::DayOracle(int firstYear, int lastYear) {
  for (int y = firstYear; y <= lastYear; ++y) {
    for (int m = 1; m <= 12; ++m) {
      for (int d = 1; d <= monthLength(y, m); ++d) days_.emplace_back(y, m, d);
    }
  }
}

std::pair<long, long> DayOracle::span(const TimePoint& t) const {
  const auto lo = std::make_tuple(t.year(), t.month().value_or(1), t.day().value_or(1));
  const auto hi = std::make_tuple(t.year(), t.month().value_or(12), t.day().value_or(31));
  const long first = std::lower_bound(days_.begin(), days_.end(), lo) - days_.begin();
  const long last = std::upper_bound(days_.begin(), days_.end(), hi) - days_.begin() - 1;
  if (last < 0) return {-1, -1};
  if (first >= size()) return {size(), size()};
  return {first, last};
}

std::pair<long, long> DayOracle::span(const std::optional<TimePoint>& start,
                                      const std::optional<TimePoint>& end) const {
  return {start ? span(*start).first : -1, end ? span(*end).second : size()};
}

std::pair<long, long> DayOracle::span(const TimeInterval& iv) const {
  return span(iv.start(), iv.end());
}

std::pair<long, long> DayOracle::span(const Validity& v) const {
  if (!v.interval()) return {-1, size()};
  return span(*v.interval());
}

std::vector<bool> DayOracle::members(std::pair<long, long> range) const {
  std::vector<bool> out(std::size_t(size() + 2), false);
  for (long d = range.first; d <= range.second; ++d) out[std::size_t(d + 1)] = true;
  return out;
}

bool DayOracle::contains(const Validity& v, const TimePoint& t) const {
  const auto [lo, hi] = span(v);
  const auto [first, last] = span(t);
  for (long d = first; d <= last; ++d) {
    if (d < lo || d > hi) return false;
  }
  return true;
}

bool DayOracle::overlaps(const Validity& v, const TimeInterval& iv) const {
  const auto [aLo, aHi] = span(v);
  const auto [bLo, bHi] = span(iv);
  for (long d = -1; d <= size(); ++d) {
    if (d >= aLo && d <= aHi && d >= bLo && d <= bHi) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

std::vector<Fact> allFacts(const Store& store) {
  std::vector<Fact> out;
  for (const auto& t : store.triples()) {
    out.push_back({t, false});
    const auto* def = store.vocab().find(t.property);
    const auto* object = std::get_if<Iri>(&t.object);
    if (def && def->inverseId && object) {
      out.push_back({{*object, *def->inverseId, Term{t.subject}, t.validity,
                      t.provenance},
                     true});
    }
  }
  return out;
}

namespace {

struct Position {
  std::optional<std::string> var;
  std::optional<Term> value;
};

Position resolve(const Store& store, const QueryTerm& term) {
  if (const auto* v = std::get_if<QueryVariable>(&term)) return {v->name, {}};
  if (const auto* c = std::get_if<QueryCurie>(&term)) {
    return {{}, Term{Iri::parse(store.vocab().ns() + c->local)}};
  }
  if (const auto* r = std::get_if<QueryRelative>(&term)) {
    return {{}, Term{Iri::parse(store.base().str() + "/" + r->path)}};
  }
  if (const auto* i = std::get_if<Iri>(&term)) return {{}, Term{*i}};
  return {{}, Term{std::get<Literal>(term)}};
}

bool unify(std::map<std::string, Term>& b, const Position& pos, const Term& value,
           std::vector<std::string>& added) {
  if (pos.value) return *pos.value == value;
  const auto it = b.find(*pos.var);
  if (it != b.end()) return it->second == value;
  b.emplace(*pos.var, value);
  added.push_back(*pos.var);
  return true;
}

}  // namespace

std::set<std::vector<Term>> bruteForceQuery(const Store& store, const QueryAst& ast,
                                            const DayOracle& days) {
  const auto facts = allFacts(store);
  struct Clause {
    Position s, p, o;
    std::optional<TimeConstraint> time;
  };
  std::vector<Clause> clauses;
  for (const auto& c : ast.clauses) {
    clauses.push_back({resolve(store, c.subject), resolve(store, c.property),
                       resolve(store, c.object), c.time});
  }

  std::set<std::vector<Term>> rows;
  std::map<std::string, Term> bindings;
  const auto step = [&](auto&& self, std::size_t i) -> void {
    if (i == clauses.size()) {
      std::vector<Term> row;
      for (const auto& v : ast.selectVars) row.push_back(bindings.at(v));
      rows.insert(std::move(row));
      return;
    }
    const auto& c = clauses[i];
    for (const auto& f : facts) {
      if (c.time) {
        const bool ok = c.time->mode == TimeConstraint::Mode::At
                            ? days.contains(f.triple.validity, *c.time->interval.start())
                            : days.overlaps(f.triple.validity, c.time->interval);
        if (!ok) continue;
      }
      std::vector<std::string> added;
      if (unify(bindings, c.s, Term{f.triple.subject}, added) &&
          unify(bindings, c.p, Term{f.triple.property}, added) &&
          unify(bindings, c.o, f.triple.object, added)) {
        self(self, i + 1);
      }
      for (const auto& v : added) bindings.erase(v);
    }
  };
  if (!clauses.empty()) step(step, 0);
  return rows;
}

ClosureOracle::ClosureOracle(const std::vector<TimedEdge>& edges, const DayOracle& days)
    : days_(days) {
  for (const auto& e : edges) {
    auto& days_of = cover_[{e.parent, e.child}];
    const auto m = days.members(days.span(e.validity));
    if (days_of.empty()) days_of.assign(m.size(), false);
    for (std::size_t i = 0; i < m.size(); ++i) days_of[i] = days_of[i] || m[i];
  }
}

std::map<int, int> ClosureOracle::ancestors(int node, const TimePoint& t) const {
  // An edge is live when the union of its intervals covers every day of t.
  const auto [first, last] = days_.span(t);
  std::vector<std::pair<int, int>> live;
  for (const auto& [edge, in] : cover_) {
    bool all = true;
    for (long d = first; d <= last; ++d) all = all && in[std::size_t(d + 1)];
    if (all) live.push_back(edge);
  }

  std::map<int, int> dist{{node, 0}};
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [parent, child] : live) {
      const auto c = dist.find(child);
      if (c == dist.end()) continue;
      const int candidate = c->second + 1;
      const auto p = dist.find(parent);
      if (p == dist.end() || p->second > candidate) {
        dist[parent] = candidate;
        changed = true;
      }
    }
  }
  dist.erase(node);
  return dist;
}

// ---------------------------------------------------------------------------

TimePoint randomPoint(std::mt19937& rng, int firstYear, int lastYear) {
  const int y = std::uniform_int_distribution<int>(firstYear, lastYear)(rng);
  switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: return TimePoint::make(y);
    case 1: return TimePoint::make(y, std::uniform_int_distribution<int>(1, 12)(rng));
    default: {
      const int m = std::uniform_int_distribution<int>(1, 12)(rng);
      return TimePoint::make(y, m,
                             std::uniform_int_distribution<int>(1, monthLength(y, m))(rng));
    }
  }
}

TimeInterval randomInterval(std::mt19937& rng, int firstYear, int lastYear,
                            double openChance) {
  while (true) {
    auto a = randomPoint(rng, firstYear, lastYear);
    auto b = randomPoint(rng, firstYear, lastYear);
    if (b.lastDay() < a.firstDay()) std::swap(a, b);
    if (b.lastDay() < a.firstDay()) continue;  // e.g. 1990 vs 1990-05
    std::optional<TimePoint> start = a, end = b;
    if (std::bernoulli_distribution(openChance)(rng)) {
      if (std::bernoulli_distribution(0.5)(rng)) {
        start.reset();
      } else {
        end.reset();
      }
    }
    return TimeInterval::make(start, end);
  }
}

namespace {

std::string randomText(std::mt19937& rng) {
  static const std::vector<std::string> kPieces = {
      "Faculty", " of ", "Physics", "\"quoted\"", "back\\slash", "line\nbreak",
      "tab\there", "cr\r", "\xC3\xA9" "cole", "\xE6\xBC\xA2", "A", "B"};
  std::string out;
  const int n = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int i = 0; i < n; ++i) {
    out += kPieces[std::uniform_int_distribution<std::size_t>(0, kPieces.size() - 1)(rng)];
  }
  return out;
}

template <typename T>
const T& pick(std::mt19937& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

}  // namespace

Store randomStore(std::mt19937& rng, const RandomStoreOptions& o) {
  Store store;
  const auto& vocab = store.vocab();
  const std::string base(kDefaultBaseIri);
  const ProvenanceTag setup{"setup", Iri::parse(base), std::nullopt};

  std::map<EntityKind, std::vector<Iri>> entities;
  const auto mint = [&](EntityKind kind, const std::string& segment, int count) {
    for (int i = 0; i < count; ++i) {
      auto iri = Iri::parse(base + "/" + segment + "/" + segment[0] + std::to_string(i));
      store.insertTriple({iri, vocab.ids().kind, Term{vocab.kindTerm(kind)},
                          Validity::always(), setup});
      entities[kind].push_back(std::move(iri));
    }
  };
  mint(EntityKind::Person, "person", o.persons);
  mint(EntityKind::CorporateBody, "body", o.bodies);
  mint(EntityKind::Work, "work", o.works);
  mint(EntityKind::Gender, "gender", 2);
  mint(EntityKind::Place, "place", 2);
  for (int i = 0; i < 3; ++i) {
    entities[EntityKind::ExternalResource].push_back(
        Iri::parse("http://example.com/ext/" + std::to_string(i)));
  }
  std::vector<Iri> everyone;
  for (auto k : {EntityKind::Person, EntityKind::CorporateBody, EntityKind::Work,
                 EntityKind::Gender, EntityKind::Place}) {
    everyone.insert(everyone.end(), entities[k].begin(), entities[k].end());
  }

  const std::vector<ProvenanceTag> provenances = {
      {"r1", Iri::parse(base), std::nullopt},
      {"r2", Iri::parse(base), TimePoint::make(2020, 1, 1)},
      {"r3", Iri::parse("http://example.org/other"), std::nullopt},
  };
  std::vector<const PropertyDef*> properties;
  for (const auto& def : vocab.vocabTable()) {
    if (def.id != vocab.ids().kind) properties.push_back(&def);
  }

  const auto target = std::uniform_int_distribution<std::size_t>(
      std::min(o.minTriples, o.maxTriples), o.maxTriples)(rng);
  for (int attempts = 0; store.size() < target && attempts < 5000; ++attempts) {
    const auto& def = *pick(rng, properties);
    const auto& subject = def.domainKind ? pick(rng, entities[*def.domainKind])
                                         : pick(rng, everyone);
    Term object = subject;
    switch (def.range.tag) {
      case ValueRange::Tag::Entity:
        object = pick(rng, entities[def.range.kind]);
        break;
      case ValueRange::Tag::Term:
        object = pick(rng, def.allowedTerms);
        break;
      case ValueRange::Tag::Literal: {
        const int y = std::uniform_int_distribution<int>(o.firstYear, o.lastYear)(rng);
        switch (def.range.datatype) {
          case LiteralDatatype::String:
            object = Literal::make(randomText(rng), LiteralDatatype::String,
                                   std::bernoulli_distribution(0.2)(rng)
                                       ? std::optional<std::string>("en")
                                       : std::nullopt);
            break;
          case LiteralDatatype::Year: object = Literal::year(y); break;
          case LiteralDatatype::Integer:
            object = Literal::make(std::to_string(y), LiteralDatatype::Integer);
            break;
          case LiteralDatatype::Date:
            object = Literal::make(std::to_string(y) + "-03-01", LiteralDatatype::Date);
            break;
        }
        break;
      }
    }
    Validity validity = Validity::always();
    switch (def.temporality) {
      case Temporality::Untimed: break;
      case Temporality::Optional:
        if (std::bernoulli_distribution(0.5)(rng)) {
          validity = Validity::during(randomInterval(rng, o.firstYear, o.lastYear, 0.1));
        }
        break;
      case Temporality::Required:
        validity = Validity::during(randomInterval(rng, o.firstYear, o.lastYear, 0.15));
        break;
      case Temporality::Instant:
        validity = Validity::during(
            TimeInterval::instant(randomPoint(rng, o.firstYear, o.lastYear)));
        break;
    }
    try {
      store.insertTriple({subject, def.id, object, validity, pick(rng, provenances)});
    } catch (const Error&) {
      // Shape or kind rejections just cost an attempt.
    }
  }
  return store;
}

QueryAst randomQuery(std::mt19937& rng, const Store& store, int maxClauses,
                     int firstYear, int lastYear) {
  const auto facts = allFacts(store);
  const std::vector<std::string> vars = {"a", "b", "c", "d"};
  const auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  const auto var = [&]() -> QueryTerm { return QueryVariable{pick(rng, vars)}; };
  const auto prefix = store.base().str() + "/";

  QueryAst ast;
  const int n = std::uniform_int_distribution<int>(1, maxClauses)(rng);
  for (int i = 0; i < n; ++i) {
    QueryClause c{var(), var(), var(), std::nullopt};
    if (!facts.empty()) {
      const auto& f = pick(rng, facts).triple;
      if (!chance(0.6)) c.subject = f.subject;
      if (!chance(0.25)) {
        if (chance(0.5)) {
          c.property = QueryCurie{"etd", *store.vocab().localName(f.property)};
        } else {
          c.property = f.property;
        }
      }
      if (!chance(0.5)) {
        const auto* iri = std::get_if<Iri>(&f.object);
        const auto relative =
            iri && iri->str().starts_with(prefix) ? iri->str().substr(prefix.size()) : "";
        if (std::regex_match(relative, std::regex("[a-z]+/[A-Za-z0-9_-]+")) && chance(0.3)) {
          c.object = QueryRelative{relative};
        } else if (iri) {
          c.object = *iri;
        } else {
          c.object = std::get<Literal>(f.object);
        }
      }
    }
    const double roll = std::uniform_real_distribution<double>(0, 1)(rng);
    if (roll < 0.25) {
      c.time = TimeConstraint::at(randomPoint(rng, firstYear, lastYear));
    } else if (roll < 0.4) {
      c.time = TimeConstraint::overlaps(randomInterval(rng, firstYear, lastYear, 0.2));
    }
    ast.clauses.push_back(std::move(c));
  }

  std::vector<std::string> used;
  for (const auto& c : ast.clauses) {
    for (const auto* t : {&c.subject, &c.property, &c.object}) {
      if (const auto* v = std::get_if<QueryVariable>(t);
          v && std::find(used.begin(), used.end(), v->name) == used.end()) {
        used.push_back(v->name);
      }
    }
  }
  if (used.empty()) {
    ast.clauses.front().subject = QueryVariable{"a"};
    used.push_back("a");
  }
  for (const auto& v : used) {
    if (chance(0.6)) ast.selectVars.push_back(v);
  }
  if (ast.selectVars.empty()) ast.selectVars.push_back(pick(rng, used));
  return ast;
}

}  // namespace etd::testing
