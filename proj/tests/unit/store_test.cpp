#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <tuple>

#include "etd/io.hpp"
#include "etd/store.hpp"
#include "support.hpp"

namespace etd {
namespace {

using testing::DayOracle;
using testing::errorCodeOf;
using testing::fixtureIri;
using testing::fixtureStore;

const Vocabulary& vocab() { return *Vocabulary::standard(); }

ProvenanceTag tag(std::string source = "r1") {
  return {std::move(source), Iri::parse("http://example.org/etd"), std::nullopt};
}

TemporalTriple triple(std::string_view s, const Iri& p, Term o, Validity v,
                      ProvenanceTag prov = tag()) {
  return {fixtureIri(s), p, std::move(o), std::move(v), std::move(prov)};
}

Pattern pattern(std::optional<Iri> s, std::optional<Iri> p, std::optional<Term> o = {},
                std::optional<TimeConstraint> time = {},
                Inference inference = Inference::None) {
  return {std::move(s), std::move(p), std::move(o), std::move(time), inference};
}

Pattern everything() {
  return pattern({}, {}, {}, {}, Inference::Inverse);
}

Validity during(std::string_view text) {
  return Validity::during(TimeInterval::parse(text));
}

TEST(Store, InsertOutcomes) {
  Store store;
  const auto established =
      triple("body/facB", vocab().ids().establishedIn, Literal::year(1963),
             Validity::always());
  EXPECT_EQ(store.insertTriple(established).outcome, InsertOutcome::Inserted);
  EXPECT_EQ(store.insertTriple(established).outcome, InsertOutcome::Duplicate);
  EXPECT_EQ(store.size(), 1u);
}

TEST(Store, AdjacentValiditiesCoalesce) {
  Store store;
  const auto& p = vocab().ids().isProfessorAt;
  const Term uy = fixtureIri("body/uy");
  EXPECT_EQ(store.insertTriple(triple("person/pA", p, uy, during("2006..2008"))).outcome,
            InsertOutcome::Inserted);
  const auto r = store.insertTriple(triple("person/pA", p, uy, during("2008..2010")));
  EXPECT_EQ(r.outcome, InsertOutcome::Coalesced);
  EXPECT_EQ(r.validity, during("2006..2010"));
  ASSERT_EQ(store.size(), 1u);
  EXPECT_EQ(store.triples()[0].validity, during("2006..2010"));

  // A gap keeps statements apart; filling it joins all three.
  store.insertTriple(triple("person/pA", p, uy, during("2012..2014")));
  EXPECT_EQ(store.size(), 2u);
  const auto fill = store.insertTriple(triple("person/pA", p, uy, during("2011")));
  EXPECT_EQ(fill.validity, during("2006..2014"));
  EXPECT_EQ(store.size(), 1u);
  EXPECT_EQ(store.insertTriple(triple("person/pA", p, uy, during("2009..2010"))).outcome,
            InsertOutcome::Duplicate);
}

TEST(Store, DifferentProvenanceIsNotCoalesced) {
  Store store;
  const auto& p = vocab().ids().isProfessorAt;
  const Term uy = fixtureIri("body/uy");
  store.insertTriple(triple("person/pA", p, uy, during("2006..2008"), tag("a")));
  EXPECT_EQ(
      store.insertTriple(triple("person/pA", p, uy, during("2007..2010"), tag("b"))).outcome,
      InsertOutcome::Inserted);
  EXPECT_EQ(store.size(), 2u);
}

TEST(Store, UnboundedUnionOfOptionalPropertyBecomesAlways) {
  Store store;
  const auto& p = vocab().ids().hasGender;
  const Term male = fixtureIri("gender/male");
  store.insertTriple(triple("person/pA", p, male, during("..1990")));
  const auto r = store.insertTriple(triple("person/pA", p, male, during("1980..")));
  EXPECT_EQ(r.outcome, InsertOutcome::Coalesced);
  EXPECT_EQ(r.validity, Validity::always());
}

TEST(Store, UnboundedUnionOfRequiredPropertyIsRejected) {
  Store store;
  const auto& p = vocab().ids().isStudentOf;
  const Term ux = fixtureIri("body/ux");
  store.insertTriple(triple("person/pA", p, ux, during("..1990")));
  EXPECT_EQ(errorCodeOf([&] {
              store.insertTriple(triple("person/pA", p, ux, during("1980..")));
            }),
            ErrorCode::InvalidTriple);
  ASSERT_EQ(store.size(), 1u);
  EXPECT_EQ(store.triples()[0].validity, during("..1990"));
}

TEST(Store, InstantsNeverCoalesce) {
  Store store;
  const auto& p = vocab().ids().changedTo;
  const Term next = fixtureIri("body/next");
  EXPECT_EQ(store.insertTriple(triple("body/old", p, next, during("1988..1988"))).outcome,
            InsertOutcome::Inserted);
  EXPECT_EQ(store.insertTriple(triple("body/old", p, next, during("1989..1989"))).outcome,
            InsertOutcome::Inserted);
  EXPECT_EQ(store.insertTriple(triple("body/old", p, next, during("1988-05..1988-05"))).outcome,
            InsertOutcome::Inserted);
  EXPECT_EQ(store.insertTriple(triple("body/old", p, next, during("1989..1989"))).outcome,
            InsertOutcome::Duplicate);
  ASSERT_EQ(store.size(), 3u);
  for (const auto& t : store.triples()) EXPECT_TRUE(t.validity.interval()->isInstant());
  EXPECT_EQ(importQuads(exportQuads(store)).triples(), store.triples());
}

// Statements sharing subject, property, object and provenance never overlap
// or touch, judged day by day. Instant properties are the exception: their
// statements are distinct single points.
TEST(Store, StoredValiditiesAreApart) {
  const DayOracle days(1960, 2030);
  std::mt19937 rng(61);
  for (int round = 0; round < 50; ++round) {
    const auto store = testing::randomStore(rng);
    std::map<std::tuple<Iri, Iri, std::string, ProvenanceTag>, std::vector<Validity>> groups;
    for (const auto& t : store.triples()) {
      groups[{t.subject, t.property, toNTriples(t.object), t.provenance}].push_back(
          t.validity);
    }
    for (const auto& [key, vs] : groups) {
      const bool instant =
          vocab().get(std::get<1>(key)).temporality == Temporality::Instant;
      for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
          if (instant) {
            ASSERT_TRUE(vs[i].interval()->isInstant());
            ASSERT_NE(vs[i], vs[j]);
            continue;
          }
          auto [aLo, aHi] = days.span(vs[i]);
          auto [bLo, bHi] = days.span(vs[j]);
          if (aLo > bLo) {
            std::swap(aLo, bLo);
            std::swap(aHi, bHi);
          }
          ASSERT_GT(bLo, aHi + 1) << vs[i].toString() << " " << vs[j].toString();
        }
      }
    }
  }
}

TEST(Store, InverseDirectionIsStoredFlipped) {
  Store store;
  store.insertTriple(triple("body/facB", vocab().ids().isSubdivisionOf,
                            fixtureIri("body/schoolA"), during("1963..")));
  const auto all = store.triples();
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0].subject, fixtureIri("body/schoolA"));
  EXPECT_EQ(all[0].property, vocab().ids().hasSubdivision);
  EXPECT_EQ(all[0].object, Term{fixtureIri("body/facB")});
}

TEST(Store, ValidationErrors) {
  Store store;
  const auto& ids = vocab().ids();
  store.insertTriple(triple("person/pA", ids.kind, vocab().kindTerm(EntityKind::Person),
                            Validity::always()));
  store.insertTriple(triple("body/uy", ids.kind,
                            vocab().kindTerm(EntityKind::CorporateBody),
                            Validity::always()));
  // pA is a person, so it cannot be subdivided.
  EXPECT_EQ(errorCodeOf([&] {
              store.insertTriple(triple("body/uy", ids.hasSubdivision,
                                        fixtureIri("person/pA"), during("2000..")));
            }),
            ErrorCode::KindMismatch);
  // Kind assertions that contradict earlier usage are caught too.
  EXPECT_EQ(errorCodeOf([&] {
              store.insertTriple(triple("person/pA", ids.kind,
                                        vocab().kindTerm(EntityKind::Work),
                                        Validity::always()));
            }),
            ErrorCode::KindMismatch);
  EXPECT_EQ(errorCodeOf([&] {
              store.insertTriple(triple("person/pA", ids.isProfessorAt,
                                        fixtureIri("body/uy"), Validity::always()));
            }),
            ErrorCode::InvalidTriple);
  EXPECT_EQ(errorCodeOf([&] {
              store.insertTriple(triple("body/uy", ids.changedTo, fixtureIri("body/uz"),
                                        during("1990..1991")));
            }),
            ErrorCode::InvalidTriple);
  EXPECT_EQ(errorCodeOf([&] {
              store.insertTriple(triple("person/pA", Iri::parse("http://e.org/p"),
                                        fixtureIri("body/uy"), Validity::always()));
            }),
            ErrorCode::UnknownProperty);
  EXPECT_EQ(errorCodeOf([&] {
              store.insertTriple(triple("body/uy", ids.establishedIn,
                                        Literal::string("1963"), Validity::always()));
            }),
            ErrorCode::KindMismatch);
  EXPECT_EQ(store.size(), 2u);
}

TEST(Store, MatchPatternOnFixture) {
  const auto store = fixtureStore();
  const auto& ids = store.vocab().ids();

  const auto studied = pattern(fixtureIri("person/pA"), ids.isStudentOf, std::nullopt,
                               TimeConstraint::at(TimePoint::make(1998)));
  const auto m = store.matchPattern(studied);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].triple.object, Term{fixtureIri("body/facB")});
  EXPECT_EQ(m[0].triple.validity, during("1996..2000"));

  const auto women = pattern({}, ids.hasGender, Term{fixtureIri("gender/female")});
  std::vector<Iri> subjects;
  for (const auto& x : store.matchPattern(women)) subjects.push_back(x.triple.subject);
  EXPECT_EQ(subjects, (std::vector{fixtureIri("person/pB"), fixtureIri("person/pC")}));

  auto parent = pattern(fixtureIri("body/facB"), ids.isSubdivisionOf, std::nullopt,
                        std::nullopt, Inference::Inverse);
  const auto derived = store.matchPattern(parent);
  ASSERT_EQ(derived.size(), 1u);
  EXPECT_TRUE(derived[0].derived);
  EXPECT_EQ(derived[0].triple.object, Term{fixtureIri("body/schoolA")});
  parent.inference = Inference::None;
  EXPECT_TRUE(store.matchPattern(parent).empty());

  EXPECT_EQ(errorCodeOf([&] {
              store.matchPattern(pattern({}, Iri::parse("http://e.org/p")));
            }),
            ErrorCode::UnknownProperty);
}

TEST(Store, MatchPatternTimeModes) {
  const auto store = fixtureStore();
  const auto& ids = store.vocab().ids();
  const auto count = [&](TimeConstraint tc) {
    return store.matchPattern(pattern(fixtureIri("person/pA"), ids.isStudentOf,
                                      std::nullopt, tc))
        .size();
  };
  EXPECT_EQ(count(TimeConstraint::overlaps(TimeInterval::parse("1995..1997"))), 2u);
  EXPECT_EQ(count(TimeConstraint::during(TimeInterval::parse("1997..1999"))), 1u);
  EXPECT_EQ(count(TimeConstraint::during(TimeInterval::parse("1995..1997"))), 0u);
  EXPECT_EQ(count(TimeConstraint::at(TimePoint::make(2001))), 0u);
}

TEST(Store, MatchResultsAreCanonicallySorted) {
  std::mt19937 rng(11);
  const auto store = testing::randomStore(rng);
  const auto all = store.matchPattern(everything());
  for (std::size_t i = 1; i < all.size(); ++i) {
    EXPECT_FALSE(canonicalLess(all[i].triple, all[i - 1].triple));
  }
}

// Flipping every derived match gives back a stored triple.
TEST(Store, DerivedMatchesFlipToStoredTriples) {
  std::mt19937 rng(5);
  for (int round = 0; round < 20; ++round) {
    const auto store = testing::randomStore(rng);
    const auto stored = store.triples();
    for (const auto& m : store.matchPattern(everything())) {
      if (!m.derived) continue;
      const auto& def = store.vocab().get(m.triple.property);
      ASSERT_TRUE(def.inverseId);
      const TemporalTriple flipped{std::get<Iri>(m.triple.object), *def.inverseId,
                                   Term{m.triple.subject}, m.triple.validity,
                                   m.triple.provenance};
      EXPECT_NE(std::find(stored.begin(), stored.end(), flipped), stored.end());
    }
  }
}

TEST(Store, SnapshotOnFixture) {
  const auto store = fixtureStore();
  const auto& ids = store.vocab().ids();
  const auto has = [](const std::vector<TemporalTriple>& snap, const Iri& s,
                      const Iri& p, const Iri& o) {
    return std::any_of(snap.begin(), snap.end(), [&](const TemporalTriple& t) {
      return t.subject == s && t.property == p && t.object == Term{o};
    });
  };
  const auto y1998 = store.snapshotAt(TimePoint::make(1998));
  EXPECT_TRUE(has(y1998, fixtureIri("person/pA"), ids.isStudentOf, fixtureIri("body/facB")));
  EXPECT_FALSE(has(y1998, fixtureIri("person/pA"), ids.isProfessorAt, fixtureIri("body/uy")));
  const auto y2009 = store.snapshotAt(TimePoint::make(2009));
  EXPECT_TRUE(has(y2009, fixtureIri("person/pD"), ids.isStudentOf, fixtureIri("body/uy")));
  EXPECT_TRUE(has(y2009, fixtureIri("person/pA"), ids.isProfessorAt, fixtureIri("body/uy")));
  EXPECT_TRUE(Store().snapshotAt(TimePoint::make(2000)).empty());
}

// Brute-force filtering by day enumeration, probing the fixture boundaries
// and random days of random stores.
TEST(Store, SnapshotMatchesDayFilter) {
  const DayOracle days(1940, 2040);
  const auto check = [&](const Store& store, const TimePoint& t) {
    std::vector<TemporalTriple> expected;
    for (const auto& x : store.triples()) {
      if (days.contains(x.validity, t)) expected.push_back(x);
    }
    ASSERT_EQ(store.snapshotAt(t), expected) << t.toString();
  };

  const auto fixture = fixtureStore();
  for (const auto& x : fixture.triples()) {
    const auto& iv = x.validity.interval();
    if (!iv) continue;
    for (const auto& bound : {iv->start(), iv->end()}) {
      if (!bound) continue;
      check(fixture, *bound);
      check(fixture, TimePoint::make(bound->year() - 1));
      check(fixture, TimePoint::make(bound->year() + 1));
    }
  }

  std::mt19937 rng(99);
  for (int i = 0; i < 100; ++i) {
    const auto store = testing::randomStore(rng);
    check(store, testing::randomPoint(rng, 1970, 2020));
  }
}

// Splitting each stored statement into pieces and inserting the pieces in
// random order reproduces the store exactly.
TEST(Store, CoalescingIsOrderIndependent) {
  std::mt19937 rng(3);
  for (int round = 0; round < 30; ++round) {
    const auto store = testing::randomStore(rng);
    std::vector<TemporalTriple> pieces;
    for (const auto& t : store.triples()) {
      const auto& iv = t.validity.interval();
      if (!iv || !iv->start() || !iv->end() || iv->start()->month() ||
          iv->end()->month() || iv->start()->year() == iv->end()->year()) {
        pieces.push_back(t);
        continue;
      }
      const int a = iv->start()->year();
      const int b = iv->end()->year();
      const int cut = std::uniform_int_distribution<int>(a, b - 1)(rng);
      auto left = t;
      left.validity = Validity::during(
          TimeInterval::make(iv->start(), TimePoint::make(cut)));
      auto right = t;
      // Overlap the pieces by a year half of the time.
      const int from = std::uniform_int_distribution<int>(0, 1)(rng) ? cut : cut + 1;
      right.validity = Validity::during(
          TimeInterval::make(TimePoint::make(from), iv->end()));
      pieces.push_back(left);
      pieces.push_back(right);
    }
    std::shuffle(pieces.begin(), pieces.end(), rng);
    Store rebuilt(store.base());
    for (const auto& p : pieces) rebuilt.insertTriple(p);
    ASSERT_EQ(exportQuads(rebuilt), exportQuads(store));

    // Re-inserting everything changes nothing.
    for (const auto& t : store.triples()) {
      ASSERT_EQ(rebuilt.insertTriple(t).outcome, InsertOutcome::Duplicate);
    }
    ASSERT_EQ(rebuilt.triples(), store.triples());
  }
}

TEST(Store, EntitiesOfKindOnFixture) {
  const auto store = fixtureStore();
  EXPECT_EQ(store.entitiesOfKind(EntityKind::Person),
            (std::vector{fixtureIri("person/pA"), fixtureIri("person/pB"),
                         fixtureIri("person/pC"), fixtureIri("person/pD")}));
  EXPECT_TRUE(store.entitiesOfKind(EntityKind::Place).empty());
  EXPECT_EQ(store.entitiesOfKind(EntityKind::CorporateBody).size(), 5u);
  EXPECT_EQ(store.entitiesOfKind(EntityKind::Work).size(), 3u);
}

TEST(Store, CopiesAreIndependent) {
  auto store = fixtureStore();
  const auto copy = store;
  store.insertTriple(triple("person/pA", store.vocab().ids().label,
                            Literal::string("A."), Validity::always()));
  EXPECT_EQ(copy.size() + 1, store.size());
  EXPECT_EQ(copy.objectsOf(fixtureIri("person/pA"), copy.vocab().ids().label).size(), 1u);
}

}  // namespace
}  // namespace etd
