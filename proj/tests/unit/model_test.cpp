#include <gtest/gtest.h>

#include <random>

#include "etd/model.hpp"
#include "support.hpp"

namespace etd {
namespace {

using testing::DayOracle;
using testing::errorCodeOf;

TEST(Iri, AcceptsHttpAndHttps) {
  EXPECT_EQ(Iri::parse("http://example.org/etd/person/pA").str(),
            "http://example.org/etd/person/pA");
  EXPECT_EQ(Iri::parse("https://example.org").str(), "https://example.org");
}

TEST(Iri, RejectsMalformedText) {
  for (const auto* bad : {"", "example.org/x", "ftp://example.org", "http://",
                          "http://ex ample.org", "http://example.org/<x>",
                          "http://example.org/%zz", "http://example.org/%4"}) {
    EXPECT_EQ(errorCodeOf([&] { Iri::parse(bad); }), ErrorCode::InvalidIri) << bad;
  }
}

TEST(Iri, NormalizesPercentEncoding) {
  EXPECT_EQ(Iri::parse("http://example.org/a%2fb").str(), "http://example.org/a%2Fb");
  EXPECT_EQ(Iri::parse("http://example.org/\xC3\xA9").str(),
            "http://example.org/%C3%A9");
  const auto once = normalizePercentEncoding("http://x.org/%c3%a9\xC3\xA9");
  EXPECT_EQ(normalizePercentEncoding(once), once);
}

TEST(Iri, PercentEncodeKeepsOnlyUnreserved) {
  EXPECT_EQ(percentEncode("phd-D_1.x~"), "phd-D_1.x~");
  EXPECT_EQ(percentEncode("a b/c"), "a%20b%2Fc");
  EXPECT_EQ(percentEncode("\xC3\xA9"), "%C3%A9");
}

TEST(TimePoint, ParsesEachPrecision) {
  EXPECT_EQ(TimePoint::parse("1996"), TimePoint::make(1996));
  EXPECT_EQ(TimePoint::parse("2006-09"), TimePoint::make(2006, 9));
  EXPECT_EQ(TimePoint::parse("2000-02-29"), TimePoint::make(2000, 2, 29));
  EXPECT_EQ(TimePoint::make(812, 3).toString(), "0812-03");
}

TEST(TimePoint, RejectsImpossibleDates) {
  EXPECT_EQ(errorCodeOf([] { TimePoint::make(1900, 2, 29); }), ErrorCode::InvalidDate);
  EXPECT_EQ(errorCodeOf([] { TimePoint::make(2001, 13); }), ErrorCode::InvalidDate);
  EXPECT_EQ(errorCodeOf([] { TimePoint::make(0); }), ErrorCode::InvalidDate);
  EXPECT_EQ(errorCodeOf([] { TimePoint::parse("96"); }), ErrorCode::InvalidDate);
  EXPECT_EQ(errorCodeOf([] { TimePoint::parse("1996-1"); }), ErrorCode::InvalidDate);
  try {
    TimePoint::make(2001, 4, 31);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("day"), std::string::npos) << e.what();
  }
}

TEST(TimePoint, DayRangesCoverTheWholePeriod) {
  const auto y = TimePoint::make(2000);
  EXPECT_EQ(y.lastDay() - y.firstDay() + 1, 366);
  const auto feb = TimePoint::make(1900, 2);
  EXPECT_EQ(feb.lastDay() - feb.firstDay() + 1, 28);
  EXPECT_EQ(TimePoint::make(1970, 1, 1).firstDay(), 0);
}

TEST(TimeInterval, ParsesAndPrints) {
  EXPECT_EQ(TimeInterval::parse("1996..2000").toString(), "1996..2000");
  EXPECT_EQ(TimeInterval::parse("2006..").toString(), "2006..");
  EXPECT_EQ(TimeInterval::parse("..2000").toString(), "..2000");
  EXPECT_TRUE(TimeInterval::parse("2005").isInstant());
  EXPECT_EQ(errorCodeOf([] { TimeInterval::parse(".."); }), ErrorCode::InvalidInterval);
  EXPECT_EQ(errorCodeOf([] { TimeInterval::parse("2000..1996"); }),
            ErrorCode::InvalidInterval);
}

TEST(TimeInterval, MixedPrecisionBoundsCompareByDays) {
  // 2000-05 lies inside the year 2000, so this is a valid interval.
  EXPECT_NO_THROW(TimeInterval::make(TimePoint::make(2000), TimePoint::make(2000, 5)));
  EXPECT_TRUE(intervalContains(TimeInterval::parse("1996..2000"),
                               TimePoint::make(2000, 12, 31)));
  EXPECT_FALSE(intervalContains(TimeInterval::parse("1996..2000-06"),
                                TimePoint::make(2000)));
}

TEST(TimeInterval, AdjacentIntervalsCoalesce) {
  const auto merged = mergeIfCoalescable(TimeInterval::parse("1990..1995"),
                                         TimeInterval::parse("1996..2000"));
  ASSERT_TRUE(merged);
  EXPECT_EQ(merged->toString(), "1990..2000");
  EXPECT_FALSE(mergeIfCoalescable(TimeInterval::parse("1990..1994"),
                                  TimeInterval::parse("1996..2000")));
  const auto open = mergeIfCoalescable(TimeInterval::parse("2006.."),
                                       TimeInterval::parse("2001..2007"));
  ASSERT_TRUE(open);
  EXPECT_EQ(open->toString(), "2001..");
}

TEST(TimeInterval, UnboundedUnionIsAlways) {
  const auto a = TimeInterval::parse("..1990");
  const auto b = TimeInterval::parse("1985..");
  EXPECT_FALSE(mergeIfCoalescable(a, b));
  EXPECT_EQ(mergeValidities(Validity::during(a), Validity::during(b)),
            Validity::always());
}

TEST(TimeInterval, MergeIsOrderIndependent) {
  // Equal day ranges written at different precisions.
  const auto a = TimeInterval::parse("1990..2000");
  const auto b = TimeInterval::parse("1990-01..2000-12-31");
  EXPECT_EQ(mergeIfCoalescable(a, b), mergeIfCoalescable(b, a));
}

// Each operation against explicit day enumeration.
TEST(TimeInterval, OperationsMatchDayEnumeration) {
  const DayOracle days(1960, 2030);
  std::mt19937 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const auto a = testing::randomInterval(rng, 1970, 2020, 0.2);
    const auto b = testing::randomInterval(rng, 1970, 2020, 0.2);
    const auto t = testing::randomPoint(rng, 1970, 2020);
    ASSERT_EQ(intervalContains(a, t), days.contains(Validity::during(a), t))
        << a.toString() << " " << t.toString();
    ASSERT_EQ(intervalsOverlap(a, b), days.overlaps(Validity::during(a), b))
        << a.toString() << " " << b.toString();

    const auto ma = days.members(days.span(a));
    const auto mb = days.members(days.span(b));
    std::vector<bool> both(ma.size());
    for (std::size_t d = 0; d < ma.size(); ++d) both[d] = ma[d] || mb[d];
    const auto first = std::find(both.begin(), both.end(), true);
    const auto last = std::find(both.rbegin(), both.rend(), true).base();
    const bool contiguous = std::find(first, last, false) == last;
    const bool allTime = contiguous && both.front() && both.back();
    const auto merged = mergeIfCoalescable(a, b);
    ASSERT_EQ(merged.has_value(), contiguous && !allTime)
        << a.toString() << " " << b.toString();
    if (merged) {
      ASSERT_EQ(days.members(days.span(*merged)), both);
    }
    const auto mergedValidity =
        mergeValidities(Validity::during(a), Validity::during(b));
    ASSERT_EQ(mergedValidity.has_value(), contiguous);
    if (mergedValidity) {
      ASSERT_EQ(days.members(days.span(*mergedValidity)), both);
    }
  }
}

TEST(Validity, AlwaysAdmitsEverything) {
  const auto v = Validity::always();
  EXPECT_TRUE(v.contains(TimePoint::make(1)));
  EXPECT_TRUE(v.overlaps(TimeInterval::parse("..0005")));
  EXPECT_EQ(v.toString(), "always");
  EXPECT_EQ(Validity::during(TimeInterval::parse("1996..2000")).toString(),
            "1996..2000");
}

TEST(Literal, ValidatesLexicalForms) {
  EXPECT_NO_THROW(Literal::make("1963", LiteralDatatype::Year));
  EXPECT_NO_THROW(Literal::make("-12", LiteralDatatype::Integer));
  EXPECT_NO_THROW(Literal::make("2001-02-28", LiteralDatatype::Date));
  EXPECT_NO_THROW(Literal::make("Faculty", LiteralDatatype::String, "en"));
  EXPECT_EQ(errorCodeOf([] { Literal::make("63", LiteralDatatype::Year); }),
            ErrorCode::InvalidLiteral);
  EXPECT_EQ(errorCodeOf([] { Literal::make("1.5", LiteralDatatype::Integer); }),
            ErrorCode::InvalidLiteral);
  EXPECT_EQ(errorCodeOf([] { Literal::make("2001-02-29", LiteralDatatype::Date); }),
            ErrorCode::InvalidLiteral);
  EXPECT_EQ(errorCodeOf([] { Literal::make("1963", LiteralDatatype::Year, "en"); }),
            ErrorCode::InvalidLiteral);
}

TEST(Literal, NTriplesEscaping) {
  EXPECT_EQ(toNTriples(Literal::string("a\"b\\c\nd\re\tf")),
            "\"a\\\"b\\\\c\\nd\\re\\tf\"");
  EXPECT_EQ(toNTriples(Literal::year(1963)),
            "\"1963\"^^<http://www.w3.org/2001/XMLSchema#gYear>");
  EXPECT_EQ(toNTriples(Literal::make("x", LiteralDatatype::String, "el")), "\"x\"@el");
  EXPECT_EQ(toNTriples(Iri::parse("http://e.org/a")), "<http://e.org/a>");
}

TEST(TemporalTriple, CanonicalOrderIsStrictWeak) {
  const auto s = Iri::parse("http://e.org/s");
  const auto p = Iri::parse("http://e.org/p");
  const ProvenanceTag prov{"r", s, std::nullopt};
  const TemporalTriple early{s, p, Term{s}, Validity::during(TimeInterval::parse("1990..1991")),
                             prov};
  const TemporalTriple late{s, p, Term{s}, Validity::during(TimeInterval::parse("1995..1996")),
                            prov};
  EXPECT_TRUE(canonicalLess(early, late));
  EXPECT_FALSE(canonicalLess(late, early));
  EXPECT_FALSE(canonicalLess(early, early));
}

TEST(ProvenanceTag, NeedsASource) {
  const ProvenanceTag tag{"", Iri::parse("http://e.org"), std::nullopt};
  EXPECT_EQ(errorCodeOf([&] { tag.validate(); }), ErrorCode::InvalidTriple);
}

}  // namespace
}  // namespace etd
