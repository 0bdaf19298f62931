#pragma once
// Core value types of the temporal graph: identifiers, calendar points and
// intervals, literals, provenance and the temporal triple itself.
//
// Time semantics: every TimePoint denotes a closed range of days in the
// proleptic Gregorian calendar (a year covers Jan 1..Dec 31, a month its
// first..last day). Intervals are closed on both ends; a missing bound is
// unbounded on that side. All comparisons between points of mixed precision
// go through these day ranges.

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "etd/error.hpp"

namespace etd {

// Absolute http(s) IRI. Construction validates and normalizes the text:
// non-ASCII bytes are percent-encoded and existing escapes get uppercase hex,
// so equality is plain byte equality.
class Iri {
 public:
  static Iri parse(std::string_view text);

  const std::string& str() const noexcept { return text_; }

  friend bool operator==(const Iri&, const Iri&) = default;
  friend std::strong_ordering operator<=>(const Iri& a, const Iri& b) {
    return a.text_.compare(b.text_) <=> 0;
  }

 private:
  explicit Iri(std::string text) : text_(std::move(text)) {}
  std::string text_;
};

// Normalizes percent escapes and encodes non-ASCII bytes. Idempotent.
std::string normalizePercentEncoding(std::string_view text);

// Percent-encodes everything outside the RFC 3986 unreserved set.
std::string percentEncode(std::string_view text);

// Day number relative to 1970-01-01 in the proleptic Gregorian calendar.
using DayNumber = std::int64_t;

inline constexpr DayNumber kMinusInfinity =
    std::numeric_limits<DayNumber>::min();
inline constexpr DayNumber kPlusInfinity =
    std::numeric_limits<DayNumber>::max();

DayNumber daysFromCivil(int year, int month, int day);
int daysInMonth(int year, int month);

class TimePoint {
 public:
  // Throws InvalidDate naming the offending field.
  static TimePoint make(int year, std::optional<int> month = std::nullopt,
                        std::optional<int> day = std::nullopt);
  // Parses `YYYY`, `YYYY-MM` or `YYYY-MM-DD`.
  static TimePoint parse(std::string_view text);

  int year() const noexcept { return year_; }
  std::optional<int> month() const noexcept { return month_; }
  std::optional<int> day() const noexcept { return day_; }

  DayNumber firstDay() const;
  DayNumber lastDay() const;

  std::string toString() const;

  friend bool operator==(const TimePoint&, const TimePoint&) = default;
  friend auto operator<=>(const TimePoint&, const TimePoint&) = default;

 private:
  TimePoint(int year, std::optional<int> month, std::optional<int> day)
      : year_(year), month_(month), day_(day) {}

  int year_;
  std::optional<int> month_;
  std::optional<int> day_;
};

struct DayRange {
  DayNumber first;
  DayNumber last;
};

class TimeInterval {
 public:
  // Throws InvalidInterval when both bounds are missing or start > end.
  static TimeInterval make(std::optional<TimePoint> start,
                           std::optional<TimePoint> end);
  static TimeInterval instant(TimePoint t) { return make(t, t); }
  // `start..end` with either side omittable, or a single point (an instant).
  static TimeInterval parse(std::string_view text);

  const std::optional<TimePoint>& start() const noexcept { return start_; }
  const std::optional<TimePoint>& end() const noexcept { return end_; }
  bool isInstant() const noexcept { return start_ && end_ && *start_ == *end_; }

  DayRange days() const;

  // `1996..2000`, `2006..`, `..2000`; instants print as `start..end` too.
  std::string toString() const;

  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;

 private:
  TimeInterval(std::optional<TimePoint> start, std::optional<TimePoint> end)
      : start_(std::move(start)), end_(std::move(end)) {}

  std::optional<TimePoint> start_;
  std::optional<TimePoint> end_;
};

bool intervalContains(const TimeInterval& iv, const TimePoint& t);
bool intervalsOverlap(const TimeInterval& a, const TimeInterval& b);
// Union of overlapping or adjacent intervals. Absent when they are apart,
// and also when the union has no bound at all (`..1990` with `1985..`),
// which no TimeInterval can hold; mergeValidities covers that case.
std::optional<TimeInterval> mergeIfCoalescable(const TimeInterval& a,
                                               const TimeInterval& b);

// Always, or During(interval).
class Validity {
 public:
  static Validity always() { return Validity(); }
  static Validity during(TimeInterval iv) { return Validity(std::move(iv)); }

  bool isAlways() const noexcept { return !interval_.has_value(); }
  const std::optional<TimeInterval>& interval() const noexcept {
    return interval_;
  }

  DayRange days() const;
  bool contains(const TimePoint& t) const;
  bool overlaps(const TimeInterval& iv) const;
  bool covers(const TimeInterval& iv) const;

  std::string toString() const;

  friend bool operator==(const Validity&, const Validity&) = default;

 private:
  Validity() = default;
  explicit Validity(TimeInterval iv) : interval_(std::move(iv)) {}

  std::optional<TimeInterval> interval_;
};

enum class LiteralDatatype { String, Integer, Year, Date };

std::string_view datatypeName(LiteralDatatype dt);
std::string_view datatypeIri(LiteralDatatype dt);

class Literal {
 public:
  // Validates the lexical form against the datatype. Language tags are only
  // allowed on strings.
  static Literal make(std::string lexical,
                      LiteralDatatype datatype = LiteralDatatype::String,
                      std::optional<std::string> language = std::nullopt);
  static Literal string(std::string lexical) { return make(std::move(lexical)); }
  static Literal year(int year);

  const std::string& lexical() const noexcept { return lexical_; }
  LiteralDatatype datatype() const noexcept { return datatype_; }
  const std::optional<std::string>& language() const noexcept {
    return language_;
  }

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;

 private:
  Literal(std::string lexical, LiteralDatatype datatype,
          std::optional<std::string> language)
      : lexical_(std::move(lexical)),
        datatype_(datatype),
        language_(std::move(language)) {}

  std::string lexical_;
  LiteralDatatype datatype_;
  std::optional<std::string> language_;
};

// Union of two validities that overlap or touch; an unbounded union is
// Always.
std::optional<Validity> mergeValidities(const Validity& a, const Validity& b);

// Object position of a triple.
using Term = std::variant<Iri, Literal>;

// N-Triples form: `<iri>` or `"escaped"` with `@lang` / `^^<datatype>`.
std::string toNTriples(const Term& term);
std::string escapeNTriplesString(std::string_view text);

struct ProvenanceTag {
  std::string sourceRecordId;
  Iri assertingAuthority;
  std::optional<TimePoint> assertedAt;

  // Throws InvalidTriple when sourceRecordId is empty.
  void validate() const;

  friend bool operator==(const ProvenanceTag&, const ProvenanceTag&) = default;
  friend auto operator<=>(const ProvenanceTag&, const ProvenanceTag&) = default;
};

struct TemporalTriple {
  Iri subject;
  Iri property;
  Term object;
  Validity validity;
  ProvenanceTag provenance;

  friend bool operator==(const TemporalTriple&, const TemporalTriple&) = default;
};

// Canonical order: subject, property, serialized object, validity start day,
// then provenance and the remaining validity fields as tie breakers.
bool canonicalLess(const TemporalTriple& a, const TemporalTriple& b);

}  // namespace etd
