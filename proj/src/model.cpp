#include "etd/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace etd {

std::string_view errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidDate: return "InvalidDate";
    case ErrorCode::InvalidIri: return "InvalidIri";
    case ErrorCode::InvalidLiteral: return "InvalidLiteral";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::UnknownProperty: return "UnknownProperty";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::InvalidTriple: return "InvalidTriple";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::MissingRequiredKey: return "MissingRequiredKey";
    case ErrorCode::DuplicateLocalId: return "DuplicateLocalId";
    case ErrorCode::InvalidLocalId: return "InvalidLocalId";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::HierarchyCycle: return "HierarchyCycle";
    case ErrorCode::NotABody: return "NotABody";
    case ErrorCode::NotAPerson: return "NotAPerson";
    case ErrorCode::SequenceCycle: return "SequenceCycle";
    case ErrorCode::AmbiguousSuccession: return "AmbiguousSuccession";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnboundSelectVariable: return "UnboundSelectVariable";
    case ErrorCode::DanglingContext: return "DanglingContext";
    case ErrorCode::PortInUse: return "PortInUse";
    case ErrorCode::IoError: return "IoError";
  }
  return "Error";
}

std::string Error::format(ErrorCode code, const std::string& message,
                          std::size_t line, std::size_t column) {
  std::string out(errorCodeName(code));
  out += ": ";
  out += message;
  if (line != 0) {
    out += " (line " + std::to_string(line);
    if (column != 0) out += ", column " + std::to_string(column);
    out += ")";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Iri

namespace {

constexpr char kHex[] = "0123456789ABCDEF";

bool isHex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

bool isUnreserved(unsigned char c) {
  return std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~';
}

void appendEscape(std::string& out, unsigned char c) {
  out += '%';
  out += kHex[c >> 4];
  out += kHex[c & 0x0F];
}

}  // namespace

std::string normalizePercentEncoding(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c == '%' && i + 2 < text.size() && isHex(text[i + 1]) &&
        isHex(text[i + 2])) {
      out += '%';
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(text[i + 1])));
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(text[i + 2])));
      i += 2;
    } else if (c >= 0x80) {
      appendEscape(out, c);
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::string percentEncode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (isUnreserved(c)) {
      out += ch;
    } else {
      appendEscape(out, c);
    }
  }
  return out;
}

Iri Iri::parse(std::string_view text) {
  std::size_t schemeLen = 0;
  if (text.starts_with("http://")) {
    schemeLen = 7;
  } else if (text.starts_with("https://")) {
    schemeLen = 8;
  } else {
    throw Error(ErrorCode::InvalidIri,
                "IRI must start with http:// or https://: '" +
                    std::string(text) + "'");
  }
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c <= 0x20 || c == 0x7F) {
      throw Error(ErrorCode::InvalidIri,
                  "whitespace or control character in IRI '" +
                      std::string(text) + "'");
    }
    if (std::string_view("<>\"{}|\\^`").find(static_cast<char>(c)) !=
        std::string_view::npos) {
      throw Error(ErrorCode::InvalidIri, "character '" +
                                             std::string(1, static_cast<char>(c)) +
                                             "' not allowed in IRI");
    }
    if (c == '%' && !(i + 2 < text.size() && isHex(text[i + 1]) &&
                      isHex(text[i + 2]))) {
      throw Error(ErrorCode::InvalidIri,
                  "malformed percent escape in IRI '" + std::string(text) + "'");
    }
  }
  const auto rest = text.substr(schemeLen);
  const auto authorityEnd = rest.find_first_of("/?#");
  if (rest.substr(0, authorityEnd).empty()) {
    throw Error(ErrorCode::InvalidIri,
                "IRI has an empty authority: '" + std::string(text) + "'");
  }
  return Iri(normalizePercentEncoding(text));
}

// ---------------------------------------------------------------------------
// Calendar

DayNumber daysFromCivil(int year, int month, int day) {
  // Howard Hinnant's days_from_civil.
  const std::int64_t y = static_cast<std::int64_t>(year) - (month <= 2 ? 1 : 0);
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const std::int64_t yoe = y - era * 400;
  const std::int64_t mp = (month + 9) % 12;
  const std::int64_t doy = (153 * mp + 2) / 5 + day - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

int daysInMonth(int year, int month) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (month == 2) {
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return kDays[static_cast<std::size_t>(month - 1)];
}

TimePoint TimePoint::make(int year, std::optional<int> month,
                          std::optional<int> day) {
  if (year < 1 || year > 9999) {
    throw Error(ErrorCode::InvalidDate,
                "year " + std::to_string(year) + " outside 1..9999");
  }
  if (day && !month) {
    throw Error(ErrorCode::InvalidDate, "day given without month");
  }
  if (month && (*month < 1 || *month > 12)) {
    throw Error(ErrorCode::InvalidDate,
                "month " + std::to_string(*month) + " outside 1..12");
  }
  if (day && (*day < 1 || *day > daysInMonth(year, *month))) {
    throw Error(ErrorCode::InvalidDate,
                "day " + std::to_string(*day) + " invalid for " +
                    std::to_string(year) + "-" + std::to_string(*month));
  }
  return TimePoint(year, month, day);
}

namespace {

std::optional<int> parseDigits(std::string_view s, std::size_t width) {
  if (s.size() != width) return std::nullopt;
  if (!std::all_of(s.begin(), s.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  int value = 0;
  std::from_chars(s.data(), s.data() + s.size(), value);
  return value;
}

}  // namespace

TimePoint TimePoint::parse(std::string_view text) {
  const auto fail = [&]() -> TimePoint {
    throw Error(ErrorCode::InvalidDate,
                "expected YYYY[-MM[-DD]], got '" + std::string(text) + "'");
  };
  if (text.size() != 4 && text.size() != 7 && text.size() != 10) return fail();
  const auto year = parseDigits(text.substr(0, 4), 4);
  if (!year) return fail();
  std::optional<int> month;
  std::optional<int> day;
  if (text.size() >= 7) {
    if (text[4] != '-') return fail();
    month = parseDigits(text.substr(5, 2), 2);
    if (!month) return fail();
  }
  if (text.size() == 10) {
    if (text[7] != '-') return fail();
    day = parseDigits(text.substr(8, 2), 2);
    if (!day) return fail();
  }
  return make(*year, month, day);
}

DayNumber TimePoint::firstDay() const {
  return daysFromCivil(year_, month_.value_or(1), day_.value_or(1));
}

DayNumber TimePoint::lastDay() const {
  if (day_) return daysFromCivil(year_, *month_, *day_);
  if (month_) return daysFromCivil(year_, *month_, daysInMonth(year_, *month_));
  return daysFromCivil(year_, 12, 31);
}

std::string TimePoint::toString() const {
  char buf[16];
  if (day_) {
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year_, *month_, *day_);
  } else if (month_) {
    std::snprintf(buf, sizeof buf, "%04d-%02d", year_, *month_);
  } else {
    std::snprintf(buf, sizeof buf, "%04d", year_);
  }
  return buf;
}

// ---------------------------------------------------------------------------
// Intervals

TimeInterval TimeInterval::make(std::optional<TimePoint> start,
                                std::optional<TimePoint> end) {
  if (!start && !end) {
    throw Error(ErrorCode::InvalidInterval,
                "interval needs at least one bound");
  }
  if (start && end && start->firstDay() > end->lastDay()) {
    throw Error(ErrorCode::InvalidInterval, "interval start " +
                                                start->toString() +
                                                " is after end " +
                                                end->toString());
  }
  return TimeInterval(std::move(start), std::move(end));
}

TimeInterval TimeInterval::parse(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    return instant(TimePoint::parse(text));
  }
  const auto left = text.substr(0, dots);
  const auto right = text.substr(dots + 2);
  std::optional<TimePoint> start;
  std::optional<TimePoint> end;
  if (!left.empty()) start = TimePoint::parse(left);
  if (!right.empty()) end = TimePoint::parse(right);
  return make(start, end);
}

DayRange TimeInterval::days() const {
  return {start_ ? start_->firstDay() : kMinusInfinity,
          end_ ? end_->lastDay() : kPlusInfinity};
}

std::string TimeInterval::toString() const {
  std::string out;
  if (start_) out += start_->toString();
  out += "..";
  if (end_) out += end_->toString();
  return out;
}

bool intervalContains(const TimeInterval& iv, const TimePoint& t) {
  const auto range = iv.days();
  return range.first <= t.firstDay() && t.lastDay() <= range.last;
}

bool intervalsOverlap(const TimeInterval& a, const TimeInterval& b) {
  const auto ra = a.days();
  const auto rb = b.days();
  return ra.first <= rb.last && rb.first <= ra.last;
}

namespace {

bool adjacent(const DayRange& earlier, const DayRange& later) {
  return earlier.last != kPlusInfinity && later.first != kMinusInfinity &&
         earlier.last + 1 == later.first;
}

// Among bounds reaching the same day, prefer the smallest representation so
// the merged result does not depend on argument order.
std::optional<TimePoint> pickStart(const std::optional<TimePoint>& a,
                                   const std::optional<TimePoint>& b) {
  if (!a || !b) return std::nullopt;
  const auto da = a->firstDay();
  const auto db = b->firstDay();
  if (da != db) return da < db ? a : b;
  return std::min(*a, *b);
}

std::optional<TimePoint> pickEnd(const std::optional<TimePoint>& a,
                                 const std::optional<TimePoint>& b) {
  if (!a || !b) return std::nullopt;
  const auto da = a->lastDay();
  const auto db = b->lastDay();
  if (da != db) return da > db ? a : b;
  return std::min(*a, *b);
}

}  // namespace

std::optional<TimeInterval> mergeIfCoalescable(const TimeInterval& a,
                                               const TimeInterval& b) {
  const auto ra = a.days();
  const auto rb = b.days();
  const bool overlap = ra.first <= rb.last && rb.first <= ra.last;
  if (!overlap && !adjacent(ra, rb) && !adjacent(rb, ra)) return std::nullopt;
  auto start = pickStart(a.start(), b.start());
  auto end = pickEnd(a.end(), b.end());
  if (!start && !end) return std::nullopt;
  return TimeInterval::make(std::move(start), std::move(end));
}

std::optional<Validity> mergeValidities(const Validity& a, const Validity& b) {
  if (a.isAlways() || b.isAlways()) return Validity::always();
  if (auto merged = mergeIfCoalescable(*a.interval(), *b.interval())) {
    return Validity::during(std::move(*merged));
  }
  const auto ra = a.days();
  const auto rb = b.days();
  const bool touching = (ra.first <= rb.last && rb.first <= ra.last) ||
                        adjacent(ra, rb) || adjacent(rb, ra);
  if (touching) return Validity::always();
  return std::nullopt;
}

DayRange Validity::days() const {
  if (!interval_) return {kMinusInfinity, kPlusInfinity};
  return interval_->days();
}

bool Validity::contains(const TimePoint& t) const {
  return !interval_ || intervalContains(*interval_, t);
}

bool Validity::overlaps(const TimeInterval& iv) const {
  return !interval_ || intervalsOverlap(*interval_, iv);
}

bool Validity::covers(const TimeInterval& iv) const {
  if (!interval_) return true;
  const auto mine = interval_->days();
  const auto theirs = iv.days();
  return mine.first <= theirs.first && theirs.last <= mine.last;
}

std::string Validity::toString() const {
  return interval_ ? interval_->toString() : "always";
}

// ---------------------------------------------------------------------------
// Literals

std::string_view datatypeName(LiteralDatatype dt) {
  switch (dt) {
    case LiteralDatatype::String: return "string";
    case LiteralDatatype::Integer: return "integer";
    case LiteralDatatype::Year: return "year";
    case LiteralDatatype::Date: return "date";
  }
  return "string";
}

std::string_view datatypeIri(LiteralDatatype dt) {
  switch (dt) {
    case LiteralDatatype::String:
      return "http://www.w3.org/2001/XMLSchema#string";
    case LiteralDatatype::Integer:
      return "http://www.w3.org/2001/XMLSchema#integer";
    case LiteralDatatype::Year:
      return "http://www.w3.org/2001/XMLSchema#gYear";
    case LiteralDatatype::Date:
      return "http://www.w3.org/2001/XMLSchema#date";
  }
  return {};
}

namespace {

bool validLanguageTag(std::string_view tag) {
  if (tag.empty()) return false;
  std::size_t partLen = 0;
  bool first = true;
  for (char c : tag) {
    if (c == '-') {
      if (partLen == 0) return false;
      partLen = 0;
      first = false;
      continue;
    }
    const auto u = static_cast<unsigned char>(c);
    if (first ? !std::isalpha(u) : !std::isalnum(u)) return false;
    if (++partLen > 8) return false;
  }
  return partLen != 0;
}

}  // namespace

Literal Literal::make(std::string lexical, LiteralDatatype datatype,
                      std::optional<std::string> language) {
  const auto bad = [&](const std::string& why) {
    return Error(ErrorCode::InvalidLiteral,
                 "'" + lexical + "' is not a valid " +
                     std::string(datatypeName(datatype)) + ": " + why);
  };
  if (language) {
    if (datatype != LiteralDatatype::String) {
      throw bad("language tags only apply to strings");
    }
    if (!validLanguageTag(*language)) throw bad("malformed language tag");
  }
  switch (datatype) {
    case LiteralDatatype::String:
      break;
    case LiteralDatatype::Integer: {
      std::string_view digits = lexical;
      if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
      if (digits.empty() ||
          !std::all_of(digits.begin(), digits.end(),
                       [](char c) { return c >= '0' && c <= '9'; })) {
        throw bad("expected decimal digits");
      }
      break;
    }
    case LiteralDatatype::Year: {
      const auto y = parseDigits(lexical, 4);
      if (!y || *y == 0) throw bad("expected a 4-digit year");
      break;
    }
    case LiteralDatatype::Date: {
      if (lexical.size() != 10) throw bad("expected YYYY-MM-DD");
      try {
        TimePoint::parse(lexical);
      } catch (const Error& e) {
        throw bad(e.detail());
      }
      break;
    }
  }
  return Literal(std::move(lexical), datatype, std::move(language));
}

Literal Literal::year(int year) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%04d", year);
  return make(buf, LiteralDatatype::Year);
}

std::string escapeNTriplesString(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string toNTriples(const Term& term) {
  if (const auto* iri = std::get_if<Iri>(&term)) {
    return "<" + iri->str() + ">";
  }
  const auto& lit = std::get<Literal>(term);
  std::string out = "\"" + escapeNTriplesString(lit.lexical()) + "\"";
  if (lit.language()) {
    out += "@" + *lit.language();
  } else if (lit.datatype() != LiteralDatatype::String) {
    out += "^^<";
    out += datatypeIri(lit.datatype());
    out += ">";
  }
  return out;
}

void ProvenanceTag::validate() const {
  if (sourceRecordId.empty()) {
    throw Error(ErrorCode::InvalidTriple,
                "provenance needs a non-empty source record id");
  }
}

bool canonicalLess(const TemporalTriple& a, const TemporalTriple& b) {
  if (auto c = a.subject <=> b.subject; c != 0) return c < 0;
  if (auto c = a.property <=> b.property; c != 0) return c < 0;
  if (a.object != b.object) {
    const auto sa = toNTriples(a.object);
    const auto sb = toNTriples(b.object);
    if (sa != sb) return sa < sb;
  }
  const auto da = a.validity.days();
  const auto db = b.validity.days();
  if (da.first != db.first) return da.first < db.first;
  if (auto c = a.provenance.sourceRecordId <=> b.provenance.sourceRecordId;
      c != 0) {
    return c < 0;
  }
  if (auto c = a.provenance <=> b.provenance; c != 0) return c < 0;
  if (da.last != db.last) return da.last < db.last;
  return a.validity.toString() < b.validity.toString();
}

}  // namespace etd
