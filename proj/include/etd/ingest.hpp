#pragma once
// Flat ETD records and their deconstruction into entities and temporal
// triples.
//
// Record format (UTF-8, LF line endings). Records are separated by blank
// lines; `#` starts a comment line. Every line is `key SP value`; the first
// line of a record is `id LOCALID` and the second `type person|body|work`.
//
//   person: name[@interval]* gender VALUE[@interval]* student-of BODY@interval*
//           professor-at BODY@interval* birth-place PLACE same-as IRI*
//   body:   name[@interval]* body-kind university|school|faculty|other
//           established YYYY subdivision-of BODY@interval*
//           changed-to BODY@point* same-as IRI*
//   work:   title work-kind master|phd dissertant PERSON study interval
//           advisor PERSON* committee PERSON* grantor BODY* same-as IRI*
//           related-to IRI*
//
// Intervals are `start..end` with either side omittable; points are
// `YYYY[-MM[-DD]]`.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "etd/model.hpp"
#include "etd/store.hpp"
#include "etd/vocab.hpp"

namespace etd {

enum class RecordKind { Person, Body, Work };

std::string_view recordKindName(RecordKind k);
EntityKind entityKindOf(RecordKind k);

struct RecordField {
  std::string key;
  std::string value;
  std::size_t line = 0;

  // Line numbers are diagnostics only.
  friend bool operator==(const RecordField& a, const RecordField& b) {
    return a.key == b.key && a.value == b.value;
  }
};

struct Record {
  std::string localId;
  RecordKind kind = RecordKind::Person;
  std::vector<RecordField> fields;  // excludes the id and type lines
  std::size_t line = 0;             // line of the `id` key

  std::vector<const RecordField*> all(std::string_view key) const;
  const RecordField* first(std::string_view key) const;

  friend bool operator==(const Record& a, const Record& b) {
    return a.localId == b.localId && a.kind == b.kind && a.fields == b.fields;
  }
};

// Throws SyntaxError, UnknownKey, MissingRequiredKey or DuplicateLocalId
// carrying the offending line.
std::vector<Record> parseRecords(std::string_view text);
std::string printRecords(std::span<const Record> records);

std::string_view kindSegment(EntityKind kind);
// base/segment/percent-encoded-localId. Throws InvalidLocalId for empty or
// all-whitespace ids.
Iri mintIri(const Iri& base, EntityKind kind, std::string_view localId);

struct IngestDiagnostic {
  std::string localId;
  std::size_t line = 0;
  std::optional<ErrorCode> code;  // absent for warnings
  std::string message;

  std::string toString() const;
};

struct IngestReport {
  std::size_t recordsParsed = 0;
  std::size_t triplesEmitted = 0;
  std::vector<IngestDiagnostic> warnings;
  std::vector<IngestDiagnostic> errors;

  bool ok() const noexcept { return errors.empty(); }
  std::string toString() const;
};

struct IngestOptions {
  Iri base = Iri::parse(kDefaultBaseIri);
  Iri authority = Iri::parse(kDefaultBaseIri);
  // Stamped on every provenance tag; defaults to the current day.
  std::optional<TimePoint> batchDate;
};

struct IngestResult {
  Store store;
  IngestReport report;
};

// All-or-nothing: when the report carries errors the returned store holds
// no triple from this batch. References may point at records in the batch or
// at entities already present in `existing`, which is copied, not modified.
IngestResult recordsToGraph(std::span<const Record> records,
                            const IngestOptions& options,
                            const Store* existing = nullptr);

// Resolution goes through the minted identifier only, never through labels.
// Throws NotFound.
Iri resolveEntity(const Store& store, EntityKind kind, std::string_view localId,
                  const Iri& base);

TimePoint currentDay();

}  // namespace etd
