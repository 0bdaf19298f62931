#include "etd/ingest.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <map>
#include <set>

namespace etd {

std::string_view recordKindName(RecordKind k) {
  switch (k) {
    case RecordKind::Person: return "person";
    case RecordKind::Body: return "body";
    case RecordKind::Work: return "work";
  }
  return "";
}

EntityKind entityKindOf(RecordKind k) {
  switch (k) {
    case RecordKind::Person: return EntityKind::Person;
    case RecordKind::Body: return EntityKind::CorporateBody;
    case RecordKind::Work: return EntityKind::Work;
  }
  return EntityKind::Person;
}

std::vector<const RecordField*> Record::all(std::string_view key) const {
  std::vector<const RecordField*> out;
  for (const auto& f : fields) {
    if (f.key == key) out.push_back(&f);
  }
  return out;
}

const RecordField* Record::first(std::string_view key) const {
  for (const auto& f : fields) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct KeySpec {
  std::string_view key;
  bool repeatable;
  bool required;
};

constexpr std::array kPersonKeys = {
    KeySpec{"name", true, true},          KeySpec{"gender", true, false},
    KeySpec{"student-of", true, false},   KeySpec{"professor-at", true, false},
    KeySpec{"birth-place", false, false}, KeySpec{"same-as", true, false},
};
constexpr std::array kBodyKeys = {
    KeySpec{"name", true, true},
    KeySpec{"body-kind", false, true},
    KeySpec{"established", false, false},
    KeySpec{"subdivision-of", true, false},
    KeySpec{"changed-to", true, false},
    KeySpec{"same-as", true, false},
};
constexpr std::array kWorkKeys = {
    KeySpec{"title", false, true},      KeySpec{"work-kind", false, true},
    KeySpec{"dissertant", false, true}, KeySpec{"study", false, false},
    KeySpec{"advisor", true, false},    KeySpec{"committee", true, false},
    KeySpec{"grantor", true, true},     KeySpec{"same-as", true, false},
    KeySpec{"related-to", true, false},
};

std::span<const KeySpec> keysFor(RecordKind k) {
  switch (k) {
    case RecordKind::Person: return kPersonKeys;
    case RecordKind::Body: return kBodyKeys;
    case RecordKind::Work: return kWorkKeys;
  }
  return {};
}

bool isBlank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r';
  });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

struct Line {
  std::string key;
  std::string value;
  std::size_t number;
};

Line splitLine(std::string_view raw, std::size_t number) {
  const auto text = trim(raw);
  const auto space = text.find_first_of(" \t");
  if (space == std::string_view::npos) {
    throw Error(ErrorCode::SyntaxError,
                "expected 'key value', got '" + std::string(text) + "'", number);
  }
  auto value = trim(text.substr(space + 1));
  if (value.empty()) {
    throw Error(ErrorCode::SyntaxError,
                "missing value for key '" + std::string(text.substr(0, space)) +
                    "'",
                number);
  }
  return {std::string(text.substr(0, space)), std::string(value), number};
}

Record buildRecord(const std::vector<Line>& lines) {
  if (lines[0].key != "id") {
    throw Error(ErrorCode::SyntaxError,
                "record must start with 'id', got '" + lines[0].key + "'",
                lines[0].number);
  }
  if (lines.size() < 2 || lines[1].key != "type") {
    throw Error(ErrorCode::SyntaxError, "second record line must be 'type'",
                lines.size() < 2 ? lines[0].number : lines[1].number);
  }
  Record rec;
  rec.localId = lines[0].value;
  rec.line = lines[0].number;
  const auto& type = lines[1].value;
  if (type == "person") {
    rec.kind = RecordKind::Person;
  } else if (type == "body") {
    rec.kind = RecordKind::Body;
  } else if (type == "work") {
    rec.kind = RecordKind::Work;
  } else {
    throw Error(ErrorCode::SyntaxError,
                "type must be person, body or work, got '" + type + "'",
                lines[1].number);
  }
  const auto specs = keysFor(rec.kind);
  std::set<std::string> seen;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto& ln = lines[i];
    const auto spec = std::find_if(specs.begin(), specs.end(),
                                   [&](const KeySpec& s) { return s.key == ln.key; });
    if (spec == specs.end()) {
      throw Error(ErrorCode::UnknownKey,
                  "key '" + ln.key + "' is not allowed in a " +
                      std::string(recordKindName(rec.kind)) + " record",
                  ln.number);
    }
    if (!spec->repeatable && seen.contains(ln.key)) {
      throw Error(ErrorCode::SyntaxError,
                  "key '" + ln.key + "' may appear only once", ln.number);
    }
    seen.insert(ln.key);
    rec.fields.push_back({ln.key, ln.value, ln.number});
  }
  for (const auto& spec : specs) {
    if (spec.required && !seen.contains(std::string(spec.key))) {
      throw Error(ErrorCode::MissingRequiredKey,
                  std::string(recordKindName(rec.kind)) + " record '" +
                      rec.localId + "' lacks required key '" +
                      std::string(spec.key) + "'",
                  rec.line);
    }
  }
  return rec;
}

}  // namespace

std::vector<Record> parseRecords(std::string_view text) {
  std::vector<Record> records;
  std::set<std::pair<RecordKind, std::string>> ids;
  std::vector<Line> pending;

  const auto flush = [&] {
    if (pending.empty()) return;
    auto rec = buildRecord(pending);
    if (!ids.emplace(rec.kind, rec.localId).second) {
      throw Error(ErrorCode::DuplicateLocalId,
                  std::string(recordKindName(rec.kind)) + " id '" +
                      rec.localId + "' appears twice",
                  rec.line);
    }
    records.push_back(std::move(rec));
    pending.clear();
  };

  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto raw = text.substr(pos, nl - pos);
    ++number;
    pos = nl + 1;
    if (isBlank(raw)) {
      flush();
    } else if (trim(raw).front() == '#') {
      continue;
    } else {
      pending.push_back(splitLine(raw, number));
    }
    if (nl == text.size()) break;
  }
  flush();
  return records;
}

std::string printRecords(std::span<const Record> records) {
  std::string out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (i != 0) out += '\n';
    out += "id " + r.localId + "\n";
    out += "type " + std::string(recordKindName(r.kind)) + "\n";
    for (const auto& f : r.fields) out += f.key + " " + f.value + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Minting

std::string_view kindSegment(EntityKind kind) {
  switch (kind) {
    case EntityKind::Person: return "person";
    case EntityKind::CorporateBody: return "body";
    case EntityKind::Work: return "work";
    case EntityKind::Place: return "place";
    case EntityKind::Gender: return "gender";
    case EntityKind::ExternalResource: break;
  }
  throw Error(ErrorCode::InvalidLocalId,
              "external resources are referenced, never minted");
}

Iri mintIri(const Iri& base, EntityKind kind, std::string_view localId) {
  if (isBlank(localId)) {
    throw Error(ErrorCode::InvalidLocalId, "local id must not be empty");
  }
  std::string text = base.str();
  while (!text.empty() && text.back() == '/') text.pop_back();
  text += '/';
  text += kindSegment(kind);
  text += '/';
  text += percentEncode(localId);
  return Iri::parse(text);
}

Iri resolveEntity(const Store& store, EntityKind kind, std::string_view localId,
                  const Iri& base) {
  auto iri = mintIri(base, kind, localId);
  if (store.kindOf(iri) != kind) {
    throw Error(ErrorCode::NotFound,
                std::string(kindSegment(kind)) + " '" + std::string(localId) +
                    "' is not in the store");
  }
  return iri;
}

TimePoint currentDay() {
  using namespace std::chrono;
  const year_month_day ymd{floor<days>(system_clock::now())};
  return TimePoint::make(static_cast<int>(ymd.year()),
                         static_cast<int>(static_cast<unsigned>(ymd.month())),
                         static_cast<int>(static_cast<unsigned>(ymd.day())));
}

// ---------------------------------------------------------------------------
// Deconstruction

std::string IngestDiagnostic::toString() const {
  std::string out = code ? std::string(errorCodeName(*code)) : "note";
  if (line != 0) out += " at line " + std::to_string(line);
  if (!localId.empty()) out += " [" + localId + "]";
  out += ": " + message;
  return out;
}

std::string IngestReport::toString() const {
  std::string out;
  out += "records parsed: " + std::to_string(recordsParsed) + "\n";
  out += "triples emitted: " + std::to_string(triplesEmitted) + "\n";
  out += "warnings: " + std::to_string(warnings.size()) + "\n";
  for (const auto& w : warnings) out += "  warning: " + w.toString() + "\n";
  out += "errors: " + std::to_string(errors.size()) + "\n";
  for (const auto& e : errors) out += "  error: " + e.toString() + "\n";
  return out;
}

namespace {

struct Emitted {
  TemporalTriple triple;
  const Record* record;
  std::size_t line;
};

class Deconstructor {
 public:
  Deconstructor(std::span<const Record> records, const IngestOptions& options,
                const Store* existing, const Vocabulary& vocab)
      : records_(records), options_(options), existing_(existing), vocab_(vocab) {
    for (const auto& r : records_) {
      local_.emplace(std::pair{r.kind, r.localId},
                     mintIri(options_.base, entityKindOf(r.kind), r.localId));
    }
  }

  void run(IngestReport& report) {
    report_ = &report;
    for (const auto& r : records_) {
      record_ = &r;
      try {
        self_ = local_.at({r.kind, r.localId});
        emit(r.line, *self_, vocab_.ids().kind,
             vocab_.kindTerm(entityKindOf(r.kind)), Validity::always());
      } catch (const Error& e) {
        fail(r.line, e);
        continue;
      }
      for (const auto& f : r.fields) {
        try {
          field(f);
        } catch (const Error& e) {
          fail(f.line, e);
        }
      }
    }
  }

  std::vector<Emitted>& emitted() { return emitted_; }
  const std::vector<std::pair<const Record*, const RecordField*>>& grants() const {
    return grants_;
  }

 private:
  ProvenanceTag provenance() const {
    return {record_->localId, options_.authority, options_.batchDate};
  }

  void emit(std::size_t line, const Iri& s, const Iri& p, Term o, Validity v) {
    emitted_.push_back(
        {TemporalTriple{s, p, std::move(o), std::move(v), provenance()}, record_,
         line});
  }

  void fail(std::size_t line, const Error& e) {
    report_->errors.push_back({record_->localId, line, e.code(), e.detail()});
  }

  // Splits `head@suffix` at the last '@'.
  static std::pair<std::string, std::optional<std::string>> splitSuffix(
      const std::string& value) {
    const auto at = value.rfind('@');
    if (at == std::string::npos) return {value, std::nullopt};
    return {value.substr(0, at), value.substr(at + 1)};
  }

  static Validity requireInterval(const RecordField& f,
                                  const std::optional<std::string>& suffix) {
    if (!suffix) {
      throw Error(ErrorCode::SyntaxError,
                  "'" + f.key + "' needs an @interval qualifier");
    }
    return Validity::during(TimeInterval::parse(*suffix));
  }

  Iri reference(RecordKind kind, const std::string& id) const {
    if (auto it = local_.find({kind, id}); it != local_.end()) return it->second;
    const auto entityKind = entityKindOf(kind);
    if (existing_) {
      auto iri = mintIri(options_.base, entityKind, id);
      if (existing_->kindOf(iri) == entityKind) return iri;
    }
    throw Error(ErrorCode::DanglingReference,
                std::string(recordKindName(kind)) + " '" + id +
                    "' is neither in the batch nor in the store");
  }

  // Gender and place entities have no records of their own; they are minted
  // from the referencing value and described with a kind and a label.
  Iri auxiliary(std::size_t line, EntityKind kind, const std::string& id) {
    auto iri = mintIri(options_.base, kind, id);
    emit(line, iri, vocab_.ids().kind, vocab_.kindTerm(kind), Validity::always());
    emit(line, iri, vocab_.ids().label, Literal::string(id), Validity::always());
    return iri;
  }

  void field(const RecordField& f) {
    const auto& ids = vocab_.ids();
    const auto& self = *self_;
    const auto line = f.line;
    const auto& key = f.key;

    if (key == "name" || key == "title") {
      auto [head, suffix] = splitSuffix(f.value);
      if (key == "name" && suffix && !head.empty()) {
        try {
          auto iv = TimeInterval::parse(*suffix);
          emit(line, self, ids.label, Literal::string(head), Validity::during(iv));
          return;
        } catch (const Error&) {
          // Not an interval: the '@' belongs to the name itself.
        }
      }
      emit(line, self, ids.label, Literal::string(f.value), Validity::always());
    } else if (key == "gender") {
      auto [head, suffix] = splitSuffix(f.value);
      auto g = auxiliary(line, EntityKind::Gender, head);
      emit(line, self, ids.hasGender, g,
           suffix ? Validity::during(TimeInterval::parse(*suffix))
                  : Validity::always());
    } else if (key == "student-of" || key == "professor-at") {
      auto [head, suffix] = splitSuffix(f.value);
      auto v = requireInterval(f, suffix);
      emit(line, self, key == "student-of" ? ids.isStudentOf : ids.isProfessorAt,
           reference(RecordKind::Body, head), v);
    } else if (key == "birth-place") {
      emit(line, self, ids.birthPlace, auxiliary(line, EntityKind::Place, f.value),
           Validity::always());
    } else if (key == "same-as" || key == "related-to") {
      emit(line, self, key == "same-as" ? ids.sameAs : ids.relatedTo,
           Iri::parse(f.value), Validity::always());
    } else if (key == "body-kind") {
      static const std::map<std::string, CorporateBodySubkind, std::less<>> kKinds{
          {"university", CorporateBodySubkind::University},
          {"school", CorporateBodySubkind::School},
          {"faculty", CorporateBodySubkind::Faculty},
          {"other", CorporateBodySubkind::Other}};
      const auto it = kKinds.find(f.value);
      if (it == kKinds.end()) {
        throw Error(ErrorCode::SyntaxError,
                    "body-kind must be university, school, faculty or other");
      }
      emit(line, self, ids.bodyKind, vocab_.bodyKindTerm(it->second),
           Validity::always());
    } else if (key == "established") {
      const auto year = TimePoint::parse(f.value);
      if (year.month()) {
        throw Error(ErrorCode::InvalidDate, "established takes a year (YYYY)");
      }
      emit(line, self, ids.establishedIn, Literal::year(year.year()),
           Validity::always());
    } else if (key == "subdivision-of") {
      auto [head, suffix] = splitSuffix(f.value);
      auto v = requireInterval(f, suffix);
      emit(line, reference(RecordKind::Body, head), ids.hasSubdivision, self, v);
    } else if (key == "changed-to") {
      auto [head, suffix] = splitSuffix(f.value);
      if (!suffix) {
        throw Error(ErrorCode::SyntaxError, "'changed-to' needs an @date");
      }
      emit(line, self, ids.changedTo, reference(RecordKind::Body, head),
           Validity::during(TimeInterval::instant(TimePoint::parse(*suffix))));
    } else if (key == "work-kind") {
      WorkSubkind k;
      if (f.value == "master") {
        k = WorkSubkind::MasterThesis;
      } else if (f.value == "phd") {
        k = WorkSubkind::PhDDissertation;
      } else {
        throw Error(ErrorCode::SyntaxError, "work-kind must be master or phd");
      }
      emit(line, self, ids.workKind, vocab_.workKindTerm(k), Validity::always());
    } else if (key == "dissertant") {
      Validity v = Validity::always();
      if (const auto* study = record_->first("study")) {
        try {
          v = Validity::during(TimeInterval::parse(study->value));
        } catch (const Error&) {
          // Reported against the study line.
        }
      }
      emit(line, self, ids.createdBy, reference(RecordKind::Person, f.value), v);
    } else if (key == "study") {
      // Validity of the dissertant statement; checked here for diagnostics.
      TimeInterval::parse(f.value);
    } else if (key == "advisor") {
      emit(line, self, ids.advisedBy, reference(RecordKind::Person, f.value),
           Validity::always());
    } else if (key == "committee") {
      emit(line, self, ids.committeeMember,
           reference(RecordKind::Person, f.value), Validity::always());
    } else if (key == "grantor") {
      emit(line, self, ids.degreeGrantedBy, reference(RecordKind::Body, f.value),
           Validity::always());
      grants_.emplace_back(record_, &f);
    }
  }

  std::span<const Record> records_;
  const IngestOptions& options_;
  const Store* existing_;
  const Vocabulary& vocab_;
  std::map<std::pair<RecordKind, std::string>, Iri> local_;
  std::vector<Emitted> emitted_;
  std::vector<std::pair<const Record*, const RecordField*>> grants_;
  IngestReport* report_ = nullptr;
  const Record* record_ = nullptr;
  std::optional<Iri> self_;
};

}  // namespace

IngestResult recordsToGraph(std::span<const Record> records,
                            const IngestOptions& options, const Store* existing) {
  Store store = existing ? *existing : Store(options.base);
  IngestReport report;
  report.recordsParsed = records.size();

  IngestOptions effective = options;
  if (!effective.batchDate) effective.batchDate = currentDay();

  Deconstructor dec(records, effective, existing, store.vocab());
  dec.run(report);
  auto& emitted = dec.emitted();
  report.triplesEmitted = emitted.size();
  if (!report.ok()) {
    return {existing ? *existing : Store(options.base), std::move(report)};
  }

  // Kind assertions first so every later statement is checked against them.
  const auto& kindProperty = store.vocab().ids().kind;
  std::stable_partition(emitted.begin(), emitted.end(), [&](const Emitted& e) {
    return e.triple.property == kindProperty;
  });
  for (auto& e : emitted) {
    try {
      store.insertTriple(e.triple);
    } catch (const Error& err) {
      report.errors.push_back(
          {e.record->localId, e.line, err.code(), err.detail()});
    }
  }
  if (!report.ok()) {
    return {existing ? *existing : Store(options.base), std::move(report)};
  }

  // A university that has faculties is an unusual degree grantor.
  const auto& ids = store.vocab().ids();
  const auto university = store.vocab().bodyKindTerm(CorporateBodySubkind::University);
  for (const auto& [rec, f] : dec.grants()) {
    const auto body = mintIri(options.base, EntityKind::CorporateBody, f->value);
    bool isUniversity = false;
    for (const auto& t : store.objectsOf(body, ids.bodyKind)) {
      if (std::get<Iri>(t.object) == university) isUniversity = true;
    }
    if (isUniversity && !store.objectsOf(body, ids.hasSubdivision).empty()) {
      report.warnings.push_back(
          {rec->localId, f->line, std::nullopt,
           "degree granted by university '" + f->value +
               "' although it has subdivisions"});
    }
  }
  return {std::move(store), std::move(report)};
}

}  // namespace etd
