#pragma once
// Indexed, canonical set of temporal triples.
//
// Invariants maintained by insertTriple:
// - statements sharing (subject, property, object, provenance) never have
//   overlapping or adjacent validity; such inserts are coalesced;
// - only the stored direction of an inverse pair is kept (inserting the other
//   direction flips the triple); the inverse is synthesized at match time;
// - properties exist in the vocabulary and asserted entity kinds agree with
//   property domains and ranges, whichever order the triples arrive in.
//
// Concurrency: any number of concurrent readers, or one writer.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "etd/model.hpp"
#include "etd/vocab.hpp"

namespace etd {

inline constexpr std::string_view kDefaultBaseIri = "http://example.org/etd";

struct TimeConstraint {
  enum class Mode {
    At,        // validity contains the point
    During,    // validity covers the whole interval
    Overlaps,  // validity intersects the interval
  };
  Mode mode = Mode::At;
  TimeInterval interval = TimeInterval::instant(TimePoint::make(1));

  static TimeConstraint at(const TimePoint& t) {
    return {Mode::At, TimeInterval::instant(t)};
  }
  static TimeConstraint during(const TimeInterval& iv) {
    return {Mode::During, iv};
  }
  static TimeConstraint overlaps(const TimeInterval& iv) {
    return {Mode::Overlaps, iv};
  }

  // Always validity passes every constraint.
  bool admits(const Validity& v) const;

  friend bool operator==(const TimeConstraint&, const TimeConstraint&) = default;
};

enum class Inference { None, Inverse };

struct Pattern {
  std::optional<Iri> subject;
  std::optional<Iri> property;
  std::optional<Term> object;
  std::optional<TimeConstraint> time;
  Inference inference = Inference::None;
};

struct PatternMatch {
  TemporalTriple triple;
  bool derived = false;  // synthesized from a stored triple via its inverse
};

enum class InsertOutcome { Inserted, Coalesced, Duplicate };

struct InsertResult {
  InsertOutcome outcome;
  Validity validity;  // the stored validity the triple ended up in
};

class Store {
 public:
  explicit Store(Iri base = Iri::parse(kDefaultBaseIri),
                 std::shared_ptr<const Vocabulary> vocab = Vocabulary::standard());

  Store(const Store& other);
  Store& operator=(const Store& other);
  Store(Store&&) noexcept = default;
  Store& operator=(Store&&) noexcept = default;

  const Iri& base() const noexcept { return base_; }
  const Vocabulary& vocab() const noexcept { return *vocab_; }
  const std::shared_ptr<const Vocabulary>& vocabPtr() const noexcept {
    return vocab_;
  }

  InsertResult insertTriple(TemporalTriple t);

  std::vector<PatternMatch> matchPattern(const Pattern& p) const;
  std::vector<TemporalTriple> snapshotAt(const TimePoint& t) const;
  std::vector<Iri> entitiesOfKind(EntityKind k) const;

  std::optional<EntityKind> kindOf(const Iri& entity) const;
  // True when the Iri occurs as subject or object of any stored triple.
  bool mentions(const Iri& entity) const;

  // All stored triples in canonical order.
  std::vector<TemporalTriple> triples() const;
  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  // Convenience: stored + derived triples for (subject, property, *).
  std::vector<TemporalTriple> objectsOf(const Iri& subject,
                                        const Iri& property) const;
  // Convenience: stored + derived triples for (*, property, object).
  std::vector<TemporalTriple> subjectsOf(const Iri& property,
                                         const Iri& object) const;

 private:
  struct Key {
    Iri subject;
    Iri property;
    Term object;
    ProvenanceTag provenance;

    friend bool operator==(const Key&, const Key&) = default;
    friend bool operator<(const Key& a, const Key& b) {
      if (auto c = a.subject <=> b.subject; c != 0) return c < 0;
      if (auto c = a.property <=> b.property; c != 0) return c < 0;
      if (a.object != b.object) return a.object < b.object;
      return a.provenance < b.provenance;
    }
  };
  using Statements = std::map<Key, std::vector<Validity>>;
  using Index = std::unordered_map<std::string, std::vector<const Key*>>;

  void checkShape(const PropertyDef& def, const TemporalTriple& t) const;
  void checkKinds(const PropertyDef& def, const TemporalTriple& t) const;
  void checkKindAssertion(const Iri& entity, EntityKind kind) const;
  void index(const Key& key);
  void rebuildIndexes();

  template <typename Fn>
  void forEachCandidate(const std::optional<Iri>& s, const std::optional<Iri>& p,
                        const std::optional<Term>& o, Fn&& fn) const;

  Iri base_;
  std::shared_ptr<const Vocabulary> vocab_;
  Statements statements_;
  Index bySubject_;
  Index byProperty_;
  Index byObject_;
  std::map<Iri, EntityKind> kinds_;
  std::size_t count_ = 0;
};

}  // namespace etd
