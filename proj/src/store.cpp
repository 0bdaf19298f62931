#include "etd/store.hpp"

#include <algorithm>

namespace etd {

bool TimeConstraint::admits(const Validity& v) const {
  switch (mode) {
    case Mode::At:
      return v.contains(*interval.start());
    case Mode::During:
      return v.covers(interval);
    case Mode::Overlaps:
      return v.overlaps(interval);
  }
  return false;
}

namespace {

std::string objectKey(const Term& t) { return toNTriples(t); }

bool validityLess(const Validity& a, const Validity& b) {
  const auto da = a.days();
  const auto db = b.days();
  if (da.first != db.first) return da.first < db.first;
  return a.toString() < b.toString();
}

}  // namespace

Store::Store(Iri base, std::shared_ptr<const Vocabulary> vocab)
    : base_(std::move(base)), vocab_(std::move(vocab)) {}

Store::Store(const Store& other)
    : base_(other.base_),
      vocab_(other.vocab_),
      statements_(other.statements_),
      kinds_(other.kinds_),
      count_(other.count_) {
  rebuildIndexes();
}

Store& Store::operator=(const Store& other) {
  if (this != &other) {
    Store copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void Store::index(const Key& key) {
  bySubject_[key.subject.str()].push_back(&key);
  byProperty_[key.property.str()].push_back(&key);
  byObject_[objectKey(key.object)].push_back(&key);
}

void Store::rebuildIndexes() {
  bySubject_.clear();
  byProperty_.clear();
  byObject_.clear();
  for (const auto& [key, _] : statements_) index(key);
}

void Store::checkShape(const PropertyDef& def, const TemporalTriple& t) const {
  t.provenance.validate();
  switch (def.temporality) {
    case Temporality::Required:
      if (t.validity.isAlways()) {
        throw Error(ErrorCode::InvalidTriple,
                    def.curie + " statements must carry a validity interval");
      }
      break;
    case Temporality::Instant:
      if (t.validity.isAlways() || !t.validity.interval()->isInstant()) {
        throw Error(ErrorCode::InvalidTriple,
                    def.curie + " statements must carry an instant [t]");
      }
      break;
    case Temporality::Untimed:
    case Temporality::Optional:
      break;
  }
  const auto* objIri = std::get_if<Iri>(&t.object);
  const auto* objLit = std::get_if<Literal>(&t.object);
  switch (def.range.tag) {
    case ValueRange::Tag::Term:
      if (!objIri || std::find(def.allowedTerms.begin(), def.allowedTerms.end(),
                               *objIri) == def.allowedTerms.end()) {
        throw Error(ErrorCode::InvalidTriple,
                    toNTriples(t.object) + " is not a permitted value of " +
                        def.curie);
      }
      break;
    case ValueRange::Tag::Literal:
      if (!objLit || objLit->datatype() != def.range.datatype) {
        throw Error(ErrorCode::KindMismatch,
                    def.curie + " expects a " +
                        std::string(datatypeName(def.range.datatype)) +
                        " literal, got " + toNTriples(t.object));
      }
      break;
    case ValueRange::Tag::Entity:
      if (!objIri) {
        throw Error(ErrorCode::KindMismatch,
                    def.curie + " expects an entity, got literal " +
                        toNTriples(t.object));
      }
      break;
  }
}

void Store::checkKinds(const PropertyDef& def, const TemporalTriple& t) const {
  if (def.domainKind) {
    if (auto k = kindOf(t.subject); k && *k != *def.domainKind) {
      throw Error(ErrorCode::KindMismatch,
                  "<" + t.subject.str() + "> is a " +
                      std::string(entityKindName(*k)) + " but " + def.curie +
                      " expects a " +
                      std::string(entityKindName(*def.domainKind)) +
                      " subject");
    }
  }
  if (def.range.tag == ValueRange::Tag::Entity) {
    const auto& obj = std::get<Iri>(t.object);
    if (auto k = kindOf(obj); k && *k != def.range.kind) {
      throw Error(ErrorCode::KindMismatch,
                  "<" + obj.str() + "> is a " + std::string(entityKindName(*k)) +
                      " but " + def.curie + " expects a " +
                      std::string(entityKindName(def.range.kind)) + " object");
    }
  }
}

// A new kind assertion must agree with every statement already mentioning
// the entity, so validation does not depend on insertion order.
void Store::checkKindAssertion(const Iri& entity, EntityKind kind) const {
  if (auto existing = kindOf(entity); existing && *existing != kind) {
    throw Error(ErrorCode::KindMismatch,
                "<" + entity.str() + "> already has kind " +
                    std::string(entityKindName(*existing)));
  }
  const auto mismatch = [&](const Key& key, EntityKind expected) {
    return Error(ErrorCode::KindMismatch,
                 "<" + entity.str() + "> asserted as " +
                     std::string(entityKindName(kind)) + " but " +
                     vocab_->curieFor(key.property) + " requires a " +
                     std::string(entityKindName(expected)));
  };
  if (auto it = bySubject_.find(entity.str()); it != bySubject_.end()) {
    for (const Key* key : it->second) {
      const auto& def = vocab_->get(key->property);
      if (def.domainKind && *def.domainKind != kind) {
        throw mismatch(*key, *def.domainKind);
      }
    }
  }
  if (auto it = byObject_.find(objectKey(entity)); it != byObject_.end()) {
    for (const Key* key : it->second) {
      const auto& def = vocab_->get(key->property);
      if (def.range.tag == ValueRange::Tag::Entity && def.range.kind != kind) {
        throw mismatch(*key, def.range.kind);
      }
    }
  }
}

InsertResult Store::insertTriple(TemporalTriple t) {
  const PropertyDef* def = &vocab_->get(t.property);
  if (!def->storedDirection) {
    const auto* obj = std::get_if<Iri>(&t.object);
    if (!obj) {
      throw Error(ErrorCode::KindMismatch,
                  def->curie + " expects an entity, got literal " +
                      toNTriples(t.object));
    }
    t = TemporalTriple{*obj, *def->inverseId, t.subject, std::move(t.validity),
                       std::move(t.provenance)};
    def = &vocab_->get(t.property);
  }
  checkShape(*def, t);
  checkKinds(*def, t);

  std::optional<EntityKind> assertedKind;
  if (t.property == vocab_->ids().kind) {
    assertedKind = vocab_->kindFromTerm(std::get<Iri>(t.object));
    checkKindAssertion(t.subject, *assertedKind);
  }

  Key key{t.subject, t.property, t.object, t.provenance};
  auto it = statements_.find(key);
  if (it == statements_.end()) {
    auto [pos, _] = statements_.emplace(std::move(key),
                                        std::vector<Validity>{t.validity});
    index(pos->first);
    ++count_;
    if (assertedKind) kinds_.emplace(t.subject, *assertedKind);
    return {InsertOutcome::Inserted, t.validity};
  }

  auto& validities = it->second;
  if (validities.front().isAlways()) {
    return {InsertOutcome::Duplicate, validities.front()};
  }
  if (t.validity.isAlways()) {
    count_ -= validities.size() - 1;
    validities.assign(1, Validity::always());
    return {InsertOutcome::Coalesced, validities.front()};
  }

  // Instants are events: neighbouring ones stay apart instead of becoming a
  // range the property could not carry.
  if (def->temporality == Temporality::Instant) {
    if (std::find(validities.begin(), validities.end(), t.validity) != validities.end()) {
      return {InsertOutcome::Duplicate, t.validity};
    }
    validities.push_back(t.validity);
    std::sort(validities.begin(), validities.end(), validityLess);
    ++count_;
    return {InsertOutcome::Inserted, t.validity};
  }

  Validity merged = t.validity;
  std::vector<Validity> remaining = validities;
  std::vector<Validity> absorbed;
  bool changed = true;
  while (changed && !merged.isAlways()) {
    changed = false;
    for (auto v = remaining.begin(); v != remaining.end(); ++v) {
      if (auto m = mergeValidities(merged, *v)) {
        merged = *m;
        absorbed.push_back(*v);
        remaining.erase(v);
        changed = true;
        break;
      }
    }
  }
  if (merged.isAlways()) {
    // Open-ended statements reaching past each other cover all time.
    if (def->temporality == Temporality::Required ||
        def->temporality == Temporality::Instant) {
      throw Error(ErrorCode::InvalidTriple,
                  def->curie + " would hold at all times once merged with " +
                      absorbed.front().toString());
    }
    count_ -= validities.size() - 1;
    validities.assign(1, Validity::always());
    return {InsertOutcome::Coalesced, validities.front()};
  }
  validities = std::move(remaining);
  const auto result = merged;
  validities.push_back(result);
  std::sort(validities.begin(), validities.end(), validityLess);
  if (absorbed.empty()) {
    ++count_;
    return {InsertOutcome::Inserted, result};
  }
  count_ -= absorbed.size() - 1;
  if (absorbed.size() == 1 && absorbed.front() == result) {
    return {InsertOutcome::Duplicate, result};
  }
  return {InsertOutcome::Coalesced, result};
}

template <typename Fn>
void Store::forEachCandidate(const std::optional<Iri>& s,
                             const std::optional<Iri>& p,
                             const std::optional<Term>& o, Fn&& fn) const {
  const std::vector<const Key*>* best = nullptr;
  bool indexed = false;
  const auto consider = [&](const Index& idx, const std::string& k) {
    const auto it = idx.find(k);
    static const std::vector<const Key*> kEmpty;
    const auto* list = it == idx.end() ? &kEmpty : &it->second;
    if (!indexed || list->size() < best->size()) best = list;
    indexed = true;
  };
  if (s) consider(bySubject_, s->str());
  if (o) consider(byObject_, objectKey(*o));
  if (p) consider(byProperty_, p->str());

  const auto accept = [&](const Key& key, const std::vector<Validity>& vs) {
    if (s && key.subject != *s) return;
    if (p && key.property != *p) return;
    if (o && key.object != *o) return;
    fn(key, vs);
  };
  if (indexed) {
    for (const Key* key : *best) accept(*key, statements_.at(*key));
  } else {
    for (const auto& [key, vs] : statements_) accept(key, vs);
  }
}

std::vector<PatternMatch> Store::matchPattern(const Pattern& p) const {
  std::vector<PatternMatch> out;
  const PropertyDef* def = p.property ? &vocab_->get(*p.property) : nullptr;

  const auto emit = [&](const Key& key, const std::vector<Validity>& vs,
                        bool flip) {
    for (const auto& v : vs) {
      if (p.time && !p.time->admits(v)) continue;
      if (flip) {
        out.push_back({TemporalTriple{std::get<Iri>(key.object),
                                      *vocab_->get(key.property).inverseId,
                                      key.subject, v, key.provenance},
                       true});
      } else {
        out.push_back(
            {TemporalTriple{key.subject, key.property, key.object, v,
                            key.provenance},
             false});
      }
    }
  };

  if (!def || def->storedDirection) {
    forEachCandidate(p.subject, p.property, p.object,
                     [&](const Key& key, const std::vector<Validity>& vs) {
                       emit(key, vs, false);
                     });
  }

  if (p.inference == Inference::Inverse) {
    // Flipped view: pattern subject matches stored object and vice versa.
    std::optional<Iri> storedProperty;
    if (def) {
      if (def->storedDirection || !def->inverseId) {
        storedProperty.reset();
      } else {
        storedProperty = def->inverseId;
      }
    }
    const bool applicable = !def || storedProperty.has_value();
    const Iri* patternObjIri =
        p.object ? std::get_if<Iri>(&*p.object) : nullptr;
    if (applicable && (!p.object || patternObjIri)) {
      std::optional<Term> storedObject;
      if (p.subject) storedObject = Term{*p.subject};
      std::optional<Iri> storedSubject;
      if (patternObjIri) storedSubject = *patternObjIri;
      forEachCandidate(
          storedSubject, storedProperty, storedObject,
          [&](const Key& key, const std::vector<Validity>& vs) {
            const auto& kd = vocab_->get(key.property);
            if (!kd.inverseId || !kd.storedDirection) return;
            emit(key, vs, true);
          });
    }
  }

  std::sort(out.begin(), out.end(),
            [](const PatternMatch& a, const PatternMatch& b) {
              if (canonicalLess(a.triple, b.triple)) return true;
              if (canonicalLess(b.triple, a.triple)) return false;
              return a.derived < b.derived;
            });
  return out;
}

std::vector<TemporalTriple> Store::snapshotAt(const TimePoint& t) const {
  std::vector<TemporalTriple> out;
  for (const auto& [key, vs] : statements_) {
    for (const auto& v : vs) {
      if (v.contains(t)) {
        out.push_back({key.subject, key.property, key.object, v, key.provenance});
      }
    }
  }
  std::sort(out.begin(), out.end(), canonicalLess);
  return out;
}

std::vector<Iri> Store::entitiesOfKind(EntityKind k) const {
  std::vector<Iri> out;
  for (const auto& [iri, kind] : kinds_) {
    if (kind == k) out.push_back(iri);
  }
  return out;
}

std::optional<EntityKind> Store::kindOf(const Iri& entity) const {
  const auto it = kinds_.find(entity);
  if (it == kinds_.end()) return std::nullopt;
  return it->second;
}

bool Store::mentions(const Iri& entity) const {
  return bySubject_.contains(entity.str()) ||
         byObject_.contains(objectKey(entity));
}

std::vector<TemporalTriple> Store::triples() const {
  std::vector<TemporalTriple> out;
  out.reserve(count_);
  for (const auto& [key, vs] : statements_) {
    for (const auto& v : vs) {
      out.push_back({key.subject, key.property, key.object, v, key.provenance});
    }
  }
  std::sort(out.begin(), out.end(), canonicalLess);
  return out;
}

namespace {

std::vector<TemporalTriple> unwrap(std::vector<PatternMatch> matches) {
  std::vector<TemporalTriple> out;
  out.reserve(matches.size());
  for (auto& m : matches) out.push_back(std::move(m.triple));
  return out;
}

}  // namespace

std::vector<TemporalTriple> Store::objectsOf(const Iri& subject,
                                             const Iri& property) const {
  return unwrap(matchPattern(
      {subject, property, std::nullopt, std::nullopt, Inference::Inverse}));
}

std::vector<TemporalTriple> Store::subjectsOf(const Iri& property,
                                              const Iri& object) const {
  return unwrap(matchPattern(
      {std::nullopt, property, Term{object}, std::nullopt, Inference::Inverse}));
}

}  // namespace etd
