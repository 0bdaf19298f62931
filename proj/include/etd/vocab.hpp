#pragma once
// The fixed ETD ontology. Property identifiers live under a configurable
// namespace (default http://example.org/etd/vocab#) and are addressed by
// `etd:` curies.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "etd/model.hpp"

namespace etd {

inline constexpr std::string_view kDefaultVocabNamespace =
    "http://example.org/etd/vocab#";
inline constexpr std::string_view kVocabPrefix = "etd";

enum class EntityKind { Person, CorporateBody, Work, Place, Gender, ExternalResource };
enum class CorporateBodySubkind { University, School, Faculty, Other };
enum class WorkSubkind { MasterThesis, PhDDissertation };
enum class FradCategory {
  Sequential,
  Hierarchical,
  Membership,
  Creation,
  Contribution,
  Attribute,
  Linking,
};

std::string_view entityKindName(EntityKind k);
std::optional<EntityKind> entityKindFromName(std::string_view name);
std::string_view bodySubkindName(CorporateBodySubkind k);
std::string_view workSubkindName(WorkSubkind k);
std::string_view fradCategoryName(FradCategory c);

// What the object position of a property accepts.
struct ValueRange {
  enum class Tag {
    Entity,   // an Iri; checked against `kind` when the object has a kind
    Literal,  // a literal of `datatype`
    Term,     // one of the vocabulary class terms listed for the property
  };
  Tag tag = Tag::Entity;
  EntityKind kind = EntityKind::Person;
  LiteralDatatype datatype = LiteralDatatype::String;
};

enum class Temporality {
  Untimed,   // validity is Always in practice
  Optional,  // may be time-scoped (labels, gender, authorship)
  Required,  // must carry an interval
  Instant,   // must carry a degenerate interval start == end
};

struct PropertyDef {
  Iri id;
  std::string curie;
  std::optional<EntityKind> domainKind;  // absent: any entity
  ValueRange range;
  bool temporalExpected = false;
  Temporality temporality = Temporality::Untimed;
  std::optional<Iri> inverseId;
  // Of an inverse pair, exactly one side is stored; the other is synthesized.
  bool storedDirection = true;
  FradCategory fradCategory = FradCategory::Attribute;
  std::optional<std::string> relatorUnimarc;
  std::optional<std::string> relatorMarc21;
  std::vector<Iri> allowedTerms;  // for Tag::Term ranges
};

class Vocabulary {
 public:
  explicit Vocabulary(std::string ns = std::string(kDefaultVocabNamespace));

  static std::shared_ptr<const Vocabulary> standard();

  const std::string& ns() const noexcept { return ns_; }

  std::span<const PropertyDef> vocabTable() const noexcept { return defs_; }

  // Throws UnknownProperty.
  const PropertyDef& lookupProperty(std::string_view curie) const;
  const PropertyDef& get(const Iri& id) const;
  const PropertyDef* find(const Iri& id) const noexcept;

  std::optional<Iri> inverseOf(const Iri& propertyId) const;

  // ns + local; no check that the term exists.
  Iri term(std::string_view local) const;
  // `etd:local` for vocabulary Iris, the full text otherwise.
  std::string curieFor(const Iri& iri) const;
  // Local name for vocabulary Iris.
  std::optional<std::string> localName(const Iri& iri) const;

  Iri kindTerm(EntityKind k) const;
  std::optional<EntityKind> kindFromTerm(const Iri& iri) const;
  Iri bodyKindTerm(CorporateBodySubkind k) const;
  Iri workKindTerm(WorkSubkind k) const;
  std::optional<WorkSubkind> workKindFromTerm(const Iri& iri) const;
  std::optional<CorporateBodySubkind> bodyKindFromTerm(const Iri& iri) const;

  // Frequently used property ids.
  struct Ids {
    Iri kind, bodyKind, workKind, label, isStudentOf, isProfessorAt,
        hasSubdivision, isSubdivisionOf, changedTo, changedFrom, createdBy,
        created, advisedBy, advised, degreeGrantedBy, grantedDegreeFor,
        committeeMember, committeeMemberOf, hasGender, establishedIn,
        birthPlace, sameAs, relatedTo;
  };
  const Ids& ids() const noexcept { return *ids_; }

 private:
  std::string ns_;
  std::vector<PropertyDef> defs_;
  std::unordered_map<std::string, std::size_t> byIri_;
  std::unique_ptr<Ids> ids_;
};

}  // namespace etd
