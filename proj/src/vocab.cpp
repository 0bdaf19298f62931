#include "etd/vocab.hpp"

#include <array>

namespace etd {

std::string_view entityKindName(EntityKind k) {
  switch (k) {
    case EntityKind::Person: return "Person";
    case EntityKind::CorporateBody: return "CorporateBody";
    case EntityKind::Work: return "Work";
    case EntityKind::Place: return "Place";
    case EntityKind::Gender: return "Gender";
    case EntityKind::ExternalResource: return "ExternalResource";
  }
  return "";
}

std::optional<EntityKind> entityKindFromName(std::string_view name) {
  for (auto k : {EntityKind::Person, EntityKind::CorporateBody, EntityKind::Work,
                 EntityKind::Place, EntityKind::Gender,
                 EntityKind::ExternalResource}) {
    if (entityKindName(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view bodySubkindName(CorporateBodySubkind k) {
  switch (k) {
    case CorporateBodySubkind::University: return "University";
    case CorporateBodySubkind::School: return "School";
    case CorporateBodySubkind::Faculty: return "Faculty";
    case CorporateBodySubkind::Other: return "OtherBody";
  }
  return "";
}

std::string_view workSubkindName(WorkSubkind k) {
  switch (k) {
    case WorkSubkind::MasterThesis: return "MasterThesis";
    case WorkSubkind::PhDDissertation: return "PhDDissertation";
  }
  return "";
}

std::string_view fradCategoryName(FradCategory c) {
  switch (c) {
    case FradCategory::Sequential: return "Sequential";
    case FradCategory::Hierarchical: return "Hierarchical";
    case FradCategory::Membership: return "Membership";
    case FradCategory::Creation: return "Creation";
    case FradCategory::Contribution: return "Contribution";
    case FradCategory::Attribute: return "Attribute";
    case FradCategory::Linking: return "Linking";
  }
  return "";
}

namespace {

constexpr std::array kAllKinds = {
    EntityKind::Person,  EntityKind::CorporateBody, EntityKind::Work,
    EntityKind::Place,   EntityKind::Gender,        EntityKind::ExternalResource};
constexpr std::array kBodyKinds = {
    CorporateBodySubkind::University, CorporateBodySubkind::School,
    CorporateBodySubkind::Faculty, CorporateBodySubkind::Other};
constexpr std::array kWorkKinds = {WorkSubkind::MasterThesis,
                                   WorkSubkind::PhDDissertation};

ValueRange entityRange(EntityKind k) {
  return {ValueRange::Tag::Entity, k, LiteralDatatype::String};
}
ValueRange literalRange(LiteralDatatype dt) {
  return {ValueRange::Tag::Literal, EntityKind::Person, dt};
}
ValueRange termRange() { return {ValueRange::Tag::Term, {}, {}}; }

}  // namespace

Vocabulary::Vocabulary(std::string ns) : ns_(std::move(ns)) {
  // Validate the namespace once; every term is ns + local.
  Iri::parse(ns_ + "x");
  defs_.reserve(32);

  const auto add = [&](std::string_view local, std::optional<EntityKind> domain,
                       ValueRange range, Temporality temporality,
                       FradCategory category) -> PropertyDef& {
    PropertyDef def{term(local),
                    std::string(kVocabPrefix) + ":" + std::string(local),
                    domain,
                    range,
                    temporality != Temporality::Untimed,
                    temporality,
                    std::nullopt,
                    true,
                    category,
                    std::nullopt,
                    std::nullopt,
                    {}};
    defs_.push_back(std::move(def));
    return defs_.back();
  };
  // Adds `local` and its synthesized inverse with domain and range swapped.
  const auto addPair = [&](std::string_view local, std::string_view inverse,
                           EntityKind domain, EntityKind range,
                           Temporality temporality, FradCategory category,
                           std::optional<std::string> unimarc,
                           std::optional<std::string> marc21) {
    auto& fwd = add(local, domain, entityRange(range), temporality, category);
    fwd.inverseId = term(inverse);
    fwd.relatorUnimarc = std::move(unimarc);
    fwd.relatorMarc21 = std::move(marc21);
    auto& inv = add(inverse, range, entityRange(domain), temporality, category);
    inv.inverseId = term(local);
    inv.storedDirection = false;
  };

  auto& kind = add("kind", std::nullopt, termRange(), Temporality::Untimed,
                   FradCategory::Attribute);
  for (auto k : kAllKinds) kind.allowedTerms.push_back(kindTerm(k));
  auto& bodyKind = add("bodyKind", EntityKind::CorporateBody, termRange(),
                       Temporality::Untimed, FradCategory::Attribute);
  for (auto k : kBodyKinds) bodyKind.allowedTerms.push_back(bodyKindTerm(k));
  auto& workKind = add("workKind", EntityKind::Work, termRange(),
                       Temporality::Untimed, FradCategory::Attribute);
  for (auto k : kWorkKinds) workKind.allowedTerms.push_back(workKindTerm(k));

  add("label", std::nullopt, literalRange(LiteralDatatype::String),
      Temporality::Optional, FradCategory::Attribute);
  add("isStudentOf", EntityKind::Person, entityRange(EntityKind::CorporateBody),
      Temporality::Required, FradCategory::Membership);
  add("isProfessorAt", EntityKind::Person,
      entityRange(EntityKind::CorporateBody), Temporality::Required,
      FradCategory::Membership);
  addPair("hasSubdivision", "isSubdivisionOf", EntityKind::CorporateBody,
          EntityKind::CorporateBody, Temporality::Required,
          FradCategory::Hierarchical, std::nullopt, std::nullopt);
  addPair("changedTo", "changedFrom", EntityKind::CorporateBody,
          EntityKind::CorporateBody, Temporality::Instant,
          FradCategory::Sequential, std::nullopt, std::nullopt);
  addPair("createdBy", "created", EntityKind::Work, EntityKind::Person,
          Temporality::Optional, FradCategory::Creation, std::nullopt, "dis");
  addPair("advisedBy", "advised", EntityKind::Work, EntityKind::Person,
          Temporality::Untimed, FradCategory::Contribution, "727", "ths");
  addPair("degreeGrantedBy", "grantedDegreeFor", EntityKind::Work,
          EntityKind::CorporateBody, Temporality::Untimed,
          FradCategory::Contribution, "295", "dgg");
  addPair("committeeMember", "committeeMemberOf", EntityKind::Work,
          EntityKind::Person, Temporality::Untimed, FradCategory::Contribution,
          std::nullopt, std::nullopt);
  add("hasGender", EntityKind::Person, entityRange(EntityKind::Gender),
      Temporality::Optional, FradCategory::Attribute);
  add("establishedIn", EntityKind::CorporateBody,
      literalRange(LiteralDatatype::Year), Temporality::Untimed,
      FradCategory::Attribute);
  add("birthPlace", EntityKind::Person, entityRange(EntityKind::Place),
      Temporality::Untimed, FradCategory::Attribute);
  add("sameAs", std::nullopt, entityRange(EntityKind::ExternalResource),
      Temporality::Untimed, FradCategory::Linking);
  add("relatedTo", std::nullopt, entityRange(EntityKind::ExternalResource),
      Temporality::Untimed, FradCategory::Linking);

  for (std::size_t i = 0; i < defs_.size(); ++i) byIri_[defs_[i].id.str()] = i;

  ids_ = std::make_unique<Ids>(Ids{
      term("kind"), term("bodyKind"), term("workKind"), term("label"),
      term("isStudentOf"), term("isProfessorAt"), term("hasSubdivision"),
      term("isSubdivisionOf"), term("changedTo"), term("changedFrom"),
      term("createdBy"), term("created"), term("advisedBy"), term("advised"),
      term("degreeGrantedBy"), term("grantedDegreeFor"),
      term("committeeMember"), term("committeeMemberOf"), term("hasGender"),
      term("establishedIn"), term("birthPlace"), term("sameAs"),
      term("relatedTo")});
}

std::shared_ptr<const Vocabulary> Vocabulary::standard() {
  static const auto instance = std::make_shared<const Vocabulary>();
  return instance;
}

const PropertyDef& Vocabulary::lookupProperty(std::string_view curie) const {
  const auto colon = curie.find(':');
  if (colon != std::string_view::npos && curie.substr(0, colon) == kVocabPrefix) {
    if (const auto* def = find(term(curie.substr(colon + 1)))) return *def;
  }
  throw Error(ErrorCode::UnknownProperty,
              "'" + std::string(curie) + "' is not in the vocabulary");
}

const PropertyDef* Vocabulary::find(const Iri& id) const noexcept {
  const auto it = byIri_.find(id.str());
  return it == byIri_.end() ? nullptr : &defs_[it->second];
}

const PropertyDef& Vocabulary::get(const Iri& id) const {
  if (const auto* def = find(id)) return *def;
  throw Error(ErrorCode::UnknownProperty,
              "<" + id.str() + "> is not in the vocabulary");
}

std::optional<Iri> Vocabulary::inverseOf(const Iri& propertyId) const {
  return get(propertyId).inverseId;
}

Iri Vocabulary::term(std::string_view local) const {
  return Iri::parse(ns_ + std::string(local));
}

std::optional<std::string> Vocabulary::localName(const Iri& iri) const {
  if (iri.str().size() > ns_.size() && iri.str().starts_with(ns_)) {
    return iri.str().substr(ns_.size());
  }
  return std::nullopt;
}

std::string Vocabulary::curieFor(const Iri& iri) const {
  if (auto local = localName(iri)) {
    return std::string(kVocabPrefix) + ":" + *local;
  }
  return iri.str();
}

Iri Vocabulary::kindTerm(EntityKind k) const { return term(entityKindName(k)); }

std::optional<EntityKind> Vocabulary::kindFromTerm(const Iri& iri) const {
  if (auto local = localName(iri)) return entityKindFromName(*local);
  return std::nullopt;
}

Iri Vocabulary::bodyKindTerm(CorporateBodySubkind k) const {
  return term(bodySubkindName(k));
}

Iri Vocabulary::workKindTerm(WorkSubkind k) const {
  return term(workSubkindName(k));
}

std::optional<WorkSubkind> Vocabulary::workKindFromTerm(const Iri& iri) const {
  for (auto k : kWorkKinds) {
    if (workKindTerm(k) == iri) return k;
  }
  return std::nullopt;
}

std::optional<CorporateBodySubkind> Vocabulary::bodyKindFromTerm(
    const Iri& iri) const {
  for (auto k : kBodyKinds) {
    if (bodyKindTerm(k) == iri) return k;
  }
  return std::nullopt;
}

}  // namespace etd
