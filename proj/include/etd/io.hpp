#pragma once
// Serializations of a store.
//
// Temporal quads (.tnq). Every statement becomes one N-Quads line whose graph
// term names its temporal and provenance context:
//
//   <s> <p> <o> <base/ctx/HASH> .
//
// and every context is described by default-graph lines using local keys:
//
//   <ctx> etd:validFrom "1996" .        omitted when unbounded below
//   <ctx> etd:validTo "2000" .          omitted when unbounded above
//   <ctx> etd:source "pA" .             source record id
//   <ctx> etd:authority <iri> .         asserting authority
//   <ctx> etd:assertedAt "2024-05-01" . omitted when unknown
//
// HASH is the first 16 hex digits of SHA-256 over those five values, so a
// context id is stable across runs. Lines are sorted bytewise and each ends
// with LF.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "etd/model.hpp"
#include "etd/store.hpp"

namespace etd {

Iri contextIri(const Iri& base, const Validity& validity,
               const ProvenanceTag& provenance);

std::string exportQuads(const Store& store);

// The base is taken from the context Iris; `fallbackBase` is used for an empty
// document. Throws ParseError (with line), DanglingContext, UnknownProperty
// and the store's own validation errors.
Store importQuads(std::string_view document,
                  const Iri& fallbackBase = Iri::parse(kDefaultBaseIri));

// Graphviz digraph. Nodes are entities, named by their Iri relative to the
// base; edges are Iri-valued statements labeled `property [interval]`. With a
// focus only nodes within `radius` hops are kept. Throws NotFound for an
// unknown focus and std::invalid_argument for a zero radius.
std::string exportDot(const Store& store, const std::optional<Iri>& focus = {},
                      std::size_t radius = 1);

struct DescriptionDocument {
  Iri focus;
  std::vector<PatternMatch> statements;       // touching focus, incl. derived
  std::map<Iri, std::string> neighborLabels;  // one label per neighbor
  std::vector<TemporalTriple> labelTriples;   // where those labels come from
};

// Throws NotFound when the store never mentions the focus.
DescriptionDocument describeEntity(const Store& store, const Iri& focus);

// Quad form of a description: the stored statements behind it plus the
// neighbor labels, with their contexts. A subset of exportQuads.
std::string serializeDescription(const Store& store,
                                 const DescriptionDocument& doc);

// Iri relative to the base (`person/pA`), or the full Iri outside it.
std::string relativeId(const Store& store, const Iri& iri);

// The most recently started label (an undated one counts as oldest).
std::optional<TemporalTriple> currentLabel(const Store& store, const Iri& entity);

}  // namespace etd
