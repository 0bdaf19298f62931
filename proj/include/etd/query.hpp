#pragma once
// Temporal triple-pattern queries.
//
//   query  := SELECT var+ WHERE { clause+ }
//   clause := term term term [@ time] .
//   time   := point                      validity contains the point
//           | [ point? .. point? ]       validity overlaps the interval
//   term   := ?name | etd:local | <iri> | kind/localId | "text"[@lang|^^type]
//
// Keywords are case-insensitive. A `kind/localId` term is resolved against
// the store base. Literal types are string, integer, year and date (the
// xsd: names are accepted as well).

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "etd/model.hpp"
#include "etd/store.hpp"

namespace etd {

struct QueryVariable {
  std::string name;  // without the leading `?`
  friend bool operator==(const QueryVariable&, const QueryVariable&) = default;
};

struct QueryCurie {
  std::string prefix;
  std::string local;
  friend bool operator==(const QueryCurie&, const QueryCurie&) = default;
};

struct QueryRelative {
  std::string path;  // e.g. person/pA
  friend bool operator==(const QueryRelative&, const QueryRelative&) = default;
};

using QueryTerm =
    std::variant<QueryVariable, QueryCurie, Iri, QueryRelative, Literal>;

struct QueryClause {
  QueryTerm subject;
  QueryTerm property;
  QueryTerm object;
  std::optional<TimeConstraint> time;  // At or Overlaps

  friend bool operator==(const QueryClause&, const QueryClause&) = default;
};

struct QueryAst {
  std::vector<std::string> selectVars;
  std::vector<QueryClause> clauses;

  friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

// Throws ParseError (with line, column and the expected tokens) or
// UnboundSelectVariable.
QueryAst parseQuery(std::string_view text);
std::string printQuery(const QueryAst& ast);

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Term>> rows;  // canonical order, no duplicates

  // Tab-separated, header row first, terms in N-Triples form.
  std::string toString() const;
};

// Conjunctive join with inverse inference. Throws UnknownProperty or
// UnboundSelectVariable.
ResultTable evalQuery(const Store& store, const QueryAst& ast);

// Resolves a constant term against the store's base and vocabulary.
// `propertyPosition` makes an unknown property an error.
Term resolveQueryTerm(const Store& store, const QueryTerm& term,
                      bool propertyPosition);

}  // namespace etd
