#include "etd/query.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>

#include "etd/error.hpp"

namespace etd {

namespace {

bool isNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == ':' || c == '/' || c == '%' || c == '~';
}

bool isVarStart(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool isVarChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  QueryAst parse() {
    QueryAst ast;
    skipSpace();
    keyword("SELECT");
    skipSpace();
    if (peek() != '?') fail("a variable");
    while (peek() == '?') {
      const auto [line, column] = position();
      auto name = variable();
      if (std::find(ast.selectVars.begin(), ast.selectVars.end(), name) !=
          ast.selectVars.end()) {
        throw Error(ErrorCode::ParseError, "variable ?" + name + " selected twice",
                    line, column);
      }
      ast.selectVars.push_back(std::move(name));
      skipSpace();
    }
    keyword("WHERE");
    skipSpace();
    expect('{', "'{'");
    skipSpace();
    if (peek() == '}') fail("a term");
    while (peek() != '}') {
      ast.clauses.push_back(clause());
      skipSpace();
    }
    ++pos_;
    skipSpace();
    if (!atEnd()) fail("end of input");

    for (const auto& var : ast.selectVars) {
      if (!mentions(ast, var)) {
        throw Error(ErrorCode::UnboundSelectVariable,
                    "?" + var + " does not occur in any clause");
      }
    }
    return ast;
  }

  static bool mentions(const QueryAst& ast, const std::string& var) {
    const auto is = [&](const QueryTerm& t) {
      const auto* v = std::get_if<QueryVariable>(&t);
      return v && v->name == var;
    };
    return std::any_of(ast.clauses.begin(), ast.clauses.end(),
                       [&](const QueryClause& c) {
                         return is(c.subject) || is(c.property) || is(c.object);
                       });
  }

 private:
  bool atEnd() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  std::pair<std::size_t, std::size_t> position() const {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    return {line, column};
  }

  [[noreturn]] void fail(std::string_view expected) const {
    const auto [line, column] = position();
    std::string found = atEnd() ? "end of input" : "'" + std::string(1, peek()) + "'";
    throw Error(ErrorCode::ParseError,
                "expected " + std::string(expected) + ", found " + found, line,
                column);
  }

  void skipSpace() {
    while (!atEnd() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  void expect(char c, std::string_view expected) {
    if (peek() != c) fail(expected);
    ++pos_;
  }

  void keyword(std::string_view word) {
    const auto size = word.size();
    bool ok = pos_ + size <= text_.size();
    for (std::size_t i = 0; ok && i < size; ++i) {
      ok = std::toupper(static_cast<unsigned char>(text_[pos_ + i])) == word[i];
    }
    if (ok && pos_ + size < text_.size() && isVarChar(text_[pos_ + size])) ok = false;
    if (!ok) fail(word);
    pos_ += size;
  }

  std::string variable() {
    expect('?', "a variable");
    if (!isVarStart(peek())) fail("a variable name");
    const auto begin = pos_;
    while (isVarChar(peek())) ++pos_;
    return std::string(text_.substr(begin, pos_ - begin));
  }

  QueryClause clause() {
    QueryClause c{term(), {}, {}, std::nullopt};
    skipSpace();
    c.property = term();
    skipSpace();
    c.object = term();
    skipSpace();
    if (peek() == '@') {
      ++pos_;
      c.time = timeSpec();
      skipSpace();
    }
    expect('.', "'.' or '@'");
    return c;
  }

  QueryTerm term() {
    const char c = peek();
    if (c == '?') return QueryVariable{variable()};
    if (c == '<') return iri();
    if (c == '"') return literal();
    if (!isNameChar(c)) fail("a term");

    const auto [line, column] = position();
    const auto begin = pos_;
    while (isNameChar(peek()) || (peek() == '.' && isNameChar(peek(1)))) ++pos_;
    const auto word = text_.substr(begin, pos_ - begin);

    const auto colon = word.find(':');
    const auto slash = word.find('/');
    if (colon != std::string_view::npos &&
        (slash == std::string_view::npos || colon < slash)) {
      const auto prefix = word.substr(0, colon);
      if (prefix != "etd") {
        throw Error(ErrorCode::ParseError,
                    "unknown prefix '" + std::string(prefix) + "'", line, column);
      }
      if (colon + 1 == word.size()) {
        throw Error(ErrorCode::ParseError, "empty local name", line, column);
      }
      return QueryCurie{std::string(prefix), std::string(word.substr(colon + 1))};
    }
    if (slash == std::string_view::npos || slash == 0 || slash + 1 == word.size()) {
      throw Error(ErrorCode::ParseError,
                  "expected kind/localId, found '" + std::string(word) + "'",
                  line, column);
    }
    return QueryRelative{std::string(word)};
  }

  Iri iri() {
    const auto [line, column] = position();
    ++pos_;
    const auto close = text_.find('>', pos_);
    if (close == std::string_view::npos) fail("'>'");
    const auto body = text_.substr(pos_, close - pos_);
    pos_ = close + 1;
    try {
      return Iri::parse(body);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, e.detail(), line, column);
    }
  }

  // `digits` hex digits of a \u or \U escape, as UTF-8.
  std::string codePoint(std::size_t digits) {
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      const char h = peek();
      if (!std::isxdigit(static_cast<unsigned char>(h))) fail("a hex digit");
      cp = cp * 16 + std::uint32_t(std::isdigit(static_cast<unsigned char>(h))
                                       ? h - '0'
                                       : std::tolower(h) - 'a' + 10);
      ++pos_;
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("a Unicode scalar value");
    std::string out;
    if (cp < 0x80) {
      out += char(cp);
    } else if (cp < 0x800) {
      out += char(0xC0 | (cp >> 6));
      out += char(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += char(0xE0 | (cp >> 12));
      out += char(0x80 | ((cp >> 6) & 0x3F));
      out += char(0x80 | (cp & 0x3F));
    } else {
      out += char(0xF0 | (cp >> 18));
      out += char(0x80 | ((cp >> 12) & 0x3F));
      out += char(0x80 | ((cp >> 6) & 0x3F));
      out += char(0x80 | (cp & 0x3F));
    }
    return out;
  }

  Literal literal() {
    const auto [line, column] = position();
    ++pos_;
    std::string lexical;
    while (true) {
      if (atEnd()) fail("'\"'");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        lexical += c;
        continue;
      }
      switch (peek()) {
        case '\\': lexical += '\\'; break;
        case '"': lexical += '"'; break;
        case 'n': lexical += '\n'; break;
        case 'r': lexical += '\r'; break;
        case 't': lexical += '\t'; break;
        case 'u': case 'U': {
          const std::size_t digits = peek() == 'u' ? 4 : 8;
          ++pos_;
          lexical += codePoint(digits);
          continue;
        }
        default: fail("an escape sequence");
      }
      ++pos_;
    }

    auto datatype = LiteralDatatype::String;
    std::optional<std::string> language;
    if (peek() == '@' && std::isalpha(static_cast<unsigned char>(peek(1)))) {
      ++pos_;
      const auto begin = pos_;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-') ++pos_;
      language = std::string(text_.substr(begin, pos_ - begin));
    } else if (peek() == '^' && peek(1) == '^') {
      pos_ += 2;
      const auto begin = pos_;
      while (isNameChar(peek())) ++pos_;
      const auto name = text_.substr(begin, pos_ - begin);
      if (name == "string" || name == "xsd:string") {
        datatype = LiteralDatatype::String;
      } else if (name == "integer" || name == "xsd:integer") {
        datatype = LiteralDatatype::Integer;
      } else if (name == "year" || name == "xsd:gYear") {
        datatype = LiteralDatatype::Year;
      } else if (name == "date" || name == "xsd:date") {
        datatype = LiteralDatatype::Date;
      } else {
        pos_ = begin;
        fail("string, integer, year or date");
      }
    }
    try {
      return Literal::make(std::move(lexical), datatype, std::move(language));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, e.detail(), line, column);
    }
  }

  std::optional<TimePoint> point(bool required) {
    const auto [line, column] = position();
    const auto begin = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek())) ||
           (peek() == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      ++pos_;
    }
    if (pos_ == begin) {
      if (required) fail("a time point");
      return std::nullopt;
    }
    try {
      return TimePoint::parse(text_.substr(begin, pos_ - begin));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, e.detail(), line, column);
    }
  }

  TimeConstraint timeSpec() {
    if (peek() != '[') return TimeConstraint::at(*point(true));
    const auto [line, column] = position();
    ++pos_;
    auto start = point(false);
    if (peek() != '.' || peek(1) != '.') fail("'..'");
    pos_ += 2;
    auto end = point(false);
    expect(']', "']'");
    try {
      return TimeConstraint::overlaps(TimeInterval::make(start, end));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, e.detail(), line, column);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string printTerm(const QueryTerm& term) {
  struct {
    std::string operator()(const QueryVariable& v) const { return "?" + v.name; }
    std::string operator()(const QueryCurie& c) const {
      return c.prefix + ":" + c.local;
    }
    std::string operator()(const Iri& i) const { return "<" + i.str() + ">"; }
    std::string operator()(const QueryRelative& r) const { return r.path; }
    std::string operator()(const Literal& l) const {
      std::string out = "\"" + escapeNTriplesString(l.lexical()) + "\"";
      if (l.language()) return out + "@" + *l.language();
      if (l.datatype() != LiteralDatatype::String) {
        out += "^^";
        out += datatypeName(l.datatype());
      }
      return out;
    }
  } visitor;
  return std::visit(visitor, term);
}

}  // namespace

QueryAst parseQuery(std::string_view text) { return Parser(text).parse(); }

std::string printQuery(const QueryAst& ast) {
  std::string out = "SELECT";
  for (const auto& v : ast.selectVars) out += " ?" + v;
  out += " WHERE {\n";
  for (const auto& c : ast.clauses) {
    out += "  " + printTerm(c.subject) + " " + printTerm(c.property) + " " +
           printTerm(c.object);
    if (c.time) {
      out += " @";
      if (c.time->mode == TimeConstraint::Mode::At) {
        out += c.time->interval.start()->toString();
      } else {
        out += "[" + c.time->interval.toString() + "]";
      }
    }
    out += " .\n";
  }
  out += "}\n";
  return out;
}

std::string ResultTable::toString() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out += (i ? "\t?" : "?") + columns[i];
  }
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += "\t";
      out += toNTriples(row[i]);
    }
    out += "\n";
  }
  return out;
}

Term resolveQueryTerm(const Store& store, const QueryTerm& term,
                      bool propertyPosition) {
  const auto& vocab = store.vocab();
  if (const auto* c = std::get_if<QueryCurie>(&term)) {
    if (propertyPosition) return vocab.lookupProperty(c->prefix + ":" + c->local).id;
    return vocab.term(c->local);
  }
  if (const auto* r = std::get_if<QueryRelative>(&term)) {
    return Iri::parse(store.base().str() + "/" + r->path);
  }
  if (const auto* i = std::get_if<Iri>(&term)) {
    if (propertyPosition && !vocab.find(*i)) {
      throw Error(ErrorCode::UnknownProperty, "<" + i->str() + "> is not a property");
    }
    return *i;
  }
  if (const auto* l = std::get_if<Literal>(&term)) {
    if (propertyPosition) {
      throw Error(ErrorCode::UnknownProperty, "a literal cannot be a property");
    }
    return *l;
  }
  throw Error(ErrorCode::ParseError, "variables have no constant value");
}

namespace {

// A clause position is either a variable or a constant.
struct Slot {
  std::optional<std::string> var;
  std::optional<Term> value;
};

struct ResolvedClause {
  Slot s, p, o;
  std::optional<TimeConstraint> time;
};

using Bindings = std::map<std::string, Term>;

class Join {
 public:
  Join(const Store& store, std::vector<ResolvedClause> clauses,
       const std::vector<std::string>& select)
      : store_(store), clauses_(std::move(clauses)), select_(select),
        done_(clauses_.size(), false) {}

  std::set<std::vector<Term>> run() {
    Bindings b;
    step(b, 0);
    return std::move(rows_);
  }

 private:
  std::optional<Term> current(const Slot& slot, const Bindings& b) const {
    if (slot.value) return slot.value;
    if (const auto it = b.find(*slot.var); it != b.end()) return it->second;
    return std::nullopt;
  }

  // Most constrained clause first; earlier clauses win ties.
  std::size_t pick(const Bindings& b) const {
    std::size_t best = clauses_.size();
    int bestScore = -1;
    for (std::size_t i = 0; i < clauses_.size(); ++i) {
      if (done_[i]) continue;
      const auto& c = clauses_[i];
      const int score = int(current(c.s, b).has_value()) +
                        int(current(c.p, b).has_value()) +
                        int(current(c.o, b).has_value());
      if (score > bestScore) {
        best = i;
        bestScore = score;
      }
    }
    return best;
  }

  static bool bind(Bindings& b, const Slot& slot, const Term& value,
                   std::vector<std::string>& added) {
    if (!slot.var) return true;
    const auto [it, inserted] = b.emplace(*slot.var, value);
    if (inserted) {
      added.push_back(*slot.var);
      return true;
    }
    return it->second == value;
  }

  void step(Bindings& b, std::size_t depth) {
    if (depth == clauses_.size()) {
      std::vector<Term> row;
      for (const auto& v : select_) row.push_back(b.at(v));
      rows_.insert(std::move(row));
      return;
    }
    const auto index = pick(b);
    const auto& c = clauses_[index];
    const auto s = current(c.s, b);
    const auto p = current(c.p, b);
    const auto o = current(c.o, b);
    // A variable bound elsewhere to a non-property term matches nothing here.
    if ((s && !std::holds_alternative<Iri>(*s)) ||
        (p && (!std::holds_alternative<Iri>(*p) ||
               !store_.vocab().find(std::get<Iri>(*p))))) {
      return;
    }
    Pattern pattern;
    if (s) pattern.subject = std::get<Iri>(*s);
    if (p) pattern.property = std::get<Iri>(*p);
    pattern.object = o;
    pattern.time = c.time;
    pattern.inference = Inference::Inverse;

    done_[index] = true;
    for (const auto& m : store_.matchPattern(pattern)) {
      std::vector<std::string> added;
      if (bind(b, c.s, Term{m.triple.subject}, added) &&
          bind(b, c.p, Term{m.triple.property}, added) &&
          bind(b, c.o, m.triple.object, added)) {
        step(b, depth + 1);
      }
      for (const auto& v : added) b.erase(v);
    }
    done_[index] = false;
  }

  const Store& store_;
  std::vector<ResolvedClause> clauses_;
  const std::vector<std::string>& select_;
  std::vector<bool> done_;
  std::set<std::vector<Term>> rows_;
};

}  // namespace

ResultTable evalQuery(const Store& store, const QueryAst& ast) {
  for (const auto& var : ast.selectVars) {
    bool found = false;
    for (const auto& c : ast.clauses) {
      for (const auto* t : {&c.subject, &c.property, &c.object}) {
        const auto* v = std::get_if<QueryVariable>(t);
        found = found || (v && v->name == var);
      }
    }
    if (!found) {
      throw Error(ErrorCode::UnboundSelectVariable,
                  "?" + var + " does not occur in any clause");
    }
  }

  std::vector<ResolvedClause> clauses;
  for (const auto& c : ast.clauses) {
    const auto slot = [&](const QueryTerm& t, bool property) {
      if (const auto* v = std::get_if<QueryVariable>(&t)) return Slot{v->name, {}};
      return Slot{std::nullopt, resolveQueryTerm(store, t, property)};
    };
    clauses.push_back(
        {slot(c.subject, false), slot(c.property, true), slot(c.object, false), c.time});
  }

  ResultTable table{ast.selectVars, {}};
  if (clauses.empty()) return table;
  for (auto& row : Join(store, std::move(clauses), ast.selectVars).run()) {
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace etd
