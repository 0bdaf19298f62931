#include "etd/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <stdexcept>

#include "etd/error.hpp"

namespace etd {

namespace {

constexpr std::string_view kMetaKeys[] = {"validFrom", "validTo", "source",
                                          "authority", "assertedAt"};

std::string sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int size = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &size, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < size; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

struct ContextFields {
  std::optional<std::string> validFrom;
  std::optional<std::string> validTo;
  std::string source;
  Iri authority;
  std::optional<std::string> assertedAt;
};

ContextFields fieldsOf(const Validity& validity, const ProvenanceTag& provenance) {
  ContextFields f{std::nullopt, std::nullopt, provenance.sourceRecordId,
                  provenance.assertingAuthority, std::nullopt};
  if (const auto& iv = validity.interval()) {
    if (iv->start()) f.validFrom = iv->start()->toString();
    if (iv->end()) f.validTo = iv->end()->toString();
  }
  if (provenance.assertedAt) f.assertedAt = provenance.assertedAt->toString();
  return f;
}

// Length-prefixed so no choice of field contents can collide.
std::string hashInput(const ContextFields& f) {
  std::string out;
  const auto add = [&](const std::optional<std::string>& v) {
    if (!v) {
      out += "-;";
      return;
    }
    out += std::to_string(v->size()) + ":" + *v + ";";
  };
  add(f.validFrom);
  add(f.validTo);
  add(f.source);
  add(f.authority.str());
  add(f.assertedAt);
  return out;
}

Iri contextFor(const Iri& base, const ContextFields& f) {
  return Iri::parse(base.str() + "/ctx/" + sha256Hex(hashInput(f)).substr(0, 16));
}

std::string literalLine(const Iri& ctx, const Iri& key, std::string_view value) {
  return "<" + ctx.str() + "> <" + key.str() + "> \"" +
         escapeNTriplesString(value) + "\" .\n";
}

// Appends data and context lines for `triples`; contexts are emitted once.
void appendQuads(const Store& store, const std::vector<TemporalTriple>& triples,
                 std::set<std::string>& lines) {
  const auto& vocab = store.vocab();
  std::set<Iri> described;
  for (const auto& t : triples) {
    const auto fields = fieldsOf(t.validity, t.provenance);
    const auto ctx = contextFor(store.base(), fields);
    lines.insert(toNTriples(Term{t.subject}) + " " + toNTriples(Term{t.property}) +
                 " " + toNTriples(t.object) + " " + toNTriples(Term{ctx}) + " .\n");
    if (!described.insert(ctx).second) continue;
    if (fields.validFrom) {
      lines.insert(literalLine(ctx, vocab.term("validFrom"), *fields.validFrom));
    }
    if (fields.validTo) {
      lines.insert(literalLine(ctx, vocab.term("validTo"), *fields.validTo));
    }
    lines.insert(literalLine(ctx, vocab.term("source"), fields.source));
    lines.insert("<" + ctx.str() + "> <" + vocab.term("authority").str() + "> <" +
                 fields.authority.str() + "> .\n");
    if (fields.assertedAt) {
      lines.insert(literalLine(ctx, vocab.term("assertedAt"), *fields.assertedAt));
    }
  }
}

std::string joinLines(const std::set<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l;
  return out;
}

// ---------------------------------------------------------------------------
// Quad line parsing

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  bool atEnd() {
    skipSpace();
    return pos_ >= text_.size();
  }

  bool peekIs(char c) {
    skipSpace();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  Term term() {
    skipSpace();
    if (peekIs('<')) return iri();
    if (peekIs('"')) return literal();
    fail("expected '<' or '\"'");
  }

  Iri iri() {
    skipSpace();
    if (!peekIs('<')) fail("expected '<'");
    const auto close = text_.find('>', pos_);
    if (close == std::string_view::npos) fail("unterminated Iri");
    const auto body = text_.substr(pos_ + 1, close - pos_ - 1);
    const auto column = pos_ + 1;
    pos_ = close + 1;
    try {
      return Iri::parse(body);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, e.detail(), line_, column);
    }
  }

  void dot() {
    if (!peekIs('.')) fail("expected '.'");
    ++pos_;
    if (!atEnd()) fail("unexpected text after '.'");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::ParseError, message, line_, pos_ + 1);
  }

 private:
  void skipSpace() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  Literal literal() {
    const auto column = pos_ + 1;
    ++pos_;
    std::string lexical;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated literal");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        lexical += c;
        continue;
      }
      if (pos_ >= text_.size()) fail("unterminated escape");
      switch (text_[pos_++]) {
        case '\\': lexical += '\\'; break;
        case '"': lexical += '"'; break;
        case 'n': lexical += '\n'; break;
        case 'r': lexical += '\r'; break;
        case 't': lexical += '\t'; break;
        default: fail("unknown escape");
      }
    }
    auto datatype = LiteralDatatype::String;
    std::optional<std::string> language;
    if (pos_ < text_.size() && text_[pos_] == '@') {
      const auto begin = ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-')) {
        ++pos_;
      }
      language = std::string(text_.substr(begin, pos_ - begin));
    } else if (text_.substr(pos_).starts_with("^^")) {
      pos_ += 2;
      const auto type = iri();
      bool known = false;
      for (auto dt : {LiteralDatatype::String, LiteralDatatype::Integer,
                      LiteralDatatype::Year, LiteralDatatype::Date}) {
        if (datatypeIri(dt) == type.str()) {
          datatype = dt;
          known = true;
        }
      }
      if (!known) fail("unsupported datatype <" + type.str() + ">");
    }
    try {
      return Literal::make(std::move(lexical), datatype, std::move(language));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, e.detail(), line_, column);
    }
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

struct PendingContext {
  std::map<std::string, std::pair<Term, std::size_t>> values;  // key -> (value, line)
  std::size_t firstLine = 0;
};

struct PendingQuad {
  Iri subject;
  Iri property;
  Term object;
  Iri ctx;
  std::size_t line;
};

}  // namespace

Iri contextIri(const Iri& base, const Validity& validity,
               const ProvenanceTag& provenance) {
  return contextFor(base, fieldsOf(validity, provenance));
}

std::string exportQuads(const Store& store) {
  std::set<std::string> lines;
  appendQuads(store, store.triples(), lines);
  return joinLines(lines);
}

Store importQuads(std::string_view document, const Iri& fallbackBase) {
  auto vocab = Vocabulary::standard();
  std::map<Iri, PendingContext> contexts;
  std::vector<PendingQuad> quads;

  std::size_t lineNo = 0;
  std::size_t begin = 0;
  while (begin < document.size()) {
    auto end = document.find('\n', begin);
    if (end == std::string_view::npos) end = document.size();
    const auto text = document.substr(begin, end - begin);
    begin = end + 1;
    ++lineNo;
    if (text.find_first_not_of(" \t") == std::string_view::npos) continue;

    LineParser p(text, lineNo);
    const auto subject = p.iri();
    const auto property = p.iri();
    const auto object = p.term();
    if (p.peekIs('<')) {
      const auto ctx = p.iri();
      p.dot();
      quads.push_back({subject, property, object, ctx, lineNo});
      continue;
    }
    p.dot();

    const auto local = vocab->localName(property);
    if (!local || std::find(std::begin(kMetaKeys), std::end(kMetaKeys), *local) ==
                      std::end(kMetaKeys)) {
      throw Error(ErrorCode::ParseError,
                  "unknown context key <" + property.str() + ">", lineNo, 1);
    }
    auto& pending = contexts[subject];
    if (!pending.firstLine) pending.firstLine = lineNo;
    if (!pending.values.emplace(*local, std::pair{object, lineNo}).second) {
      throw Error(ErrorCode::ParseError, "context key " + *local + " repeated",
                  lineNo, 1);
    }
  }

  // Rebuild each context and check that its name matches its contents.
  std::optional<Iri> base;
  std::map<Iri, std::pair<Validity, ProvenanceTag>> resolved;
  for (const auto& [ctx, pending] : contexts) {
    const auto literalValue = [&](std::string_view key) -> std::optional<std::string> {
      const auto it = pending.values.find(std::string(key));
      if (it == pending.values.end()) return std::nullopt;
      const auto* lit = std::get_if<Literal>(&it->second.first);
      if (!lit) {
        throw Error(ErrorCode::ParseError, std::string(key) + " must be a literal",
                    it->second.second, 1);
      }
      return lit->lexical();
    };
    const auto source = literalValue("source");
    const auto authorityIt = pending.values.find("authority");
    if (!source || authorityIt == pending.values.end()) {
      throw Error(ErrorCode::DanglingContext,
                  "<" + ctx.str() + "> lacks source or authority", pending.firstLine, 1);
    }
    const auto* authority = std::get_if<Iri>(&authorityIt->second.first);
    if (!authority) {
      throw Error(ErrorCode::ParseError, "authority must be an Iri",
                  authorityIt->second.second, 1);
    }
    try {
      const auto from = literalValue("validFrom");
      const auto to = literalValue("validTo");
      const auto asserted = literalValue("assertedAt");
      Validity validity = Validity::always();
      if (from || to) {
        validity = Validity::during(TimeInterval::make(
            from ? std::optional{TimePoint::parse(*from)} : std::nullopt,
            to ? std::optional{TimePoint::parse(*to)} : std::nullopt));
      }
      ProvenanceTag provenance{*source, *authority,
                               asserted ? std::optional{TimePoint::parse(*asserted)}
                                        : std::nullopt};
      provenance.validate();

      const auto& text = ctx.str();
      const auto marker = text.rfind("/ctx/");
      if (marker == std::string::npos) {
        throw Error(ErrorCode::ParseError, "<" + text + "> is not a context Iri");
      }
      const auto ctxBase = Iri::parse(text.substr(0, marker));
      if (base && *base != ctxBase) {
        throw Error(ErrorCode::ParseError, "contexts disagree on the base Iri");
      }
      base = ctxBase;
      if (contextIri(ctxBase, validity, provenance) != ctx) {
        throw Error(ErrorCode::ParseError,
                    "<" + text + "> does not match its metadata");
      }
      resolved.emplace(ctx, std::pair{validity, provenance});
    } catch (const Error& e) {
      if (e.line()) throw;
      throw Error(e.code() == ErrorCode::InvalidTriple ? ErrorCode::ParseError
                                                       : e.code(),
                  e.detail(), pending.firstLine, 1);
    }
  }

  Store store(base.value_or(fallbackBase), vocab);
  std::set<Iri> used;
  for (const auto& q : quads) {
    const auto it = resolved.find(q.ctx);
    if (it == resolved.end()) {
      throw Error(ErrorCode::DanglingContext,
                  "<" + q.ctx.str() + "> has no metadata", q.line, 1);
    }
    used.insert(q.ctx);
    try {
      store.insertTriple({q.subject, q.property, q.object, it->second.first,
                          it->second.second});
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), q.line, 1);
    }
  }
  for (const auto& [ctx, pending] : contexts) {
    if (!used.contains(ctx)) {
      throw Error(ErrorCode::ParseError,
                  "<" + ctx.str() + "> describes no statement", pending.firstLine, 1);
    }
  }
  return store;
}

// ---------------------------------------------------------------------------
// Descriptions

std::string relativeId(const Store& store, const Iri& iri) {
  const auto prefix = store.base().str() + "/";
  if (iri.str().size() > prefix.size() && iri.str().starts_with(prefix)) {
    return iri.str().substr(prefix.size());
  }
  return iri.str();
}

std::optional<TemporalTriple> currentLabel(const Store& store, const Iri& entity) {
  std::optional<TemporalTriple> best;
  for (const auto& m : store.matchPattern({entity, store.vocab().ids().label,
                                           std::nullopt, std::nullopt,
                                           Inference::None})) {
    if (!best) {
      best = m.triple;
      continue;
    }
    const auto a = m.triple.validity.days().first;
    const auto b = best->validity.days().first;
    if (a > b || (a == b && std::get<Literal>(m.triple.object).lexical() <
                                std::get<Literal>(best->object).lexical())) {
      best = m.triple;
    }
  }
  return best;
}

DescriptionDocument describeEntity(const Store& store, const Iri& focus) {
  if (!store.mentions(focus)) {
    throw Error(ErrorCode::NotFound, "<" + focus.str() + "> is not in the store");
  }
  DescriptionDocument doc{focus, {}, {}, {}};
  for (const bool asSubject : {true, false}) {
    Pattern p;
    if (asSubject) {
      p.subject = focus;
    } else {
      p.object = Term{focus};
    }
    p.inference = Inference::Inverse;
    for (auto& m : store.matchPattern(p)) {
      // A self-loop shows up from both ends.
      if (!asSubject && m.triple.subject == focus) continue;
      doc.statements.push_back(std::move(m));
    }
  }
  std::sort(doc.statements.begin(), doc.statements.end(),
            [](const PatternMatch& a, const PatternMatch& b) {
              if (canonicalLess(a.triple, b.triple)) return true;
              if (canonicalLess(b.triple, a.triple)) return false;
              return a.derived < b.derived;
            });

  const auto& vocab = store.vocab();
  std::set<Iri> neighbors;
  for (const auto& m : doc.statements) {
    for (const Term& end : {Term{m.triple.subject}, m.triple.object}) {
      const auto* iri = std::get_if<Iri>(&end);
      if (iri && *iri != focus && !vocab.localName(*iri)) neighbors.insert(*iri);
    }
  }
  for (const auto& n : neighbors) {
    if (auto label = currentLabel(store, n)) {
      doc.neighborLabels.emplace(n, std::get<Literal>(label->object).lexical());
      doc.labelTriples.push_back(std::move(*label));
    } else {
      doc.neighborLabels.emplace(n, relativeId(store, n));
    }
  }
  return doc;
}

std::string serializeDescription(const Store& store,
                                 const DescriptionDocument& doc) {
  std::vector<TemporalTriple> triples;
  for (const auto& m : doc.statements) {
    if (!m.derived) {
      triples.push_back(m.triple);
      continue;
    }
    auto stored = m.triple;
    stored.property = *store.vocab().inverseOf(m.triple.property);
    stored.object = Term{m.triple.subject};
    stored.subject = std::get<Iri>(m.triple.object);
    triples.push_back(std::move(stored));
  }
  for (const auto& t : doc.labelTriples) triples.push_back(t);
  std::set<std::string> lines;
  appendQuads(store, triples, lines);
  return joinLines(lines);
}

// ---------------------------------------------------------------------------
// DOT

namespace {

std::string dotQuote(std::string_view text) {
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

std::string_view shapeFor(std::optional<EntityKind> kind) {
  if (!kind) return "plaintext";
  switch (*kind) {
    case EntityKind::Person: return "ellipse";
    case EntityKind::CorporateBody: return "box";
    case EntityKind::Work: return "note";
    case EntityKind::Gender: return "diamond";
    case EntityKind::Place: return "house";
    case EntityKind::ExternalResource: return "plaintext";
  }
  return "plaintext";
}

}  // namespace

std::string exportDot(const Store& store, const std::optional<Iri>& focus,
                      std::size_t radius) {
  const auto& ids = store.vocab().ids();
  const std::set<Iri> classProperties{ids.kind, ids.bodyKind, ids.workKind};

  std::vector<TemporalTriple> edges;
  std::set<Iri> nodes;
  for (const auto& t : store.triples()) {
    if (t.property == ids.kind) nodes.insert(t.subject);
    const auto* object = std::get_if<Iri>(&t.object);
    if (!object || classProperties.contains(t.property)) continue;
    nodes.insert(t.subject);
    nodes.insert(*object);
    edges.push_back(t);
  }

  if (focus) {
    if (radius == 0) throw std::invalid_argument("radius must be at least 1");
    if (!store.mentions(*focus)) {
      throw Error(ErrorCode::NotFound, "<" + focus->str() + "> is not in the store");
    }
    std::map<Iri, std::set<Iri>> adjacent;
    for (const auto& e : edges) {
      const auto& o = std::get<Iri>(e.object);
      adjacent[e.subject].insert(o);
      adjacent[o].insert(e.subject);
    }
    std::map<Iri, std::size_t> hops{{*focus, 0}};
    std::deque<Iri> queue{*focus};
    while (!queue.empty()) {
      const auto node = queue.front();
      queue.pop_front();
      if (hops[node] == radius) continue;
      for (const auto& n : adjacent[node]) {
        if (hops.emplace(n, hops[node] + 1).second) queue.push_back(n);
      }
    }
    nodes.clear();
    for (const auto& [n, _] : hops) nodes.insert(n);
    std::erase_if(edges, [&](const TemporalTriple& e) {
      return !nodes.contains(e.subject) || !nodes.contains(std::get<Iri>(e.object));
    });
  }

  std::string out = "digraph etd {\n";
  for (const auto& n : nodes) {
    const auto label = currentLabel(store, n);
    out += "  " + dotQuote(relativeId(store, n)) + " [label=" +
           dotQuote(label ? std::get<Literal>(label->object).lexical()
                          : relativeId(store, n)) +
           ", shape=" + std::string(shapeFor(store.kindOf(n))) + "];\n";
  }
  std::set<std::string> seen;
  for (const auto& e : edges) {
    auto name = store.vocab().localName(e.property).value_or(e.property.str());
    if (!e.validity.isAlways()) name += " [" + e.validity.toString() + "]";
    auto line = "  " + dotQuote(relativeId(store, e.subject)) + " -> " +
                dotQuote(relativeId(store, std::get<Iri>(e.object))) +
                " [label=" + dotQuote(name) + "];\n";
    if (seen.insert(line).second) out += line;
  }
  out += "}\n";
  return out;
}

}  // namespace etd
