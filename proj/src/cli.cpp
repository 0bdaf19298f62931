#include "etd/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "etd/analytics.hpp"
#include "etd/error.hpp"
#include "etd/ingest.hpp"
#include "etd/io.hpp"
#include "etd/query.hpp"
#include "etd/reason.hpp"

namespace etd {

Iri defaultBaseIri() {
  if (const char* env = std::getenv("ETD_BASE_IRI"); env && *env) {
    return Iri::parse(env);
  }
  return Iri::parse(kDefaultBaseIri);
}

namespace {

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path);
  return buffer.str();
}

}  // namespace

Store loadStore(const std::string& path, const Iri& fallbackBase) {
  return importQuads(readFile(path), fallbackBase);
}

void saveStore(const Store& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << exportQuads(store);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
}

namespace {

constexpr EntityKind kAddressableKinds[] = {
    EntityKind::Person, EntityKind::CorporateBody, EntityKind::Work,
    EntityKind::Place, EntityKind::Gender};

std::optional<EntityKind> kindForSegment(std::string_view segment) {
  for (auto k : kAddressableKinds) {
    if (kindSegment(k) == segment) return k;
  }
  return std::nullopt;
}

// `kind/localId`, or a bare local id when it names exactly one entity.
Iri resolveId(const Store& store, const std::string& id) {
  if (const auto slash = id.find('/'); slash != std::string::npos) {
    if (const auto kind = kindForSegment(std::string_view(id).substr(0, slash))) {
      return resolveEntity(store, *kind, id.substr(slash + 1), store.base());
    }
    throw Error(ErrorCode::NotFound, "'" + id + "' does not name an entity kind");
  }
  std::vector<Iri> found;
  for (auto k : kAddressableKinds) {
    const auto iri = mintIri(store.base(), k, id);
    if (store.kindOf(iri) == k) found.push_back(iri);
  }
  if (found.size() == 1) return found.front();
  if (found.empty()) throw Error(ErrorCode::NotFound, "'" + id + "' is not in the store");
  throw Error(ErrorCode::NotFound,
              "'" + id + "' is ambiguous; prefix it with its kind, e.g. person/" + id);
}

std::string genderName(const Store& store, const GenderKey& g) {
  return g ? relativeId(store, *g) : "unspecified";
}

struct ReportArgs {
  std::string kind;
  std::string at;
  std::string during;
  std::string scope;
  std::string workKind = "any";
  std::string role = "professor";
  bool directOnly = false;
};

TimeInterval reportInterval(const ReportArgs& a) {
  if (!a.during.empty()) return TimeInterval::parse(a.during);
  if (!a.at.empty()) return TimeInterval::instant(TimePoint::parse(a.at));
  return TimeInterval::make(TimePoint::make(1), TimePoint::make(9999));
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void runReport(const Store& store, const ReportArgs& a, std::ostream& out) {
  const auto kind = workKindFilterFromName(a.workKind);
  if (!kind) throw UsageError("--kind must be master, phd or any");

  if (a.kind == "gender") {
    if (a.scope.empty() || a.at.empty()) {
      throw UsageError("report gender needs --scope and --at");
    }
    const auto role = tallyRoleFromName(a.role);
    if (!role) {
      throw UsageError("--role must be student, professor, advisor, committee or dissertant");
    }
    const auto tally = genderTally(store, resolveId(store, a.scope), *role,
                                   TimePoint::parse(a.at), !a.directOnly);
    out << "gender\tcount\n";
    for (const auto& [g, n] : tally.counts) {
      out << relativeId(store, g) << "\t" << n << "\n";
    }
    out << "unspecified\t" << tally.unspecified << "\n";
    out << "total\t" << tally.total() << "\n";
  } else if (a.kind == "supervision") {
    const auto rate = supervisorGenderRate(store, reportInterval(a), *kind);
    out << "gender\tsupervisions\tshare\n";
    for (const auto& [g, s] : rate.byGender) {
      out << relativeId(store, g) << "\t" << s.supervisions << "\t"
          << s.share.toDecimal(4) << "\n";
    }
    out << "unspecified\t" << rate.unspecified << "\t-\n";
  } else if (a.kind == "matrix") {
    const auto matrix = supervisionGenderMatrix(store, reportInterval(a), *kind);
    out << "advisorGender\tdissertantGender\tcount\n";
    for (const auto& [advisor, row] : matrix) {
      for (const auto& [dissertant, n] : row) {
        out << genderName(store, advisor) << "\t" << genderName(store, dissertant)
            << "\t" << n << "\n";
      }
    }
  } else if (a.kind == "interdisciplinary") {
    const auto result = interdisciplinaryCount(store, reportInterval(a));
    out << "work\n";
    for (const auto& w : result.works) out << relativeId(store, w) << "\n";
    out << "count\t" << result.count << "\n";
  } else if (a.kind == "mobility") {
    const auto result = mobilityByGender(store, reportInterval(a));
    out << "person\tfrom\tto\tfromRole\ttoRole\tdeparture\tarrival\tgapYears\n";
    for (const auto& e : result.events) {
      out << relativeId(store, e.person) << "\t"
          << relativeId(store, e.fromInstitution) << "\t"
          << relativeId(store, e.toInstitution) << "\t" << roleName(e.fromRole)
          << "\t" << roleName(e.toRole) << "\t" << e.departure.toString() << "\t"
          << e.arrival.toString() << "\t" << e.gapYears << "\n";
    }
    out << "\ngender\tmoves\tavgGapYears\n";
    for (const auto& [g, s] : result.byGender) {
      out << genderName(store, g) << "\t" << s.moves << "\t"
          << s.avgGapYears.toDecimal(4) << "\n";
    }
  } else if (a.kind == "cooperation") {
    out << "institutionA\tinstitutionB\tsharedWorks\n";
    for (const auto& c : institutionCooperation(store, reportInterval(a))) {
      out << relativeId(store, c.institutionA) << "\t"
          << relativeId(store, c.institutionB) << "\t" << c.sharedWorks << "\n";
    }
  } else if (a.kind == "structure") {
    if (a.scope.empty()) throw UsageError("report structure needs --scope");
    out << "date\tevent\tbody\tcounterpart\tdetail\n";
    for (const auto& e : structureTimeline(store, resolveId(store, a.scope))) {
      out << e.when.toString() << "\t" << structureEventKindName(e.kind) << "\t"
          << relativeId(store, e.body) << "\t"
          << (e.counterpart ? relativeId(store, *e.counterpart) : "-") << "\t"
          << (e.detail.empty() ? "-" : e.detail) << "\n";
    }
  } else {
    throw UsageError("unknown report '" + a.kind + "'");
  }
}

int ingestFiles(const std::vector<std::string>& files, const std::string& base,
                const std::string& authority, const std::string& assertedAt,
                const std::string& outPath, std::ostream& out, std::ostream& err) {
  IngestOptions options;
  options.base = base.empty() ? defaultBaseIri() : Iri::parse(base);
  options.authority = authority.empty() ? options.base : Iri::parse(authority);
  if (!assertedAt.empty()) options.batchDate = TimePoint::parse(assertedAt);

  std::vector<Record> records;
  std::set<std::pair<RecordKind, std::string>> seen;
  for (const auto& file : files) {
    std::vector<Record> parsed;
    try {
      parsed = parseRecords(readFile(file));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::IoError) throw;
      err << file << ": " << e.what() << "\n";
      return kExitData;
    }
    for (auto& r : parsed) {
      if (!seen.emplace(r.kind, r.localId).second) {
        err << file << ": " << Error(ErrorCode::DuplicateLocalId,
                                     std::string(recordKindName(r.kind)) + " '" +
                                         r.localId + "' defined in an earlier file",
                                     r.line).what()
            << "\n";
        return kExitData;
      }
      records.push_back(std::move(r));
    }
  }

  auto result = recordsToGraph(records, options);
  if (!result.report.ok()) {
    err << result.report.toString();
    return kExitData;
  }
  saveStore(result.store, outPath);
  out << result.report.toString();
  return kExitOk;
}

int exitCodeFor(ErrorCode code) {
  return code == ErrorCode::IoError || code == ErrorCode::PortInUse ? kExitIo
                                                                    : kExitData;
}

}  // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Temporal knowledge graph of theses, dissertations and the "
               "people and institutions behind them.",
               "etd"};
  app.require_subcommand(1);

  std::string storePath;
  const auto addStore = [&](CLI::App* cmd) {
    cmd->add_option("--store", storePath, "Store file (.tnq)")->required();
  };

  std::vector<std::string> ingestInputs;
  std::string base, authority, assertedAt, outPath;
  auto* ingest = app.add_subcommand("ingest", "Turn record files into a store");
  ingest->add_option("files", ingestInputs, "Record files")->required();
  ingest->add_option("--base", base, "Base Iri for minted identifiers");
  ingest->add_option("--authority", authority, "Asserting authority Iri");
  ingest->add_option("--asserted-at", assertedAt, "Batch date (default: today)");
  ingest->add_option("--out", outPath, "Store file to write")->required();

  std::string dsl;
  auto* query = app.add_subcommand("query", "Evaluate a triple-pattern query");
  addStore(query);
  query->add_option("dsl", dsl, "SELECT ... WHERE { ... }")->required();

  ReportArgs reportArgs;
  auto* report = app.add_subcommand("report", "Print a canned analytic");
  addStore(report);
  report->add_option("report", reportArgs.kind,
                     "gender|supervision|matrix|interdisciplinary|mobility|"
                     "cooperation|structure")
      ->required();
  auto* atOpt = report->add_option("--at", reportArgs.at, "Time point");
  auto* duringOpt = report->add_option("--during", reportArgs.during, "Interval A..B");
  atOpt->excludes(duringOpt);
  report->add_option("--scope", reportArgs.scope, "Body id");
  report->add_option("--kind", reportArgs.workKind, "master|phd|any");
  report->add_option("--role", reportArgs.role,
                     "student|professor|advisor|committee|dissertant");
  report->add_flag("--direct-only", reportArgs.directOnly,
                   "Do not include subdivisions of the scope");

  std::string format = "tnq", focus;
  std::size_t radius = 1;
  auto* exportCmd = app.add_subcommand("export", "Serialize a store");
  addStore(exportCmd);
  exportCmd->add_option("--format", format, "tnq|dot")
      ->check(CLI::IsMember({"tnq", "dot"}));
  auto* focusOpt = exportCmd->add_option("--focus", focus, "Entity id (dot only)");
  exportCmd->add_option("--radius", radius, "Neighborhood radius")
      ->check(CLI::PositiveNumber)
      ->needs(focusOpt);

  std::string describeId;
  auto* describe = app.add_subcommand("describe", "Describe one entity");
  addStore(describe);
  describe->add_option("id", describeId, "Entity id, e.g. person/pA")->required();

  auto* stats = app.add_subcommand("stats", "Entity and triple census");
  addStore(stats);

  int port = 8080;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Serve entity descriptions over HTTP");
  addStore(serve);
  serve->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Address to bind");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (ingest->parsed()) {
      return ingestFiles(ingestInputs, base, authority, assertedAt, outPath, out, err);
    }
    const auto store = std::make_shared<const Store>(loadStore(storePath));
    if (query->parsed()) {
      out << evalQuery(*store, parseQuery(dsl)).toString();
    } else if (report->parsed()) {
      runReport(*store, reportArgs, out);
    } else if (exportCmd->parsed()) {
      if (format == "tnq") {
        if (!focus.empty()) throw UsageError("--focus applies to dot only");
        out << exportQuads(*store);
      } else {
        out << exportDot(*store,
                         focus.empty() ? std::nullopt
                                       : std::optional{resolveId(*store, focus)},
                         radius);
      }
    } else if (describe->parsed()) {
      out << serializeDescription(*store,
                                  describeEntity(*store, resolveId(*store, describeId)));
    } else if (stats->parsed()) {
      out << "persons\t" << store->entitiesOfKind(EntityKind::Person).size() << "\n"
          << "bodies\t" << store->entitiesOfKind(EntityKind::CorporateBody).size() << "\n"
          << "works\t" << store->entitiesOfKind(EntityKind::Work).size() << "\n"
          << "places\t" << store->entitiesOfKind(EntityKind::Place).size() << "\n"
          << "genders\t" << store->entitiesOfKind(EntityKind::Gender).size() << "\n"
          << "triples\t" << store->size() << "\n";
    } else if (serve->parsed()) {
      DescriptionServer server(store);
      const int bound = server.bind(host, port);
      err << "serving " << storePath << " on http://" << host << ":" << bound << "\n";
      server.run();
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exitCodeFor(e.code());
  }
}

}  // namespace etd
