#include <httplib.h>

#include "etd/cli.hpp"
#include "etd/error.hpp"
#include "etd/ingest.hpp"
#include "etd/io.hpp"

namespace etd {

namespace {

HttpResponse status(int code, std::string body) {
  return {code, "text/plain; charset=utf-8", std::move(body)};
}

}  // namespace

HttpResponse handleRequest(const Store& store, std::string_view method,
                           std::string_view path) {
  if (method != "GET" && method != "HEAD") {
    return status(405, "method not allowed\n");
  }
  if (path == "/health") return status(200, "ok");

  constexpr std::string_view prefix = "/entity/";
  if (!path.starts_with(prefix)) return status(404, "not found\n");
  const auto rest = path.substr(prefix.size());
  const auto slash = rest.find('/');
  if (slash == std::string_view::npos || slash + 1 == rest.size()) {
    return status(404, "not found\n");
  }
  const auto segment = rest.substr(0, slash);
  const auto localId = rest.substr(slash + 1);
  for (auto kind : {EntityKind::Person, EntityKind::CorporateBody, EntityKind::Work,
                    EntityKind::Place, EntityKind::Gender}) {
    if (kindSegment(kind) != segment) continue;
    try {
      const auto iri = resolveEntity(store, kind, localId, store.base());
      return status(200, serializeDescription(store, describeEntity(store, iri)));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NotFound || e.code() == ErrorCode::InvalidLocalId) {
        return status(404, "not found\n");
      }
      throw;
    }
  }
  return status(404, "not found\n");
}

struct DescriptionServer::Impl {
  std::shared_ptr<const Store> store;
  httplib::Server server;
};

DescriptionServer::DescriptionServer(std::shared_ptr<const Store> store)
    : impl_(std::make_unique<Impl>()) {
  impl_->store = std::move(store);
  const auto respond = [this](const httplib::Request& req, httplib::Response& res) {
    // req.path arrives percent-decoded.
    const auto r = handleRequest(*impl_->store, req.method, req.path);
    res.status = r.status;
    res.set_content(r.body, r.contentType);
  };
  impl_->server.Get(".*", respond);
  impl_->server.Post(".*", respond);
  impl_->server.Put(".*", respond);
  impl_->server.Patch(".*", respond);
  impl_->server.Delete(".*", respond);
  impl_->server.Options(".*", respond);
}

DescriptionServer::~DescriptionServer() { stop(); }

int DescriptionServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::PortInUse, "no free port on " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::PortInUse,
                "cannot listen on " + host + ":" + std::to_string(port));
  }
  return port;
}

void DescriptionServer::run() { impl_->server.listen_after_bind(); }

void DescriptionServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace etd
