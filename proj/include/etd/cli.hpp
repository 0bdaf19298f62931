#pragma once
// Command-line front end and the read-only HTTP description endpoint.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "etd/model.hpp"
#include "etd/store.hpp"

namespace etd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitIo = 3;

// `args` excludes the program name. Data goes to `out`, diagnostics to `err`.
int runCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Base Iri for new stores: ETD_BASE_IRI when set, else the built-in default.
Iri defaultBaseIri();

Store loadStore(const std::string& path, const Iri& fallbackBase = defaultBaseIri());
void saveStore(const Store& store, const std::string& path);

struct HttpResponse {
  int status = 200;
  std::string contentType = "text/plain; charset=utf-8";
  std::string body;
};

// Routing without sockets: GET /entity/{kind}/{localId} and GET /health.
HttpResponse handleRequest(const Store& store, std::string_view method,
                           std::string_view path);

class DescriptionServer {
 public:
  explicit DescriptionServer(std::shared_ptr<const Store> store);
  ~DescriptionServer();
  DescriptionServer(const DescriptionServer&) = delete;
  DescriptionServer& operator=(const DescriptionServer&) = delete;

  // Port 0 picks a free port; returns the bound port. Throws PortInUse.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called from another thread.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace etd
