#pragma once

// JSON-over-HTTP front end:
//   POST /api/query          QueryRequest -> QueryResponse
//   GET  /api/autocomplete   ?q=<prefix>&limit=<n>
//   GET  /api/health
// Errors come back as {"error": message} with 400 (bad request), 404
// (unknown entities, also listed under "names") or 422 (disconnected tuple).

#include <memory>
#include <string>

#include "gqbe/graph_store.hpp"

namespace gqbe {

struct HttpReply {
  int status = 200;
  std::string body;
};

class Service {
 public:
  explicit Service(const DataGraph& g);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  HttpReply handle_query(const std::string& body) const;
  HttpReply handle_autocomplete(const std::string& prefix, const std::string& limit) const;
  HttpReply handle_health() const;

  // Binds and serves until stop(); returns false if the socket cannot bind.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it, or -1.
  int bind_any(const std::string& host);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  const DataGraph& g_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gqbe
