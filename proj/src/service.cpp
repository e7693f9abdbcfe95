#include "gqbe/service.hpp"

#include <httplib.h>

#include <json.hpp>

#include "gqbe/engine.hpp"

namespace gqbe {
namespace {

HttpReply error_reply(int status, const std::string& message) {
  return {status, nlohmann::json{{"error", message}}.dump()};
}

}  // namespace

struct Service::Impl {
  httplib::Server server;
};

Service::Service(const DataGraph& g) : g_(g), impl_(std::make_unique<Impl>()) {
  auto send = [](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  };
  impl_->server.Post("/api/query", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_query(req.body));
  });
  impl_->server.Get("/api/autocomplete", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_autocomplete(req.get_param_value("q"),
                                  req.has_param("limit") ? req.get_param_value("limit") : "10"));
  });
  impl_->server.Get("/api/health",
                    [this, send](const httplib::Request&, httplib::Response& res) { send(res, handle_health()); });
}

Service::~Service() = default;

HttpReply Service::handle_query(const std::string& body) const {
  QueryRequest req;
  try {
    req = nlohmann::json::parse(body).get<QueryRequest>();
  } catch (const nlohmann::json::exception& e) {
    return error_reply(400, std::string("malformed request: ") + e.what());
  }
  try {
    return {200, nlohmann::json(run_query(g_, req)).dump()};
  } catch (const NotFoundError& e) {
    auto reply = nlohmann::json{{"error", e.what()}, {"names", e.names()}};
    return {404, reply.dump()};
  } catch (const DisconnectedTupleError& e) {
    return error_reply(422, e.what());
  } catch (const InvalidArgument& e) {
    return error_reply(400, e.what());
  } catch (const ResourceLimitError& e) {
    return error_reply(422, e.what());
  } catch (const Error& e) {
    return error_reply(500, e.what());
  }
}

HttpReply Service::handle_autocomplete(const std::string& prefix, const std::string& limit) const {
  std::size_t n = 0;
  try {
    std::size_t used = 0;
    const long long parsed = std::stoll(limit, &used);
    if (used != limit.size() || parsed < 1) throw std::invalid_argument("limit");
    n = static_cast<std::size_t>(parsed);
  } catch (const std::exception&) {
    return error_reply(400, "limit must be a positive integer");
  }
  auto items = nlohmann::json::array();
  for (const auto& [id, name] : g_.autocomplete(prefix, n)) items.push_back({{"id", id.value}, {"name", name}});
  return {200, items.dump()};
}

HttpReply Service::handle_health() const {
  return {200, nlohmann::json{{"status", "ok"}, {"entities", g_.entity_count()}, {"edges", g_.edge_count()}}.dump()};
}

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int Service::bind_any(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace gqbe
