#include "cerberus/transport.hpp"

#include <httplib.h>

#include "cerberus/moderator.hpp"
#include "cerberus/server.hpp"

namespace cerberus {

// Idle keep-alive clients for one address. httplib::Client serializes
// requests, so each in-flight request checks one out.
struct HttpTransport::Pool {
  std::string host;
  int port;
  std::mutex mu;
  std::vector<std::unique_ptr<httplib::Client>> idle;
};

HttpTransport::HttpTransport(std::string auth_token) : auth_token_(std::move(auth_token)) {}

HttpTransport::~HttpTransport() = default;

TransportResponse HttpTransport::post(const std::string& address, std::string_view path, const std::string& body,
                                      std::chrono::milliseconds timeout) {
  Pool* pool = nullptr;
  {
    std::lock_guard lock(mu_);
    auto& slot = pools_[address];
    if (!slot) {
      auto [host, port] = split_host_port(address);
      slot = std::make_unique<Pool>();
      slot->host = std::move(host);
      slot->port = port;
    }
    pool = slot.get();
  }

  std::unique_ptr<httplib::Client> client;
  {
    std::lock_guard lock(pool->mu);
    if (!pool->idle.empty()) {
      client = std::move(pool->idle.back());
      pool->idle.pop_back();
    }
  }
  if (!client) {
    client = std::make_unique<httplib::Client>(pool->host, pool->port);
    client->set_keep_alive(true);
    client->set_tcp_nodelay(true);
  }
  client->set_connection_timeout(timeout);
  client->set_read_timeout(timeout);
  client->set_write_timeout(timeout);

  httplib::Headers headers;
  if (!auth_token_.empty()) headers.emplace(kAuthHeader, auth_token_);
  auto result = client->Post(std::string(path), headers, body, "application/json");
  if (!result) throw TransportError(address + ": " + httplib::to_string(result.error()));
  TransportResponse response{result->status, std::move(result->body)};

  std::lock_guard lock(pool->mu);
  pool->idle.push_back(std::move(client));
  return response;
}

void InMemoryTransport::attach(const std::string& address, std::shared_ptr<ModeratorNode> node) {
  std::lock_guard lock(mu_);
  nodes_[address] = std::move(node);
}

void InMemoryTransport::set_down(const std::string& address, bool down) {
  std::lock_guard lock(mu_);
  if (down) down_.insert(address);
  else down_.erase(address);
}

TransportResponse InMemoryTransport::post(const std::string& address, std::string_view path, const std::string& body,
                                          std::chrono::milliseconds /*timeout*/) {
  std::shared_ptr<ModeratorNode> node;
  {
    std::lock_guard lock(mu_);
    if (down_.count(address)) throw TransportError(address + ": connection refused");
    auto it = nodes_.find(address);
    if (it == nodes_.end()) throw TransportError(address + ": no such moderator");
    node = it->second;
  }
  auto reply = node->dispatch(path, body);
  return {reply.status, std::move(reply.body)};
}

}  // namespace cerberus
