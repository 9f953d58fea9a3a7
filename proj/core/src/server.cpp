#include "cerberus/server.hpp"

#include <httplib.h>

namespace cerberus {

struct ModeratorServer::Impl {
  std::shared_ptr<ModeratorNode> node;
  std::string auth_token;
  httplib::Server server;
};

ModeratorServer::ModeratorServer(std::shared_ptr<ModeratorNode> node, std::string auth_token)
    : impl_(std::make_unique<Impl>()) {
  impl_->node = std::move(node);
  impl_->auth_token = std::move(auth_token);

  auto handler = [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) {
    if (!impl->auth_token.empty() && req.get_header_value(kAuthHeader) != impl->auth_token) {
      res.status = 401;
      res.set_content(wire::encode_error("unauthorized"), "application/json");
      return;
    }
    auto reply = impl->node->dispatch(req.path, req.body);
    res.status = reply.status;
    res.set_content(std::move(reply.body), "application/json");
  };
  for (auto path : {wire::kRound1Path, wire::kRound2Path, wire::kReportPath}) {
    impl_->server.Post(std::string(path), handler);
  }
  impl_->server.set_keep_alive_max_count(100000);
  // Bounds how long stop() waits on idle keep-alive connections.
  impl_->server.set_keep_alive_timeout(1);
  impl_->server.set_tcp_nodelay(true);
}

ModeratorServer::~ModeratorServer() { stop(); }

int ModeratorServer::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
  } else {
    port_ = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) throw InvalidArgument("cannot bind " + host + ":" + std::to_string(port));
  return port_;
}

void ModeratorServer::run() {
  if (port_ < 0) throw Error("server is not bound");
  impl_->server.listen_after_bind();
}

void ModeratorServer::start() {
  if (port_ < 0) throw Error("server is not bound");
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void ModeratorServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

std::pair<std::string, int> split_host_port(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0) throw InvalidArgument("expected host:port, got '" + address + "'");
  try {
    std::size_t pos = 0;
    const std::string port_text = address.substr(colon + 1);
    const int port = std::stoi(port_text, &pos);
    if (pos != port_text.size() || port < 0 || port > 65535) throw InvalidArgument("bad port");
    return {address.substr(0, colon), port};
  } catch (const std::logic_error&) {
    throw InvalidArgument("expected host:port, got '" + address + "'");
  }
}

}  // namespace cerberus
