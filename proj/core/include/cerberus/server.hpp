#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include "cerberus/moderator.hpp"

namespace cerberus {

inline constexpr const char* kAuthHeader = "X-Cerberus-Auth";

/// HTTP/1.1 front end for a ModeratorNode.
class ModeratorServer {
 public:
  /// A non-empty `auth_token` must be presented in the X-Cerberus-Auth
  /// header of every request.
  explicit ModeratorServer(std::shared_ptr<ModeratorNode> node, std::string auth_token = {});
  ~ModeratorServer();
  ModeratorServer(const ModeratorServer&) = delete;
  ModeratorServer& operator=(const ModeratorServer&) = delete;

  /// Binds host:port; port 0 picks a free port. Returns the bound port.
  /// Throws Error when the address cannot be bound.
  int bind(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void run();
  /// Serves on a background thread.
  void start();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = -1;
  std::thread thread_;
};

/// Splits "host:port". Throws InvalidArgument on malformed input.
std::pair<std::string, int> split_host_port(const std::string& address);

}  // namespace cerberus
