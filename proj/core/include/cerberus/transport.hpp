#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cerberus/bytes.hpp"

namespace cerberus {

class ModeratorNode;

/// The moderator could not be reached or did not answer in time.
class TransportError : public Error {
 public:
  using Error::Error;
};

struct TransportResponse {
  int status;
  std::string body;
};

/// Request/response channel from a client to moderators, addressed by the
/// roster's host:port strings. Implementations must be thread-safe.
class Transport {
 public:
  virtual ~Transport() = default;
  /// Throws TransportError on connection failure or timeout. Non-2xx
  /// responses are returned, not thrown.
  virtual TransportResponse post(const std::string& address, std::string_view path, const std::string& body,
                                 std::chrono::milliseconds timeout) = 0;
};

/// HTTP/1.1 with keep-alive connections pooled per address.
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::string auth_token = {});
  ~HttpTransport() override;

  TransportResponse post(const std::string& address, std::string_view path, const std::string& body,
                         std::chrono::milliseconds timeout) override;

 private:
  struct Pool;
  std::string auth_token_;
  std::mutex mu_;
  std::map<std::string, std::unique_ptr<Pool>> pools_;
};

/// Calls ModeratorNode::dispatch directly, so the JSON codecs are exercised
/// without sockets. Addresses can be marked down to simulate outages.
class InMemoryTransport final : public Transport {
 public:
  void attach(const std::string& address, std::shared_ptr<ModeratorNode> node);
  void set_down(const std::string& address, bool down);

  TransportResponse post(const std::string& address, std::string_view path, const std::string& body,
                         std::chrono::milliseconds timeout) override;

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<ModeratorNode>> nodes_;
  std::set<std::string> down_;
};

}  // namespace cerberus
