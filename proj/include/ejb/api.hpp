#pragma once

#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>

#include "ejb/engine.hpp"

namespace ejb {

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Request routing over an immutable dataset. Bodies for a given request tuple
/// are computed once and cached; concurrent duplicate computation is harmless.
class Service {
 public:
  explicit Service(Dataset data, unsigned threads = 1);

  /// Handles GET requests under /api. Unknown paths answer 404.
  ApiResponse handle(const std::string& path, const std::map<std::string, std::string>& params);

  const Dataset& data() const { return data_; }
  std::size_t cache_size() const;

 private:
  ApiResponse cached(const std::string& key, const std::function<std::string()>& compute);

  Dataset data_;
  unsigned threads_;
  mutable std::shared_mutex cache_mutex_;
  std::map<std::string, std::string> cache_;
};

/// JSON error body {"code": ..., "message": ...}.
ApiResponse error_response(int status, const std::string& code, const std::string& message);

/// HTTP/1.1 front end for a Service; also serves the config's static_dir at /.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds without accepting yet. Returns false when the address is unavailable.
  bool bind(const std::string& host, int port);
  int port() const;
  /// Blocks serving requests until stop() is called.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ejb
