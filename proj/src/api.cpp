#include "ejb/api.hpp"

#include <filesystem>
#include <functional>
#include <mutex>

#include <httplib.h>

namespace ejb {

using nlohmann::json;

ApiResponse error_response(int status, const std::string& code, const std::string& message) {
  return {status, "application/json",
          json{{"code", code}, {"message", message}}.dump(2) + "\n"};
}

Service::Service(Dataset data, unsigned threads) : data_(std::move(data)), threads_(threads) {}

std::size_t Service::cache_size() const {
  std::shared_lock lock(cache_mutex_);
  return cache_.size();
}

ApiResponse Service::cached(const std::string& key, const std::function<std::string()>& compute) {
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return {200, "application/json", it->second};
  }
  std::string body = compute();
  std::unique_lock lock(cache_mutex_);
  auto [it, inserted] = cache_.emplace(key, std::move(body));
  return {200, "application/json", it->second};
}

ApiResponse Service::handle(const std::string& path,
                            const std::map<std::string, std::string>& params) {
  try {
    if (path == "/api/layers") {
      return {200, "application/json", render_catalog(data_)};
    }
    if (path == "/api/burden") {
      const RunRequest req = make_request(data_, params);
      return cached("burden?" + req.key(), [&] {
        return render_surface_geojson(data_, run_burden(data_, req, threads_));
      });
    }
    if (path == "/api/schools") {
      const RunRequest req = make_request(data_, params);
      return cached("schools?" + req.key(), [&] {
        return render_schools_json(run_burden(data_, req, threads_));
      });
    }
    if (path == "/api/report/maup") {
      RunRequest req = make_request(data_, params);
      req.scale = ZoneScale::community_area;
      return cached("maup?" + req.key(), [&] {
        return render_maup(data_, req, run_maup(data_, req, threads_));
      });
    }
    if (path == "/api/report/demographics") {
      const RunRequest req = make_request(data_, params);
      return cached("demographics?" + req.key(), [&] {
        return render_demographics(data_, req, run_demographics(data_, req, threads_));
      });
    }
  } catch (const RequestError& e) {
    return error_response(e.status(), e.code(), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal_error", e.what());
  }
  return error_response(404, "not_found", "no such endpoint: " + path);
}

struct HttpServer::Impl {
  explicit Impl(Service& s) : service(s) {}
  Service& service;
  httplib::Server server;
  int bound_port = -1;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  // SO_REUSEADDR only: with SO_REUSEPORT a second server could share a busy port.
  srv.set_socket_options([](int sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  srv.Get(R"(/api(/.*)?)", [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> params;
    for (const auto& [k, v] : req.params) params.emplace(k, v);
    const ApiResponse r = impl_->service.handle(req.path, params);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  });

  const std::string& static_dir = service.data().config.static_dir;
  if (!static_dir.empty()) {
    const auto dir = service.data().config.resolve(static_dir);
    if (std::filesystem::is_directory(dir)) srv.set_mount_point("/", dir.string());
  }

  srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const ApiResponse r =
        error_response(res.status, res.status == 404 ? "not_found" : "http_error",
                       "request for " + req.path + " failed with status " +
                           std::to_string(res.status));
    res.set_content(r.body, r.content_type);
  });
}

HttpServer::~HttpServer() = default;

bool HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->bound_port = impl_->server.bind_to_any_port(host);
    return impl_->bound_port > 0;
  }
  if (!impl_->server.bind_to_port(host, port)) return false;
  impl_->bound_port = port;
  return true;
}

int HttpServer::port() const { return impl_->bound_port; }

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace ejb
