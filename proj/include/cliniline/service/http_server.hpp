#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>

#include "cliniline/core/error.hpp"
#include "cliniline/service/api.hpp"
#include "cliniline/service/events.hpp"
#include "cliniline/service/wire.hpp"

namespace cliniline {

/// One server-sent event frame.
inline std::string sse_frame(const ChangeEvent& ev) {
  const Json data = {{"type", ev.type}, {"entityId", ev.entity_id}, {"revision", ev.revision}};
  return "id: " + std::to_string(ev.revision) + "\nevent: " + ev.type + "\ndata: " + data.dump() + "\n\n";
}

struct HttpOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> ui_dir;
  std::chrono::milliseconds keep_alive{15000};
};

/// HTTP binding of Api plus the /api/events stream.
class HttpServer {
 public:
  HttpServer(Api& api, HttpOptions opts) : api_(api), opts_(std::move(opts)) { install(); }

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  ~HttpServer() { stop(); }

  /// Binds the listening socket and returns the bound port.
  int bind() {
    if (opts_.port == 0) {
      port_ = server_.bind_to_any_port(opts_.host);
    } else {
      port_ = server_.bind_to_port(opts_.host, opts_.port) ? opts_.port : -1;
    }
    if (port_ < 0) throw Error(ErrorCode::kIo, "cannot bind " + opts_.host + ":" + std::to_string(opts_.port));
    return port_;
  }

  int port() const { return port_; }

  /// Serves until stop(). Binds first when needed.
  void run() {
    if (port_ < 0) bind();
    server_.listen_after_bind();
  }

  /// Serves on a background thread; returns once the server accepts.
  int start() {
    const int p = port_ < 0 ? bind() : port_;
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return p;
  }

  void stop() {
    api_.store().events().shutdown();
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  static ApiRequest to_api(const httplib::Request& req) {
    ApiRequest out;
    out.method = req.method;
    out.path = req.path;
    for (const auto& [k, v] : req.params) out.query.emplace(k, v);
    for (const auto& [k, v] : req.headers) out.headers.emplace(k, v);
    out.body = req.body;
    return out;
  }

  void forward(const httplib::Request& req, httplib::Response& res) {
    const ApiResponse out = api_.handle(to_api(req));
    res.status = out.status;
    for (const auto& [k, v] : out.headers) res.set_header(k, v);
    res.set_content(out.body, "application/json");
  }

  void install() {
    if (opts_.ui_dir) server_.set_mount_point("/", opts_.ui_dir->string());

    server_.Get("/api/events", [this](const httplib::Request&, httplib::Response& res) {
      auto sub = api_.store().events().subscribe();
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream",
          [this, sub, first = true](size_t, httplib::DataSink& sink) mutable {
            if (first) {
              first = false;
              const std::string hello = ": joined at revision " + std::to_string(sub->joined_at()) + "\n\n";
              return sink.write(hello.data(), hello.size());
            }
            if (sub->closed() || !sink.is_writable()) {
              sink.done();
              return true;
            }
            const auto ev = sub->next(opts_.keep_alive);
            const std::string frame = ev ? sse_frame(*ev) : std::string(": keep-alive\n\n");
            if (!ev && sub->closed()) {
              sink.done();
              return true;
            }
            return sink.write(frame.data(), frame.size());
          },
          [this, sub](bool) { api_.store().events().unsubscribe(sub); });
    });

    const auto handler = [this](const httplib::Request& req, httplib::Response& res) { forward(req, res); };
    server_.Get("/api/.*", handler);
    server_.Post("/api/.*", handler);
  }

  Api& api_;
  HttpOptions opts_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace cliniline
