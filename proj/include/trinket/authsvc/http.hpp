#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "trinket/authsvc/service.hpp"

namespace trinket::auth {

struct HttpResponse {
  int status = 200;
  std::string body;  // JSON
};

/// The JSON API without the network:
///   POST /users/{id}/enroll        {"images": [3 x base64 PNG]}, 422 when the
///                                  filters reject the set
///   POST /users/{id}/authenticate  {"image": base64 PNG}
///   POST /users/{id}/reset
///   GET  /healthz
/// Errors map to 400 (BadRequest, BadImage), 404 (NotEnrolled, unknown
/// route), 405, 409 (AlreadyEnrolled), 423 (FallbackRequired) and 500, with
/// body {"error": code, "message": text}.
HttpResponse handle_request(AuthService& service, std::string_view method, std::string_view path,
                            std::string_view body);

/// Serves handle_request over HTTP.
class HttpServer {
 public:
  explicit HttpServer(AuthService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds (port 0 picks a free port) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace trinket::auth
