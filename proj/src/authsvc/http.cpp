#include "trinket/authsvc/http.hpp"

#include "httplib.h"
#include "json.hpp"
#include "trinket/authsvc/base64.hpp"
#include "trinket/common/error.hpp"

namespace trinket::auth {

using nlohmann::json;

namespace {

HttpResponse error_response(int status, std::string_view code, const std::string& message) {
  return {status, json{{"error", code}, {"message", message}}.dump()};
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadRequest:
    case ErrorCode::BadImage:
    case ErrorCode::FormatError:
      return 400;
    case ErrorCode::NotEnrolled:
      return 404;
    case ErrorCode::AlreadyEnrolled:
      return 409;
    case ErrorCode::FallbackRequired:
      return 423;
    default:
      return 500;
  }
}

json feedback_json(const std::vector<filt::Reason>& reasons) {
  json out = json::array();
  for (const auto& r : reasons) {
    out.push_back({{"code", filt::code_name(r.code)}, {"rule", filt::rule_name(r.rule)}, {"message", r.message}});
  }
  return out;
}

json parse_body(std::string_view body) {
  if (body.empty()) return json::object();
  auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::BadRequest, "body is not a JSON object");
  return j;
}

std::vector<std::uint8_t> image_field(const json& j) {
  if (!j.is_string()) throw Error(ErrorCode::BadRequest, "image must be a base64 string");
  try {
    return base64_decode(j.get<std::string>());
  } catch (const Error& e) {
    throw Error(ErrorCode::BadImage, e.what());
  }
}

HttpResponse dispatch(AuthService& service, std::string_view method, const std::string& user, std::string_view action,
                      std::string_view body) {
  if (method != "POST") return error_response(405, "MethodNotAllowed", "use POST");
  const auto req = parse_body(body);
  if (action == "enroll") {
    if (!req.contains("images") || !req["images"].is_array())
      throw Error(ErrorCode::BadRequest, "images must be an array of 3 base64 strings");
    std::vector<std::vector<std::uint8_t>> images;
    for (const auto& im : req["images"]) images.push_back(image_field(im));
    const auto r = service.enroll(user, images);
    if (r.accepted) return {200, json{{"user", user}, {"status", "enrolled"}}.dump()};
    return {422, json{{"user", user}, {"status", "rejected"}, {"feedback", feedback_json(r.feedback)}}.dump()};
  }
  if (action == "authenticate") {
    if (!req.contains("image")) throw Error(ErrorCode::BadRequest, "image is required");
    const auto d = service.authenticate(user, image_field(req["image"]));
    return {200, json{{"user", user},
                      {"accepted", d.accepted},
                      {"score", d.score},
                      {"feedback", feedback_json(d.feedback)},
                      {"fallback_required", d.fallback_required}}
                     .dump()};
  }
  service.reset(user);
  return {200, json{{"user", user}, {"reset", true}}.dump()};
}

}  // namespace

HttpResponse handle_request(AuthService& service, std::string_view method, std::string_view path,
                            std::string_view body) {
  if (path == "/healthz") {
    if (method != "GET") return error_response(405, "MethodNotAllowed", "use GET");
    return {200, json{{"status", "ok"}, {"features", service.model().width()}}.dump()};
  }
  constexpr std::string_view prefix = "/users/";
  if (path.substr(0, prefix.size()) == prefix) {
    const auto rest = path.substr(prefix.size());
    const auto slash = rest.find('/');
    if (slash != std::string_view::npos) {
      const auto action = rest.substr(slash + 1);
      if (action == "enroll" || action == "authenticate" || action == "reset") {
        try {
          return dispatch(service, method, std::string(rest.substr(0, slash)), action, body);
        } catch (const Error& e) {
          const auto name = std::string(to_string(e.code()));
          std::string message = e.what();
          if (message.rfind(name + ": ", 0) == 0) message.erase(0, name.size() + 2);
          return error_response(status_for(e.code()), name, message);
        } catch (const std::exception& e) {
          return error_response(500, "InternalError", e.what());
        }
      }
    }
  }
  return error_response(404, "NotFound", "no route for " + std::string(path));
}

struct HttpServer::Impl {
  explicit Impl(AuthService& s) : service(s) {}
  AuthService& service;
  httplib::Server server;
};

HttpServer::HttpServer(AuthService& service) : impl_(std::make_unique<Impl>(service)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const auto r = handle_request(impl_->service, req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  impl_->server.Get(R"(/.*)", handler);
  impl_->server.Post(R"(/.*)", handler);
  impl_->server.Put(R"(/.*)", handler);
  impl_->server.Delete(R"(/.*)", handler);
  impl_->server.set_payload_max_length(64u << 20);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace trinket::auth
