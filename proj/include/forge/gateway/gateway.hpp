#pragma once

// Transport-neutral REST surface. Every failure uses the envelope
// {"error":{"code":<ErrorCode name>,"message":...}} with the status from
// http_status().
//
//   GET  /healthz                  {"ok":true}
//   GET  /calendar                 phase and deadlines
//   PUT  /calendar                 admin; {"deadlines":[ms,ms,ms,ms]}
//   POST /participants             sign-up form; returns the auth code
//   GET  /me                       auth; own id and paper titles
//   POST /sessions                 auth; {"paper_id","start_time":ms}
//   GET  /slots[?phase=BookingP|Dialogues]
//   POST /slots/{id}/book          auth
//   GET  /notifications/due        auth; drains the caller's outbox
//   GET  /corpus/export            admin; canonical corpus bytes
//
// Auth is the "X-Auth-Code" header. Abstract and introduction text is never
// serialized to a participant; only the admin export carries it.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "forge/error.hpp"
#include "forge/gateway/platform.hpp"

namespace forge::gateway {

struct HttpRequest {
  std::string method;
  std::string target;  // path plus optional query
  std::map<std::string, std::string> headers;  // lowercase names
  std::string body;

  std::string header(std::string_view name) const;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

inline constexpr std::size_t kMaxBodyBytes = 64 * 1024;

HttpResponse error_response(const Error& error);

class Gateway {
 public:
  explicit Gateway(Platform& platform, std::optional<std::filesystem::path> static_dir = {});

  HttpResponse route(const HttpRequest& request);

 private:
  HttpResponse dispatch(const HttpRequest& request);
  HttpResponse serve_static(const std::string& path) const;

  Platform& platform_;
  std::optional<std::filesystem::path> static_dir_;
};

/// Splits "a/b?x=1&y=2" into the path and decoded query parameters.
std::pair<std::string, std::map<std::string, std::string>> split_target(std::string_view target);

}  // namespace forge::gateway
