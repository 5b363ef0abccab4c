#include "forge/gateway/gateway.hpp"

#include <algorithm>
#include <functional>
#include <vector>

#include <json.hpp>

#include "forge/segment.hpp"
#include "forge/store.hpp"

namespace forge::gateway {

using nlohmann::json;

namespace {

HttpResponse json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

[[noreturn]] void bad_request(const std::string& why) { throw Error(ErrorCode::BadRequest, why); }

json parse_body(const HttpRequest& req) {
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) bad_request("body must be a JSON object");
  return j;
}

std::string string_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) bad_request(std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::int64_t int_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) bad_request(std::string("\"") + key + "\" must be an integer");
  return it->get<std::int64_t>();
}

std::vector<std::string> sentences_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (it->is_string()) return segment_sentences(it->get<std::string>());
  if (it->is_array()) {
    std::vector<std::string> out;
    for (const auto& s : *it) {
      if (!s.is_string()) bad_request(std::string("\"") + key + "\" entries must be strings");
      out.push_back(s.get<std::string>());
    }
    return out;
  }
  bad_request(std::string("\"") + key + "\" must be text or a list of sentences");
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string url_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && hex_value(s[i + 1]) >= 0 && hex_value(s[i + 2]) >= 0) {
      out += static_cast<char>(hex_value(s[i + 1]) * 16 + hex_value(s[i + 2]));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::vector<std::string> segments(const std::string& path) {
  std::vector<std::string> out;
  std::size_t start = 1;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string::npos) end = path.size();
    if (end > start) out.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::string_view kind_name(NotificationKind k) {
  return k == NotificationKind::PhaseAdvance ? "PhaseAdvance" : "SlotReminder";
}

json notification_json(const Notification& n) {
  json j = {{"notification_id", n.notification_id},
            {"kind", kind_name(n.kind)},
            {"fire_at", to_epoch_ms(n.fire_at)},
            {"slot_id", n.slot_id ? json(*n.slot_id) : json(nullptr)}};
  if (n.phase) j["phase"] = phase_name(*n.phase);
  return j;
}

json calendar_json(const StudyCalendar& c) {
  json deadlines = json::array();
  for (auto d : c.deadlines) deadlines.push_back(to_epoch_ms(d));
  return {{"phase", phase_name(c.phase)}, {"deadlines", deadlines}};
}

std::string_view content_type_for(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  return "application/octet-stream";
}

struct Route {
  std::string method;
  std::vector<std::string> pattern;  // "{}" matches one segment
  std::function<HttpResponse(const HttpRequest&, const std::vector<std::string>& params,
                             const std::map<std::string, std::string>& query)>
      handler;
};

bool matches(const std::vector<std::string>& pattern, const std::vector<std::string>& segs,
             std::vector<std::string>& params) {
  if (pattern.size() != segs.size()) return false;
  params.clear();
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == "{}") params.push_back(segs[i]);
    else if (pattern[i] != segs[i]) return false;
  }
  return true;
}

}  // namespace

std::string HttpRequest::header(std::string_view name) const {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  auto it = headers.find(key);
  return it == headers.end() ? std::string{} : it->second;
}

HttpResponse error_response(const Error& error) {
  json e = {{"code", to_string(error.code())}, {"message", error.what()}};
  if (!error.path().empty()) e["path"] = error.path();
  return json_response(http_status(error.code()), {{"error", e}});
}

std::pair<std::string, std::map<std::string, std::string>> split_target(std::string_view target) {
  std::map<std::string, std::string> query;
  const auto q = target.find('?');
  std::string path = url_decode(target.substr(0, q));
  if (q != std::string_view::npos) {
    std::string_view rest = target.substr(q + 1);
    while (!rest.empty()) {
      auto amp = rest.find('&');
      auto pair = rest.substr(0, amp);
      auto eq = pair.find('=');
      if (!pair.empty())
        query[url_decode(pair.substr(0, eq))] = eq == std::string_view::npos ? "" : url_decode(pair.substr(eq + 1));
      if (amp == std::string_view::npos) break;
      rest.remove_prefix(amp + 1);
    }
  }
  return {path, query};
}

Gateway::Gateway(Platform& platform, std::optional<std::filesystem::path> static_dir)
    : platform_(platform), static_dir_(std::move(static_dir)) {}

HttpResponse Gateway::route(const HttpRequest& request) {
  try {
    if (request.body.size() > kMaxBodyBytes)
      throw Error(ErrorCode::PayloadTooLarge, "request body exceeds 64 KiB");
    return dispatch(request);
  } catch (const Error& e) {
    return error_response(e);
  }
}

HttpResponse Gateway::dispatch(const HttpRequest& req) {
  Platform& p = platform_;
  auto participant = [&](const HttpRequest& r) { return p.authenticate(r.header("x-auth-code")); };
  auto require_admin = [&](const HttpRequest& r) {
    if (!p.is_admin(r.header("x-auth-code"))) {
      // a valid participant code is known but not allowed here
      try {
        participant(r);
      } catch (const Error&) {
        throw Error(ErrorCode::Unauthorized, "admin code required");
      }
      throw Error(ErrorCode::Forbidden, "admin only");
    }
  };

  static const std::vector<std::string> kNoSegments;
  const std::vector<Route> routes = {
      {"GET", {"healthz"}, [](auto&, auto&, auto&) { return json_response(200, {{"ok", true}}); }},

      {"GET", {"calendar"},
       [&](auto&, auto&, auto&) {
         return json_response(200, p.read([](const SchedulerState& s) { return calendar_json(s.calendar); }));
       }},

      {"PUT", {"calendar"},
       [&](const HttpRequest& r, auto&, auto&) {
         require_admin(r);
         json body = parse_body(r);
         auto it = body.find("deadlines");
         if (it == body.end() || !it->is_array() || it->size() != 4) bad_request("\"deadlines\" needs 4 timestamps");
         std::array<Timestamp, 4> deadlines{};
         for (std::size_t i = 0; i < 4; ++i) {
           if (!(*it)[i].is_number_integer()) bad_request("deadlines must be epoch milliseconds");
           deadlines[i] = from_epoch_ms((*it)[i].template get<std::int64_t>());
         }
         p.set_deadlines(deadlines);
         return json_response(200, p.read([](const SchedulerState& s) { return calendar_json(s.calendar); }));
       }},

      {"POST", {"participants"},
       [&](const HttpRequest& r, auto&, auto&) {
         json body = parse_body(r);
         std::vector<PaperSubmission> subs;
         auto papers = body.find("papers");
         if (papers == body.end() || !papers->is_array()) bad_request("\"papers\" must be a list");
         for (const auto& item : *papers) {
           if (!item.is_object()) bad_request("each paper must be an object");
           PaperSubmission s;
           s.title = string_field(item, "title");
           s.abstract = sentences_field(item, "abstract");
           s.introduction = sentences_field(item, "introduction");
           auto sel = item.find("selected");
           s.selected = sel != item.end() && sel->is_boolean() && sel->template get<bool>();
           subs.push_back(std::move(s));
         }
         auto created = p.register_participant(string_field(body, "full_name"), string_field(body, "email"), subs);
         json titles = json::array();
         p.read([&](const SchedulerState& s) {
           for (const auto& id : created.proposed_paper_ids)
             titles.push_back({{"paper_id", id}, {"title", s.papers.at(id).title}});
           return 0;
         });
         return json_response(201, {{"participant_id", created.participant_id},
                                    {"auth_code", created.auth_code},
                                    {"papers", titles}});
       }},

      {"GET", {"me"},
       [&](const HttpRequest& r, auto&, auto&) {
         const auto id = participant(r);
         return json_response(200, p.read([&](const SchedulerState& s) {
           const auto& me = s.participants.at(id);
           json papers = json::array();
           for (const auto& pid : me.proposed_paper_ids)
             papers.push_back({{"paper_id", pid}, {"title", s.papers.at(pid).title}});
           return json{{"participant_id", id}, {"papers", papers}, {"phase", phase_name(s.calendar.phase)}};
         }));
       }},

      {"POST", {"sessions"},
       [&](const HttpRequest& r, auto&, auto&) {
         const auto id = participant(r);
         json body = parse_body(r);
         auto session = p.create_de_session(id, string_field(body, "paper_id"),
                                            from_epoch_ms(int_field(body, "start_time")));
         json slots = json::array();
         p.read([&](const SchedulerState& s) {
           for (const auto& [sid, slot] : s.slots)
             if (slot.session_id == session.session_id) slots.push_back(sid);
           return 0;
         });
         return json_response(201, {{"session_id", session.session_id},
                                    {"paper_id", session.paper_id},
                                    {"start_time", to_epoch_ms(session.start_time)},
                                    {"end_time", to_epoch_ms(session.end_time())},
                                    {"slots", slots}});
       }},

      {"GET", {"slots"},
       [&](const HttpRequest& r, auto&, const std::map<std::string, std::string>& query) {
         const auto id = participant(r);
         std::optional<StudyPhase> view;
         if (auto it = query.find("phase"); it != query.end()) {
           view = parse_phase(it->second);
           if (view != StudyPhase::BookingP && view != StudyPhase::Dialogues)
             bad_request("phase must be BookingP or Dialogues");
         }
         return json_response(200, p.read([&](const SchedulerState& s) {
           json out = json::array();
           for (const auto& [sid, slot] : s.slots) {
             const auto& session = s.sessions.at(slot.session_id);
             const auto& paper = s.papers.at(session.paper_id);
             const bool as_p = slot.booked_p_participant_id == id;
             const bool as_de = session.de_participant_id == id;
             if (view == StudyPhase::BookingP &&
                 (slot.booked_p_participant_id || as_de || paper.owner_participant_id == id))
               continue;
             if (view == StudyPhase::Dialogues && !as_p && !as_de) continue;
             json role = as_de ? json("DE") : as_p ? json("P") : json(nullptr);
             out.push_back({{"slot_id", sid},
                            {"session_id", slot.session_id},
                            {"slot_index", slot.slot_index},
                            {"paper_id", paper.paper_id},
                            {"title", paper.title},
                            {"start_time", to_epoch_ms(slot.start_time)},
                            {"end_time", to_epoch_ms(slot.end_time())},
                            {"booked", slot.booked_p_participant_id.has_value()},
                            {"role", role}});
           }
           return json{{"slots", out}};
         }));
       }},

      {"POST", {"slots", "{}", "book"},
       [&](const HttpRequest& r, const std::vector<std::string>& params, auto&) {
         const auto id = participant(r);
         auto c = p.book_slot(id, params[0]);
         return json_response(200, {{"slot_id", c.slot_id},
                                    {"session_id", c.session_id},
                                    {"paper_id", c.paper_id},
                                    {"start_time", to_epoch_ms(c.start_time)},
                                    {"duration_minutes", c.duration.count()},
                                    {"notifications", c.notification_ids}});
       }},

      {"GET", {"notifications", "due"},
       [&](const HttpRequest& r, auto&, auto&) {
         const auto id = participant(r);
         json out = json::array();
         for (const auto& n : p.due_notifications(id)) out.push_back(notification_json(n));
         return json_response(200, {{"notifications", out}});
       }},

      {"GET", {"corpus", "export"},
       [&](const HttpRequest& r, auto&, auto&) {
         require_admin(r);
         return HttpResponse{200, "application/json", p.export_corpus()};
       }},
  };

  const auto [path, query] = split_target(req.target);
  const auto segs = segments(path);
  std::vector<std::string> params;
  bool path_known = false;
  for (const auto& route : routes) {
    if (!matches(route.pattern, segs, params)) continue;
    path_known = true;
    if (route.method == req.method) return route.handler(req, params, query);
  }
  if (path_known) throw Error(ErrorCode::MethodNotAllowed, req.method + " not allowed on " + path);
  if (req.method == "GET" && static_dir_) return serve_static(path);
  throw Error(ErrorCode::NotFound, "no route for " + path);
}

HttpResponse Gateway::serve_static(const std::string& path) const {
  std::filesystem::path rel = path == "/" ? "index.html" : path.substr(1);
  for (const auto& part : rel)
    if (part == "..") throw Error(ErrorCode::NotFound, "no such asset");
  const auto file = *static_dir_ / rel;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(file, ec)) throw Error(ErrorCode::NotFound, "no such asset " + path);
  return {200, std::string(content_type_for(file)), read_file(file)};
}

}  // namespace forge::gateway
