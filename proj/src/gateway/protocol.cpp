#include "forge/gateway/protocol.hpp"

#include "forge/corpus_json.hpp"

namespace forge::gateway {

using nlohmann::json;
namespace jc = json_codec;

namespace {

[[noreturn]] void bad_frame(const std::string& why) { throw Error(ErrorCode::BadRequest, "bad frame: " + why); }

}  // namespace

ClientFrame parse_client_frame(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) bad_frame("not a JSON object");
  auto t = j.find("t");
  if (t == j.end() || !t->is_string()) bad_frame("missing \"t\"");

  ClientFrame f;
  const auto& kind = t->get_ref<const std::string&>();
  if (kind == "join") {
    f.kind = ClientFrame::Kind::Join;
    auto slot = j.find("slot");
    if (slot == j.end() || !slot->is_string()) bad_frame("join needs \"slot\"");
    f.slot = slot->get<std::string>();
  } else if (kind == "msg") {
    f.kind = ClientFrame::Kind::Msg;
    auto body = j.find("text");
    if (body == j.end() || !body->is_string()) bad_frame("msg needs \"text\"");
    f.text = body->get<std::string>();
    if (auto facts = j.find("facts"); facts != j.end() && !facts->is_null()) {
      if (!facts->is_array()) bad_frame("\"facts\" must be an array");
      try {
        for (std::size_t i = 0; i < facts->size(); ++i)
          f.facts.push_back(jc::anchor_from_json((*facts)[i], "facts[" + std::to_string(i) + "]"));
      } catch (const Error& e) {
        throw Error(ErrorCode::BadRequest, e.what(), e.path());
      }
    }
  } else if (kind == "end") {
    f.kind = ClientFrame::Kind::End;
  } else {
    bad_frame("unknown type \"" + kind + "\"");
  }
  return f;
}

json event_frame(const SessionEvent& event) {
  return std::visit(
      [](const auto& ev) -> json {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, PresenceChanged>) {
          return presence_frame(ev.present);
        } else if constexpr (std::is_same_v<T, MessagePosted>) {
          json j = jc::to_json(ev.message);
          j["t"] = "msg";
          return j;
        } else if constexpr (std::is_same_v<T, NoFactWarning>) {
          return {{"t", "warn_no_fact"}};
        } else if constexpr (std::is_same_v<T, HintEvent>) {
          return {{"t", "hint"}, {"text", ev.text}, {"issued_at", to_epoch_ms(ev.issued_at)}};
        } else {
          return {{"t", "closed"}, {"reason", ev.reason}, {"state", state_name(ev.final_state)}};
        }
      },
      event);
}

json joined_frame(Role role, const LiveSession& session, const Paper& paper) {
  json transcript = json::array();
  for (const auto& m : session.transcript) transcript.push_back(jc::to_json(m));
  return {{"t", "joined"},
          {"role", role_code(role)},
          {"slot", session.slot_id},
          {"state", state_name(session.state)},
          {"deadline", to_epoch_ms(session.deadline)},
          {"paper", jc::visible_paper_json(paper)},
          {"transcript", std::move(transcript)}};
}

json presence_frame(bool present) { return {{"t", "peer_presence"}, {"present", present}}; }

json error_frame(const Error& error) {
  json j = {{"t", "error"}, {"code", to_string(error.code())}, {"message", error.what()}};
  if (!error.path().empty()) j["path"] = error.path();
  return j;
}

}  // namespace forge::gateway
