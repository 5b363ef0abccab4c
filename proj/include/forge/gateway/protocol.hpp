#pragma once

// Realtime frames, one JSON object per frame, discriminated by "t".
//
// client -> server
//   {"t":"join","slot":"<slot_id>"}
//   {"t":"msg","text":"...","facts":[{"section":"abstract","index":2}]}
//   {"t":"end"}
// server -> client
//   {"t":"joined","role":"P"|"DE","slot":...,"state":...,"deadline":<ms>,
//    "paper":<role-filtered paper>,"transcript":[<message>...]}
//   {"t":"msg", <message fields>}
//   {"t":"warn_no_fact"}
//   {"t":"hint","text":...,"issued_at":<ms>}
//   {"t":"peer_presence","present":true|false}
//   {"t":"closed","reason":...,"state":...}
//   {"t":"error","code":...,"message":...}

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/domain.hpp"
#include "forge/error.hpp"
#include "forge/session.hpp"

namespace forge::gateway {

struct ClientFrame {
  enum class Kind { Join, Msg, End };
  Kind kind = Kind::End;
  std::string slot;
  std::string text;
  std::vector<FactAnchor> facts;
};

/// Throws Error{BadRequest} for malformed frames.
ClientFrame parse_client_frame(std::string_view text);

nlohmann::json event_frame(const SessionEvent& event);
/// `paper` must already be filtered with visible_paper(role, ...).
nlohmann::json joined_frame(Role role, const LiveSession& session, const Paper& paper);
nlohmann::json presence_frame(bool present);
nlohmann::json error_frame(const Error& error);

}  // namespace forge::gateway
