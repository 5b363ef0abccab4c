#pragma once

// Canonical corpus JSON schema:
//   {"dialogues":[...], "papers":[...]}
//   paper:    {"owner","paper_id","sections":[{"kind","sentences":[...]}],"title"}
//   dialogue: {"id","messages":[...],"paper_id","slot_id"}
//   message:  {"facts":[{"index","section"}],"id","role":"P"|"DE",
//              "sentences":[{"intent":null|"AI"|"RI"|"S"|"AR"|"GO","text"}],
//              "sent_at":<epoch milliseconds>}

#include <string>

#include <json.hpp>

#include "forge/domain.hpp"

namespace forge::json_codec {

using nlohmann::json;

json to_json(const Paper& paper);
json to_json(const Message& msg);
json to_json(const Dialogue& dialogue);
json to_json(const FactAnchor& anchor);
json corpus_to_json(const Corpus& corpus);

// Decoders throw Error{ParseError} naming the offending path on shape errors.
// They do not check domain invariants; see check_corpus().
Paper paper_from_json(const json& j, const std::string& path);
Message message_from_json(const json& j, const std::string& path);
Dialogue dialogue_from_json(const json& j, const std::string& path);
FactAnchor anchor_from_json(const json& j, const std::string& path);
Corpus corpus_from_json(const json& j);

/// Role-filtered view of a paper as sent over the wire.
json visible_paper_json(const Paper& visible);

// Small accessors that report the JSON path on failure.
const json& require(const json& j, const char* key, const std::string& path);
std::string require_string(const json& j, const char* key, const std::string& path);
std::int64_t require_int(const json& j, const char* key, const std::string& path);

}  // namespace forge::json_codec
