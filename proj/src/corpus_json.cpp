#include "forge/corpus_json.hpp"

#include "forge/error.hpp"

namespace forge::json_codec {

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, what + " at " + path, path);
}

std::string at(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

std::string idx(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& require_array(const json& j, const char* key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_array()) parse_fail(at(path, key), "expected array");
  return v;
}

}  // namespace

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) parse_fail(path.empty() ? "$" : path, "expected object");
  auto it = j.find(key);
  if (it == j.end()) parse_fail(at(path, key), "missing field");
  return *it;
}

std::string require_string(const json& j, const char* key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_string()) parse_fail(at(path, key), "expected string");
  return v.get<std::string>();
}

std::int64_t require_int(const json& j, const char* key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number_integer()) parse_fail(at(path, key), "expected integer");
  return v.get<std::int64_t>();
}

json to_json(const FactAnchor& a) {
  return {{"section", section_code(a.section)}, {"index", a.sentence_index}};
}

json to_json(const Paper& paper) {
  json sections = json::array();
  for (const auto& s : paper.sections)
    sections.push_back({{"kind", section_code(s.kind)}, {"sentences", s.sentences}});
  return {{"paper_id", paper.paper_id},
          {"title", paper.title},
          {"sections", std::move(sections)},
          {"owner", paper.owner_participant_id}};
}

json visible_paper_json(const Paper& visible) {
  json j = to_json(visible);
  j.erase("owner");
  return j;
}

json to_json(const Message& m) {
  json sentences = json::array();
  for (const auto& s : m.sentences)
    sentences.push_back({{"text", s.text},
                         {"intent", s.intent ? json(intent_code(*s.intent)) : json(nullptr)}});
  json facts = json::array();
  for (const auto& f : m.facts) facts.push_back(to_json(f));
  return {{"id", m.message_id},
          {"role", role_code(m.role)},
          {"sentences", std::move(sentences)},
          {"facts", std::move(facts)},
          {"sent_at", to_epoch_ms(m.sent_at)}};
}

json to_json(const Dialogue& d) {
  json messages = json::array();
  for (const auto& m : d.messages) messages.push_back(to_json(m));
  return {{"id", d.dialogue_id},
          {"paper_id", d.paper_id},
          {"slot_id", d.slot_id},
          {"messages", std::move(messages)}};
}

json corpus_to_json(const Corpus& corpus) {
  json papers = json::array();
  for (const auto& [id, p] : corpus.papers) papers.push_back(to_json(p));
  json dialogues = json::array();
  for (const auto& d : corpus.dialogues) dialogues.push_back(to_json(d));
  return {{"papers", std::move(papers)}, {"dialogues", std::move(dialogues)}};
}

FactAnchor anchor_from_json(const json& j, const std::string& path) {
  FactAnchor a;
  auto kind = parse_section(require_string(j, "section", path));
  if (!kind) parse_fail(at(path, "section"), "unknown section kind");
  a.section = *kind;
  std::int64_t index = require_int(j, "index", path);
  if (index < 0) parse_fail(at(path, "index"), "negative sentence index");
  a.sentence_index = static_cast<std::size_t>(index);
  return a;
}

Paper paper_from_json(const json& j, const std::string& path) {
  Paper p;
  p.paper_id = require_string(j, "paper_id", path);
  p.title = require_string(j, "title", path);
  p.owner_participant_id = require_string(j, "owner", path);
  const json& sections = require_array(j, "sections", path);
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const std::string spath = idx(at(path, "sections"), i);
    Section s;
    auto kind = parse_section(require_string(sections[i], "kind", spath));
    if (!kind) parse_fail(at(spath, "kind"), "unknown section kind");
    s.kind = *kind;
    const json& sentences = require_array(sections[i], "sentences", spath);
    for (std::size_t k = 0; k < sentences.size(); ++k) {
      if (!sentences[k].is_string()) parse_fail(idx(at(spath, "sentences"), k), "expected string");
      s.sentences.push_back(sentences[k].get<std::string>());
    }
    p.sections.push_back(std::move(s));
  }
  return p;
}

Message message_from_json(const json& j, const std::string& path) {
  Message m;
  m.message_id = require_string(j, "id", path);
  auto role = parse_role(require_string(j, "role", path));
  if (!role) parse_fail(at(path, "role"), "role must be \"P\" or \"DE\"");
  m.role = *role;
  const json& sentences = require_array(j, "sentences", path);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const std::string spath = idx(at(path, "sentences"), i);
    SentenceUnit s;
    s.text = require_string(sentences[i], "text", spath);
    const json& intent = require(sentences[i], "intent", spath);
    if (!intent.is_null()) {
      if (!intent.is_string()) parse_fail(at(spath, "intent"), "expected string or null");
      s.intent = parse_intent(intent.get<std::string>());
      if (!s.intent) parse_fail(at(spath, "intent"), "unknown intent label");
    }
    m.sentences.push_back(std::move(s));
  }
  const json& facts = require_array(j, "facts", path);
  for (std::size_t i = 0; i < facts.size(); ++i)
    m.facts.push_back(anchor_from_json(facts[i], idx(at(path, "facts"), i)));
  m.sent_at = from_epoch_ms(require_int(j, "sent_at", path));
  m.no_fact_warning = m.role == Role::DomainExpert && m.facts.empty();
  return m;
}

Dialogue dialogue_from_json(const json& j, const std::string& path) {
  Dialogue d;
  d.dialogue_id = require_string(j, "id", path);
  d.paper_id = require_string(j, "paper_id", path);
  d.slot_id = require_string(j, "slot_id", path);
  const json& messages = require_array(j, "messages", path);
  for (std::size_t i = 0; i < messages.size(); ++i)
    d.messages.push_back(message_from_json(messages[i], idx(at(path, "messages"), i)));
  d.finalized = true;
  return d;
}

Corpus corpus_from_json(const json& j) {
  Corpus c;
  const json& papers = require_array(j, "papers", "");
  for (std::size_t i = 0; i < papers.size(); ++i) {
    const std::string path = idx("papers", i);
    Paper p = paper_from_json(papers[i], path);
    check_paper(p, path);
    if (c.papers.contains(p.paper_id))
      throw Error(ErrorCode::IntegrityError, "duplicate paper_id " + p.paper_id, path + ".paper_id");
    c.papers.emplace(p.paper_id, std::move(p));
  }
  const json& dialogues = require_array(j, "dialogues", "");
  for (std::size_t i = 0; i < dialogues.size(); ++i)
    c.dialogues.push_back(dialogue_from_json(dialogues[i], idx("dialogues", i)));
  return c;
}

}  // namespace forge::json_codec
