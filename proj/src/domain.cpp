#include "forge/domain.hpp"

#include <algorithm>
#include <set>

#include "forge/error.hpp"

namespace forge {

std::string_view role_code(Role r) noexcept {
  return r == Role::Proponent ? "P" : "DE";
}

std::optional<Role> parse_role(std::string_view s) noexcept {
  if (s == "P") return Role::Proponent;
  if (s == "DE") return Role::DomainExpert;
  return std::nullopt;
}

std::string_view intent_code(IntentLabel l) noexcept {
  switch (l) {
    case IntentLabel::AskInfo: return "AI";
    case IntentLabel::ReplyInfo: return "RI";
    case IntentLabel::AskSuggestion: return "S";
    case IntentLabel::AskRebuttal: return "AR";
    case IntentLabel::GiveOpinion: return "GO";
  }
  return "AI";
}

std::optional<IntentLabel> parse_intent(std::string_view s) noexcept {
  for (IntentLabel l : kAllIntents)
    if (intent_code(l) == s) return l;
  return std::nullopt;
}

std::string_view section_code(SectionKind k) noexcept {
  switch (k) {
    case SectionKind::Title: return "title";
    case SectionKind::Abstract: return "abstract";
    case SectionKind::Introduction: return "introduction";
  }
  return "title";
}

std::optional<SectionKind> parse_section(std::string_view s) noexcept {
  for (SectionKind k : {SectionKind::Title, SectionKind::Abstract, SectionKind::Introduction})
    if (section_code(k) == s) return k;
  return std::nullopt;
}

std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string{s.substr(b, e - b)};
}

const Section* Paper::section(SectionKind kind) const noexcept {
  for (const auto& s : sections)
    if (s.kind == kind) return &s;
  return nullptr;
}

std::vector<std::string> Paper::flattened_sentences() const {
  std::vector<std::string> out;
  for (SectionKind k : {SectionKind::Title, SectionKind::Abstract, SectionKind::Introduction})
    if (const Section* s = section(k)) out.insert(out.end(), s->sentences.begin(), s->sentences.end());
  return out;
}

std::optional<std::size_t> Paper::global_index(const FactAnchor& anchor) const {
  std::size_t offset = 0;
  for (SectionKind k : {SectionKind::Title, SectionKind::Abstract, SectionKind::Introduction}) {
    const Section* s = section(k);
    if (k == anchor.section) {
      if (!s || anchor.sentence_index >= s->sentences.size()) return std::nullopt;
      return offset + anchor.sentence_index;
    }
    if (s) offset += s->sentences.size();
  }
  return std::nullopt;
}

Paper make_paper(std::string paper_id, std::string title, std::vector<std::string> abstract,
                 std::vector<std::string> introduction, std::string owner) {
  Paper p;
  p.paper_id = std::move(paper_id);
  p.title = std::move(title);
  p.owner_participant_id = std::move(owner);
  p.sections.push_back({SectionKind::Title, {p.title}});
  p.sections.push_back({SectionKind::Abstract, std::move(abstract)});
  p.sections.push_back({SectionKind::Introduction, std::move(introduction)});
  return p;
}

std::string Message::text() const {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s.text;
  }
  return out;
}

bool is_mixed(const Message& msg) noexcept {
  bool is = false, arg = false;
  for (const auto& s : msg.sentences) {
    if (!s.intent) continue;
    (intent_group(*s.intent) == IntentGroup::Argumentative ? arg : is) = true;
  }
  return is && arg;
}

std::vector<DialogueTurn> derive_turns(const std::vector<Message>& messages) {
  std::vector<DialogueTurn> turns;
  for (std::size_t i = 0; i + 1 < messages.size(); ++i) {
    if (messages[i].role == Role::Proponent && messages[i + 1].role == Role::DomainExpert) {
      turns.push_back({messages[i], messages[i + 1]});
      ++i;
    }
  }
  return turns;
}

MessageCheck validate_message(const Message& msg, const Paper& paper) {
  if (msg.sentences.empty())
    throw Error(ErrorCode::EmptyMessage, "message has no sentences", "sentences");
  for (std::size_t i = 0; i < msg.sentences.size(); ++i)
    if (trim(msg.sentences[i].text).empty())
      throw Error(ErrorCode::EmptyMessage, "sentence text is empty",
                  "sentences[" + std::to_string(i) + "].text");
  if (msg.facts.size() > kMaxFactsPerMessage)
    throw Error(ErrorCode::TooManyFacts,
                "a message may anchor at most 2 facts, got " + std::to_string(msg.facts.size()),
                "facts");
  if (msg.role == Role::Proponent && !msg.facts.empty())
    throw Error(ErrorCode::ProponentWithFacts, "proponent messages cannot anchor facts", "facts");
  for (std::size_t i = 0; i < msg.facts.size(); ++i)
    if (!paper.resolves(msg.facts[i]))
      throw Error(ErrorCode::DanglingAnchor,
                  "fact anchor " + std::string(section_code(msg.facts[i].section)) + "[" +
                      std::to_string(msg.facts[i].sentence_index) + "] does not resolve in " +
                      paper.paper_id,
                  "facts[" + std::to_string(i) + "]");
  return {msg.role == Role::DomainExpert && msg.facts.empty()};
}

void check_paper(const Paper& paper, const std::string& path) {
  auto fail = [&](const std::string& sub, const std::string& what) {
    throw Error(ErrorCode::IntegrityError, what, path + sub);
  };
  if (paper.paper_id.empty()) fail(".paper_id", "paper_id is empty");
  if (paper.sections.empty() || paper.sections.front().kind != SectionKind::Title)
    fail(".sections", "first section must be the title");
  const auto& title = paper.sections.front();
  if (title.sentences.size() != 1 || title.sentences.front() != paper.title)
    fail(".sections[0]", "title section must hold exactly the title");
  int last = -1;
  for (std::size_t i = 0; i < paper.sections.size(); ++i) {
    const auto& s = paper.sections[i];
    int kind = static_cast<int>(s.kind);
    if (kind <= last)
      fail(".sections[" + std::to_string(i) + "].kind", "sections must be ordered title, abstract, introduction");
    last = kind;
    for (std::size_t j = 0; j < s.sentences.size(); ++j)
      if (trim(s.sentences[j]).empty())
        fail(".sections[" + std::to_string(i) + "].sentences[" + std::to_string(j) + "]",
             "empty sentence");
  }
}

void check_dialogue(const Dialogue& dialogue, const Paper& paper, const std::string& path) {
  if (dialogue.messages.size() < kMinFinalizedMessages)
    throw Error(ErrorCode::IntegrityError,
                "finalized dialogues need at least 8 messages, got " +
                    std::to_string(dialogue.messages.size()),
                path + ".messages");
  std::set<std::string> ids;
  for (std::size_t j = 0; j < dialogue.messages.size(); ++j) {
    const auto& m = dialogue.messages[j];
    const std::string mpath = path + ".messages[" + std::to_string(j) + "]";
    if (!ids.insert(m.message_id).second)
      throw Error(ErrorCode::IntegrityError, "duplicate message id " + m.message_id, mpath + ".id");
    if (j > 0 && m.sent_at <= dialogue.messages[j - 1].sent_at)
      throw Error(ErrorCode::IntegrityError, "messages must have strictly increasing sent_at",
                  mpath + ".sent_at");
    try {
      validate_message(m, paper);
    } catch (const Error& e) {
      throw Error(ErrorCode::IntegrityError, e.what(), mpath + "." + e.path());
    }
  }
}

void check_corpus(const Corpus& corpus) {
  for (const auto& [id, paper] : corpus.papers) {
    check_paper(paper, "papers[" + id + "]");
    if (paper.paper_id != id)
      throw Error(ErrorCode::IntegrityError, "paper key mismatch", "papers[" + id + "].paper_id");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < corpus.dialogues.size(); ++i) {
    const auto& d = corpus.dialogues[i];
    const std::string path = "dialogues[" + std::to_string(i) + "]";
    if (!ids.insert(d.dialogue_id).second)
      throw Error(ErrorCode::IntegrityError, "duplicate dialogue id " + d.dialogue_id, path + ".id");
    auto it = corpus.papers.find(d.paper_id);
    if (it == corpus.papers.end())
      throw Error(ErrorCode::IntegrityError, "unknown paper_id " + d.paper_id, path + ".paper_id");
    check_dialogue(d, it->second, path);
  }
}

}  // namespace forge
