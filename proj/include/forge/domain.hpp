#pragma once

// Shared data model for collected dialogues: papers, roles, sentence-level
// intents, fact anchors, messages, dialogues and the corpus.

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

/// UTC wall clock at millisecond precision. Assigned server-side only.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

inline Timestamp from_epoch_ms(std::int64_t ms) {
  return Timestamp{std::chrono::milliseconds{ms}};
}
inline std::int64_t to_epoch_ms(Timestamp t) { return t.time_since_epoch().count(); }

enum class SectionKind { Title, Abstract, Introduction };

enum class Role { Proponent, DomainExpert };

enum class IntentLabel { AskInfo, ReplyInfo, AskSuggestion, AskRebuttal, GiveOpinion };

enum class IntentGroup { InformationSeeking, Argumentative };

inline constexpr IntentLabel kAllIntents[] = {
    IntentLabel::AskInfo, IntentLabel::AskSuggestion, IntentLabel::ReplyInfo,
    IntentLabel::GiveOpinion, IntentLabel::AskRebuttal};

constexpr IntentGroup intent_group(IntentLabel label) noexcept {
  switch (label) {
    case IntentLabel::AskInfo:
    case IntentLabel::ReplyInfo:
    case IntentLabel::AskSuggestion:
      return IntentGroup::InformationSeeking;
    case IntentLabel::AskRebuttal:
    case IntentLabel::GiveOpinion:
      return IntentGroup::Argumentative;
  }
  return IntentGroup::InformationSeeking;
}

constexpr Role other(Role r) noexcept {
  return r == Role::Proponent ? Role::DomainExpert : Role::Proponent;
}

// Wire codes: "P"/"DE", "AI"/"RI"/"S"/"AR"/"GO", "title"/"abstract"/"introduction".
std::string_view role_code(Role r) noexcept;
std::optional<Role> parse_role(std::string_view s) noexcept;
std::string_view intent_code(IntentLabel l) noexcept;
std::optional<IntentLabel> parse_intent(std::string_view s) noexcept;
std::string_view section_code(SectionKind k) noexcept;
std::optional<SectionKind> parse_section(std::string_view s) noexcept;

struct Section {
  SectionKind kind = SectionKind::Title;
  std::vector<std::string> sentences;

  bool operator==(const Section&) const = default;
};

struct FactAnchor {
  SectionKind section = SectionKind::Title;
  std::size_t sentence_index = 0;

  auto operator<=>(const FactAnchor&) const = default;
};

struct Paper {
  std::string paper_id;
  std::string title;
  std::vector<Section> sections;  // Title, then optionally Abstract, Introduction
  std::string owner_participant_id;

  const Section* section(SectionKind kind) const noexcept;
  /// Title + Abstract + Introduction sentences in reading order.
  std::vector<std::string> flattened_sentences() const;
  /// Position of an anchored sentence in flattened_sentences(); nullopt if
  /// the anchor does not resolve.
  std::optional<std::size_t> global_index(const FactAnchor& anchor) const;
  bool resolves(const FactAnchor& anchor) const { return global_index(anchor).has_value(); }

  bool operator==(const Paper&) const = default;
};

/// Builds a paper with a single-sentence Title section plus the given sections.
Paper make_paper(std::string paper_id, std::string title, std::vector<std::string> abstract,
                 std::vector<std::string> introduction, std::string owner = {});

struct SentenceUnit {
  std::string text;
  std::optional<IntentLabel> intent;

  bool operator==(const SentenceUnit&) const = default;
};

struct Message {
  std::string message_id;
  Role role = Role::Proponent;
  std::vector<SentenceUnit> sentences;
  std::vector<FactAnchor> facts;
  Timestamp sent_at{};
  bool no_fact_warning = false;

  bool is_multi_sentence() const noexcept { return sentences.size() >= 2; }
  /// Sentences joined by single spaces.
  std::string text() const;

  bool operator==(const Message&) const = default;
};

/// A message is Mixed when its sentences carry both IS and Arg labels.
bool is_mixed(const Message& msg) noexcept;

inline constexpr std::size_t kMaxFactsPerMessage = 2;
inline constexpr std::size_t kMinFinalizedMessages = 8;

struct Dialogue {
  std::string dialogue_id;
  std::string paper_id;
  std::vector<Message> messages;
  std::string slot_id;
  bool finalized = false;

  bool operator==(const Dialogue&) const = default;
};

struct DialogueTurn {
  Message p_message;
  Message de_message;

  bool operator==(const DialogueTurn&) const = default;
};

struct Corpus {
  std::map<std::string, Paper> papers;
  std::vector<Dialogue> dialogues;

  bool operator==(const Corpus&) const = default;
};

/// Every adjacent (P, DE) pair in transcript order.
std::vector<DialogueTurn> derive_turns(const std::vector<Message>& messages);
inline std::vector<DialogueTurn> derive_turns(const Dialogue& dialogue) {
  return derive_turns(dialogue.messages);
}

struct MessageCheck {
  bool no_fact_warning = false;
};

/// Throws Error{TooManyFacts | ProponentWithFacts | DanglingAnchor | EmptyMessage}.
/// A DE message without facts passes with no_fact_warning set.
MessageCheck validate_message(const Message& msg, const Paper& paper);

/// Throws Error{IntegrityError} with `path` prefixed to the offending field.
void check_paper(const Paper& paper, const std::string& path = "paper");
void check_dialogue(const Dialogue& dialogue, const Paper& paper, const std::string& path);
void check_corpus(const Corpus& corpus);

std::string trim(std::string_view s);

}  // namespace forge
