#pragma once

// Durable study state: a snapshot file plus an append-only JSON-lines log in
// one directory. Each log line is one command's batch of entity upserts, so
// a torn final line drops exactly one incomplete command.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/domain.hpp"
#include "forge/scheduler.hpp"
#include "forge/session.hpp"

namespace forge {

struct StudyState {
  SchedulerState scheduler;
  std::map<std::string, LiveSession> live;
  std::vector<Dialogue> corpus;  // finalized dialogues, in finalization order

  bool operator==(const StudyState&) const = default;
};

/// Finalized dialogues plus the papers they are grounded on.
Corpus corpus_of(const StudyState& state);

/// Canonical corpus bytes: compact JSON with sorted keys, papers ordered by
/// id, one trailing LF. Emails and names never appear.
std::string export_corpus(const Corpus& corpus);

/// Throws Error{ParseError} on malformed JSON or schema shape, and
/// Error{IntegrityError} (with the offending field path) on broken invariants.
Corpus import_corpus(std::string_view bytes);

/// Referential integrity across all id fields; throws Error{IntegrityError}.
void check_integrity(const StudyState& state);

struct StoreRecord {
  std::string kind;
  nlohmann::json value;

  bool operator==(const StoreRecord&) const = default;
};

StoreRecord put(const StudyCalendar& calendar);
StoreRecord put_counter(std::uint64_t next_id);
StoreRecord put(const Participant& participant);
StoreRecord put(const Paper& paper);
StoreRecord put(const DeSession& session);
StoreRecord put(const SessionSlot& slot);
StoreRecord put(const Notification& notification);
StoreRecord put(const LiveSession& live);
StoreRecord put(const Dialogue& dialogue);

void apply(StudyState& state, const StoreRecord& record);

/// Upserts that add an imported corpus to `state`. Throws
/// Error{IntegrityError} when an id already exists with different content.
std::vector<StoreRecord> import_records(const StudyState& state, const Corpus& corpus);

/// Upserts that turn `before` into `after`. Entities are never deleted.
std::vector<StoreRecord> diff_records(const SchedulerState& before, const SchedulerState& after);

/// Full state as bytes; restore_snapshot("") yields a fresh state.
std::string snapshot(const StudyState& state, std::uint64_t last_seq = 0);
/// Throws Error{CorruptSnapshot}.
StudyState restore_snapshot(std::string_view bytes, std::uint64_t* last_seq = nullptr);

/// Applies every complete log line with seq > after_seq. A final line
/// without its terminating LF (or unparsable) is treated as torn and
/// skipped; corruption anywhere else throws Error{CorruptSnapshot}.
/// `valid_bytes` receives the length of the prefix that was fully consumed.
std::uint64_t replay_log(StudyState& state, std::string_view log_bytes, std::uint64_t after_seq = 0,
                         std::size_t* valid_bytes = nullptr);

std::string encode_log_line(std::uint64_t seq, const std::vector<StoreRecord>& batch);

class Store {
 public:
  explicit Store(std::filesystem::path dir);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  /// Snapshot plus log replay. Must be called before append().
  StudyState restore();
  /// Appends one batch durably (fsync).
  void append(const std::vector<StoreRecord>& batch);
  /// Writes a fresh snapshot atomically and truncates the log.
  void compact(const StudyState& state);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path snapshot_path() const { return dir_ / "snapshot.json"; }
  std::filesystem::path log_path() const { return dir_ / "log.jsonl"; }

 private:
  void open_log();

  std::filesystem::path dir_;
  std::FILE* log_ = nullptr;
  std::uint64_t seq_ = 0;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace forge
