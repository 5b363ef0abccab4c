#pragma once

// The running study: scheduler commands, one actor per live session, the
// finalized corpus and durable logging of every state change. Transports
// (HTTP, WebSocket, tests) talk to this class only.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "forge/scheduler.hpp"
#include "forge/session.hpp"
#include "forge/store.hpp"

namespace forge::gateway {

using Clock = std::function<Timestamp()>;
Clock system_clock();

struct PlatformConfig {
  SchedulerConfig scheduler;
  SessionTiming timing;
  /// Operator credential for /calendar writes and corpus export. Empty
  /// disables those endpoints.
  std::string admin_code;
};

/// Receives server frames for one connection. Must not block or call back
/// into the platform.
using FrameSink = std::function<void(const nlohmann::json& frame)>;
using ConnectionId = std::uint64_t;

struct ConnectionCtx {
  std::string participant_id;
  std::optional<std::string> slot_id;
  std::optional<Role> role;  // set only after a successful join
};

class Platform {
 public:
  /// Restores from `store` when given; the store must outlive the platform.
  Platform(PlatformConfig config, Store* store, Clock clock,
           Scheduler::CodeGenerator codes = generate_auth_code);
  ~Platform();
  Platform(const Platform&) = delete;
  Platform& operator=(const Platform&) = delete;

  /// Throws Error{Unauthorized}.
  std::string authenticate(std::string_view auth_code) const;
  bool is_admin(std::string_view code) const noexcept;

  // Scheduler commands. Each first advances the phase to the current time.
  Participant register_participant(const std::string& full_name, const std::string& email,
                                   const std::vector<PaperSubmission>& submissions);
  DeSession create_de_session(const std::string& participant_id, const std::string& paper_id,
                              Timestamp start_time);
  BookingConfirmation book_slot(const std::string& participant_id, const std::string& slot_id);
  std::vector<Notification> due_notifications(const std::string& participant_id);
  void set_deadlines(const std::array<Timestamp, 4>& deadlines);

  /// Consistent read of scheduler state.
  template <class F>
  auto read(F&& f) const {
    std::lock_guard lock(sched_mutex_);
    return std::forward<F>(f)(scheduler_.state());
  }

  Corpus corpus() const;
  std::string export_corpus() const;

  // Realtime connections.
  ConnectionId connect(const std::string& participant_id, FrameSink sink);
  void receive(ConnectionId id, std::string_view frame);
  void disconnect(ConnectionId id);
  std::optional<ConnectionCtx> connection(ConnectionId id) const;

  /// Phase advance plus time-driven session transitions, hints and
  /// finalization. Call periodically.
  void tick();

  /// Composed state of every component.
  StudyState state() const;
  std::optional<LiveSession> live_session(const std::string& slot_id) const;
  /// Writes a snapshot and truncates the log; requires a store.
  void compact();

  Timestamp now() const { return clock_(); }
  const PlatformConfig& config() const noexcept { return config_; }

 private:
  struct Live {
    std::shared_ptr<SessionActor> actor;
    Paper paper;
  };

  template <class F>
  auto scheduler_command(F&& f);
  void persist(std::vector<StoreRecord> batch);
  std::shared_ptr<Live> live_for(const std::string& slot_id, bool create);
  void send(ConnectionId id, const nlohmann::json& frame);
  void deliver(const std::string& slot_id, const std::vector<SessionEvent>& events);
  void close_if_finalizable(LiveSession& s, Timestamp now);
  void handle_join(ConnectionId id, const std::string& slot_id);
  void handle_msg(ConnectionId id, const std::string& text, const std::vector<FactAnchor>& facts);
  void handle_end(ConnectionId id);
  std::pair<std::shared_ptr<Live>, Role> seat_of(ConnectionId id) const;

  PlatformConfig config_;
  Store* store_;
  Clock clock_;

  // Lock order: a session actor may take any of the mutexes below, each
  // held on its own; sched_mutex_ is never held while taking an actor.
  mutable std::mutex sched_mutex_;
  Scheduler scheduler_;

  mutable std::mutex live_mutex_;
  std::map<std::string, std::shared_ptr<Live>> live_;

  mutable std::mutex corpus_mutex_;
  std::vector<Dialogue> corpus_;

  mutable std::mutex conn_mutex_;
  struct Connection {
    ConnectionCtx ctx;
    FrameSink sink;
  };
  std::map<ConnectionId, Connection> connections_;
  std::map<std::string, std::array<std::optional<ConnectionId>, 2>> seats_;
  ConnectionId next_connection_ = 1;

  std::mutex store_mutex_;
};

}  // namespace forge::gateway
