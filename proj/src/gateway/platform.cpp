#include "forge/gateway/platform.hpp"

#include <algorithm>

#include "forge/error.hpp"
#include "forge/gateway/protocol.hpp"

namespace forge::gateway {

using nlohmann::json;

Clock system_clock() {
  return [] { return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now()); };
}

namespace {

std::size_t seat(Role r) { return static_cast<std::size_t>(r); }

}  // namespace

Platform::Platform(PlatformConfig config, Store* store, Clock clock, Scheduler::CodeGenerator codes)
    : config_(std::move(config)), store_(store), clock_(std::move(clock)) {
  StudyState restored = store_ ? store_->restore() : StudyState{};
  scheduler_ = Scheduler(config_.scheduler, std::move(restored.scheduler), std::move(codes));
  corpus_ = std::move(restored.corpus);

  // connections did not survive the restart
  const Timestamp now = clock_();
  std::vector<StoreRecord> batch;
  for (auto& [slot_id, live] : restored.live) {
    for (Role r : {Role::Proponent, Role::DomainExpert}) leave_slot(live, r, now);
    if (!live.is_closed()) batch.push_back(put(live));
    const Paper* paper = scheduler_.paper(live.paper_id);
    if (!paper) throw Error(ErrorCode::CorruptSnapshot, "live session " + slot_id + " names an unknown paper");
    auto entry = std::make_shared<Live>(Live{std::make_shared<SessionActor>(std::move(live)), *paper});
    live_.emplace(slot_id, std::move(entry));
  }
  persist(std::move(batch));
}

Platform::~Platform() = default;

std::string Platform::authenticate(std::string_view auth_code) const {
  if (auth_code.empty()) throw Error(ErrorCode::Unauthorized, "missing auth code");
  std::lock_guard lock(sched_mutex_);
  auto id = scheduler_.participant_for_code(auth_code);
  if (!id) throw Error(ErrorCode::Unauthorized, "unknown auth code");
  return *id;
}

bool Platform::is_admin(std::string_view code) const noexcept {
  return !config_.admin_code.empty() && constant_time_equal(code, config_.admin_code);
}

void Platform::persist(std::vector<StoreRecord> batch) {
  if (!store_ || batch.empty()) return;
  std::lock_guard lock(store_mutex_);
  store_->append(batch);
}

template <class F>
auto Platform::scheduler_command(F&& f) {
  std::lock_guard lock(sched_mutex_);
  const SchedulerState before = scheduler_.state();
  scheduler_.advance_phase(clock_());
  try {
    if constexpr (std::is_void_v<decltype(f(scheduler_))>) {
      f(scheduler_);
      persist(diff_records(before, scheduler_.state()));
    } else {
      auto result = f(scheduler_);
      persist(diff_records(before, scheduler_.state()));
      return result;
    }
  } catch (...) {
    // the phase advance still happened and must survive a failed command
    persist(diff_records(before, scheduler_.state()));
    throw;
  }
}

Participant Platform::register_participant(const std::string& full_name, const std::string& email,
                                           const std::vector<PaperSubmission>& submissions) {
  return scheduler_command([&](Scheduler& s) { return s.register_participant(full_name, email, submissions); });
}

DeSession Platform::create_de_session(const std::string& participant_id, const std::string& paper_id,
                                      Timestamp start_time) {
  return scheduler_command(
      [&](Scheduler& s) { return s.create_de_session(participant_id, paper_id, start_time); });
}

BookingConfirmation Platform::book_slot(const std::string& participant_id, const std::string& slot_id) {
  return scheduler_command([&](Scheduler& s) { return s.book_slot_as_p(participant_id, slot_id); });
}

std::vector<Notification> Platform::due_notifications(const std::string& participant_id) {
  return scheduler_command([&](Scheduler& s) { return s.due_notifications(clock_(), participant_id); });
}

void Platform::set_deadlines(const std::array<Timestamp, 4>& deadlines) {
  scheduler_command([&](Scheduler& s) { s.set_deadlines(deadlines); });
}

Corpus Platform::corpus() const { return corpus_of(state()); }

std::string Platform::export_corpus() const { return forge::export_corpus(corpus()); }

StudyState Platform::state() const {
  StudyState out;
  {
    std::lock_guard lock(sched_mutex_);
    out.scheduler = scheduler_.state();
  }
  std::vector<std::shared_ptr<Live>> lives;
  {
    std::lock_guard lock(live_mutex_);
    for (const auto& [id, l] : live_) lives.push_back(l);
  }
  for (const auto& l : lives) {
    auto s = l->actor->snapshot();
    out.live.emplace(s.slot_id, std::move(s));
  }
  std::lock_guard lock(corpus_mutex_);
  out.corpus = corpus_;
  return out;
}

std::optional<LiveSession> Platform::live_session(const std::string& slot_id) const {
  std::shared_ptr<Live> l;
  {
    std::lock_guard lock(live_mutex_);
    auto it = live_.find(slot_id);
    if (it == live_.end()) return std::nullopt;
    l = it->second;
  }
  return l->actor->snapshot();
}

void Platform::compact() {
  if (!store_) throw Error(ErrorCode::InvalidArgument, "platform has no store");
  auto s = state();
  std::lock_guard lock(store_mutex_);
  store_->compact(s);
}

ConnectionId Platform::connect(const std::string& participant_id, FrameSink sink) {
  std::lock_guard lock(conn_mutex_);
  const ConnectionId id = next_connection_++;
  connections_.emplace(id, Connection{ConnectionCtx{participant_id, std::nullopt, std::nullopt}, std::move(sink)});
  return id;
}

std::optional<ConnectionCtx> Platform::connection(ConnectionId id) const {
  std::lock_guard lock(conn_mutex_);
  auto it = connections_.find(id);
  if (it == connections_.end()) return std::nullopt;
  return it->second.ctx;
}

void Platform::send(ConnectionId id, const json& frame) {
  FrameSink sink;
  {
    std::lock_guard lock(conn_mutex_);
    auto it = connections_.find(id);
    if (it == connections_.end()) return;
    sink = it->second.sink;
  }
  if (sink) sink(frame);
}

void Platform::deliver(const std::string& slot_id, const std::vector<SessionEvent>& events) {
  std::array<std::optional<ConnectionId>, 2> seated;
  {
    std::lock_guard lock(conn_mutex_);
    auto it = seats_.find(slot_id);
    if (it == seats_.end()) return;
    seated = it->second;
  }
  for (const auto& e : events) {
    const auto audience = event_audience(e);
    const json frame = event_frame(e);
    for (Role r : {Role::DomainExpert, Role::Proponent})
      if ((!audience || *audience == r) && seated[seat(r)]) send(*seated[seat(r)], frame);
  }
}

std::shared_ptr<Platform::Live> Platform::live_for(const std::string& slot_id, bool create) {
  {
    std::lock_guard lock(live_mutex_);
    auto it = live_.find(slot_id);
    if (it != live_.end()) return it->second;
  }
  if (!create) return nullptr;

  std::shared_ptr<Live> fresh;
  {
    std::lock_guard lock(sched_mutex_);
    const SessionSlot* slot = scheduler_.slot(slot_id);
    if (!slot) throw Error(ErrorCode::NotFound, "unknown slot " + slot_id);
    const DeSession* session = scheduler_.session(slot->session_id);
    const Paper* paper = scheduler_.paper(session->paper_id);
    fresh = std::make_shared<Live>(Live{std::make_shared<SessionActor>(open_live_session(*slot, *session)), *paper});
  }
  std::lock_guard lock(live_mutex_);
  return live_.emplace(slot_id, std::move(fresh)).first->second;
}

std::pair<std::shared_ptr<Platform::Live>, Role> Platform::seat_of(ConnectionId id) const {
  std::optional<ConnectionCtx> ctx = connection(id);
  if (!ctx || !ctx->slot_id || !ctx->role) throw Error(ErrorCode::SessionNotActive, "join a slot first");
  std::lock_guard lock(live_mutex_);
  return {live_.at(*ctx->slot_id), *ctx->role};
}

void Platform::close_if_finalizable(LiveSession& s, Timestamp now) {
  if (s.is_closed() || !is_finalizable(s, now, config_.timing)) return;
  auto outcome = finalize(s, now, config_.timing);
  std::vector<StoreRecord> batch{put(s)};
  if (outcome.dialogue) {
    batch.push_back(put(*outcome.dialogue));
    std::lock_guard lock(corpus_mutex_);
    corpus_.push_back(*outcome.dialogue);
  }
  persist(std::move(batch));
  deliver(s.slot_id, outcome.events);
}

void Platform::handle_join(ConnectionId id, const std::string& slot_id) {
  {
    auto ctx = connection(id);
    if (!ctx) return;
    if (ctx->slot_id) throw Error(ErrorCode::AlreadyJoined, "this connection already joined " + *ctx->slot_id);
  }
  scheduler_command([](Scheduler& s) {
    if (s.phase() != StudyPhase::Dialogues) throw Error(ErrorCode::PhaseClosed, "dialogue sessions are not running");
  });
  auto live = live_for(slot_id, true);
  live->actor->with([&](LiveSession& s) {
    std::string participant;
    {
      std::lock_guard lock(conn_mutex_);
      participant = connections_.at(id).ctx.participant_id;
    }
    const Timestamp now = clock_();
    forge::tick(s, now, config_.timing);
    auto result = join_slot(s, participant, now, config_.timing);
    {
      std::lock_guard lock(conn_mutex_);
      auto& conn = connections_.at(id);
      conn.ctx.slot_id = slot_id;
      conn.ctx.role = result.role;
      seats_[slot_id][seat(result.role)] = id;
    }
    persist({put(s)});
    send(id, joined_frame(result.role, s, visible_paper(result.role, live->paper)));
    if (s.is_present(other(result.role))) send(id, presence_frame(true));
    deliver(slot_id, result.events);
  });
}

void Platform::handle_msg(ConnectionId id, const std::string& text, const std::vector<FactAnchor>& facts) {
  auto [live, role] = seat_of(id);
  live->actor->with([&, role = role, live = live](LiveSession& s) {
    const Timestamp now = clock_();
    forge::tick(s, now, config_.timing);
    auto posted = post_message(s, role, text, facts, live->paper, now);
    auto hint = issue_hint(s, now, config_.timing);
    persist({put(s)});
    deliver(s.slot_id, posted.events);
    if (hint) deliver(s.slot_id, {*hint});
  });
}

void Platform::handle_end(ConnectionId id) {
  auto [live, role] = seat_of(id);
  live->actor->with([&, role = role](LiveSession& s) {
    const Timestamp now = clock_();
    forge::tick(s, now, config_.timing);
    signal_end(s, role);
    persist({put(s)});
    close_if_finalizable(s, now);
  });
}

void Platform::receive(ConnectionId id, std::string_view frame) {
  try {
    auto f = parse_client_frame(frame);
    switch (f.kind) {
      case ClientFrame::Kind::Join: handle_join(id, f.slot); break;
      case ClientFrame::Kind::Msg: handle_msg(id, f.text, f.facts); break;
      case ClientFrame::Kind::End: handle_end(id); break;
    }
  } catch (const Error& e) {
    send(id, error_frame(e));
  }
}

void Platform::disconnect(ConnectionId id) {
  std::optional<ConnectionCtx> ctx;
  {
    std::lock_guard lock(conn_mutex_);
    auto it = connections_.find(id);
    if (it == connections_.end()) return;
    ctx = it->second.ctx;
    if (ctx->slot_id && ctx->role) {
      auto& seats = seats_[*ctx->slot_id];
      if (seats[seat(*ctx->role)] == id) seats[seat(*ctx->role)].reset();
    }
    connections_.erase(it);
  }
  if (!ctx->slot_id || !ctx->role) return;
  auto live = live_for(*ctx->slot_id, false);
  if (!live) return;
  live->actor->with([&](LiveSession& s) {
    auto events = leave_slot(s, *ctx->role, clock_());
    if (events.empty()) return;
    persist({put(s)});
    deliver(s.slot_id, events);
  });
}

void Platform::tick() {
  scheduler_command([](Scheduler&) {});
  std::vector<std::shared_ptr<Live>> lives;
  {
    std::lock_guard lock(live_mutex_);
    for (const auto& [id, l] : live_) lives.push_back(l);
  }
  for (const auto& l : lives) {
    l->actor->with([&](LiveSession& s) {
      if (s.is_closed()) return;
      const Timestamp now = clock_();
      const LiveSession before = s;
      forge::tick(s, now, config_.timing);
      auto hint = issue_hint(s, now, config_.timing);
      if (!(before == s)) persist({put(s)});
      if (hint) deliver(s.slot_id, {*hint});
      close_if_finalizable(s, now);
    });
  }
}

}  // namespace forge::gateway
