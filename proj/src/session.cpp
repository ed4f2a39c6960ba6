#include "strideway/session.hpp"

#include <algorithm>
#include <cmath>

#include "strideway/errors.hpp"
#include "strideway/wire.hpp"

namespace strideway {

namespace {

constexpr double kGapThresholdS = 0.5;
constexpr double kSpeedWindowS = 1.0;
constexpr double kStepForceG = 2000.0;

bool legal_edge(SessionState from, SessionState to) {
  using S = SessionState;
  switch (from) {
    case S::idle: return to == S::countdown;
    case S::countdown: return to == S::walking || to == S::complete;
    case S::walking: return to == S::recall || to == S::complete;
    case S::recall: return to == S::complete;
    case S::complete: return false;
  }
  return false;
}

const char* stream_name(PoseStream s) {
  switch (s) {
    case PoseStream::head: return "head";
    case PoseStream::left_foot: return "left_foot";
    case PoseStream::right_foot: return "right_foot";
  }
  return "?";
}

}  // namespace

bool SessionStateMachine::can_transition(SessionState to) const {
  if (std::find(history_.begin(), history_.end(), to) != history_.end()) return false;
  return legal_edge(state_, to);
}

void SessionStateMachine::transition(SessionState to) {
  if (!can_transition(to)) {
    throw SessionError(std::string("cannot go from ") + to_string(state_) + " to " + to_string(to));
  }
  state_ = to;
  history_.push_back(to);
}

Session::Session(SessionConfig config, std::vector<Sentence> bank, SessionOptions options)
    : options_(options), bank_(std::move(bank)) {
  config.validate();
  rec_.config = std::move(config);
  obstacles_ = obstacle_schedule(rec_.config);
  for (const ObstacleSpec& spec : obstacles_) monitors_.emplace_back(spec);
  spawned_.assign(obstacles_.size(), false);
  resolved_.assign(obstacles_.size(), false);
  if (rec_.config.condition.cognitive) {
    if (bank_.empty()) throw ConfigError("condition.cognitive", "requires a sentence bank");
    schedule_ = sentence_schedule(rec_.config, bank_);
  }
}

void Session::emit(double time, EventKind kind, nlohmann::ordered_json payload) {
  SessionEvent e{time, kind, std::move(payload)};
  rec_.events.push_back(e);
  if (listener_) listener_(e);
}

void Session::change_state(SessionState to, double time, nlohmann::ordered_json extra) {
  const SessionState from = fsm_.state();
  fsm_.transition(to);
  nlohmann::ordered_json payload{{"from", to_string(from)}, {"to", to_string(to)}};
  if (extra.is_object()) {
    for (auto& [k, v] : extra.items()) payload[k] = v;
  }
  emit(time, EventKind::state_change, std::move(payload));
}

void Session::start() { change_state(SessionState::countdown, 0.0, {{"countdown_s", rec_.config.countdown_s}}); }

void Session::begin_walking() {
  change_state(SessionState::walking, 0.0, {{"duration_s", rec_.config.duration_s}});
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    const ObstacleSpec& spec = obstacles_[i];
    if (spec.mode != ObstacleMode::anticipated) continue;
    spawned_[i] = true;
    emit(0.0, EventKind::obstacle_spawn,
         {{"obstacle_id", spec.id},
          {"x_position_m", spec.x_position},
          {"height_mm", spec.height.mm()},
          {"mode", to_string(spec.mode)}});
  }
}

bool Session::accept_time(const char* stream, std::uint32_t seq, double t,
                          std::optional<std::uint32_t>& last_seq, std::optional<double>& last_t) {
  if (last_seq && (seq <= *last_seq || t <= *last_t)) {
    emit(now_, EventKind::stream_gap,
         {{"stream", stream}, {"reason", "out_of_order"}, {"seq", seq}, {"last_seq", *last_seq}});
    return false;
  }
  if (last_seq && seq > *last_seq + 1) {
    emit(t, EventKind::stream_gap,
         {{"stream", stream},
          {"reason", "missing_samples"},
          {"from_seq", *last_seq},
          {"to_seq", seq},
          {"missing", seq - *last_seq - 1}});
  }
  if (last_t && t - *last_t > kGapThresholdS) {
    emit(t, EventKind::stream_gap,
         {{"stream", stream}, {"reason", "time_gap"}, {"from_time", *last_t}, {"gap_s", t - *last_t}});
  }
  last_seq = seq;
  last_t = t;
  return true;
}

bool Session::ingest(const PressureFrame& frame) {
  if (state() != SessionState::walking) return false;
  const double t = frame.time_s();
  if (frame_time_ && t <= *frame_time_) {
    accept_time("frames", frame.seq, t, frame_seq_, frame_time_);
    return false;
  }
  advance(t);
  if (state() != SessionState::walking) return false;
  validate_frame(frame, rec_.config.walkway);
  if (!accept_time("frames", frame.seq, t, frame_seq_, frame_time_)) return false;
  now_ = std::max(now_, t);
  rec_.frames.push_back(frame);

  if (options_.live_metrics) {
    const std::vector<FootCluster> clusters = frame_clusters(frame, rec_.config.walkway);
    live_cof_ = center_of_force(clusters);
    live_tracker_.update(t, clusters);
    double left = 0.0;
    double right = 0.0;
    for (const FootTrack& track : live_tracker_.tracks()) {
      if (!track.open || track.samples.empty() || track.samples.back().time != t) continue;
      if (track.side == Side::left) left += track.samples.back().total_force_g;
      if (track.side == Side::right) right += track.samples.back().total_force_g;
    }
    live_share_ = force_distribution(left, right);
  }
  return true;
}

bool Session::ingest(const PoseSample& sample) {
  if (state() != SessionState::walking) return false;
  PoseSample p = sample;
  p.pose.time = from_timestamp_us(to_timestamp_us(p.pose.time));
  const double t = p.pose.time;
  if (last_pose_time_ && t < *last_pose_time_) {
    emit(now_, EventKind::stream_gap,
         {{"stream", stream_name(p.stream)}, {"reason", "out_of_order"}, {"seq", p.seq}});
    return false;
  }
  advance(t);
  if (state() != SessionState::walking) return false;
  if (!accept_time(stream_name(p.stream), p.seq, t, pose_seq_[p.stream], pose_time_[p.stream])) {
    return false;
  }
  last_pose_time_ = t;
  now_ = std::max(now_, t);
  rec_.poses.push_back(p);

  if (p.stream != PoseStream::head) {
    const double front = FootBox{}.x_extent(p.pose)[1];
    front_x_ = front_x_ ? std::max(*front_x_, front) : front;
    for (std::size_t i = 0; i < obstacles_.size(); ++i) {
      if (!spawned_[i] && spawn_due(obstacles_[i], *front_x_)) spawn(i, t);
    }
  } else {
    recent_head_.push_back(p.pose);
    while (recent_head_.size() > 2 && t - recent_head_[1].time >= kSpeedWindowS) recent_head_.pop_front();
  }

  for (std::size_t i = 0; i < monitors_.size(); ++i) {
    CrossingMonitor& m = monitors_[i];
    if (auto cue = m.observe(p); cue && spawned_[i]) {
      emit(cue->time, EventKind::cue,
           {{"obstacle_id", cue->obstacle_id}, {"outcome", cue->success ? "success" : "failure"}});
    }
    if (!resolved_[i] && m.resolved()) {
      resolved_[i] = true;
      const TrialResult r = m.result();
      r.success ? ++cleared_ : ++failed_;
      if (r.lead_clearance && r.trail_clearance) {
        last_clearance_ = std::min(*r.lead_clearance, *r.trail_clearance);
      }
      nlohmann::ordered_json payload{{"obstacle_id", r.obstacle_id}, {"success", r.success}};
      payload["lead_foot"] = r.lead_foot ? nlohmann::ordered_json(to_string(*r.lead_foot)) : nullptr;
      payload["lead_clearance_m"] = r.lead_clearance ? nlohmann::ordered_json(*r.lead_clearance) : nullptr;
      payload["trail_clearance_m"] = r.trail_clearance ? nlohmann::ordered_json(*r.trail_clearance) : nullptr;
      payload["art_s"] = r.art ? nlohmann::ordered_json(*r.art) : nullptr;
      emit(t, EventKind::crossing_result, std::move(payload));
    }
  }
  return true;
}

void Session::advance_sentences(double t) {
  const auto& entries = schedule_.entries;
  const double limit = walk_end_.value_or(rec_.config.duration_s);
  for (;;) {
    const bool can_end = next_end_ < next_start_ && entries[next_end_].end_s() <= t;
    const bool can_start = next_start_ < entries.size() && entries[next_start_].start_s <= t &&
                           entries[next_start_].start_s < limit;
    if (can_end && (!can_start || entries[next_end_].end_s() <= entries[next_start_].start_s)) {
      const ScheduledSentence& s = entries[next_end_++];
      emit(s.end_s(), EventKind::sentence_end, {{"sentence_id", s.sentence_id}, {"truncated", false}});
    } else if (can_start) {
      const ScheduledSentence& s = entries[next_start_++];
      const auto it = std::find_if(bank_.begin(), bank_.end(),
                                   [&](const Sentence& b) { return b.id == s.sentence_id; });
      nlohmann::ordered_json payload{{"sentence_id", s.sentence_id}};
      payload["text"] = it != bank_.end() ? it->text : std::string{};
      payload["numbers"] = it != bank_.end() ? it->numbers : std::vector<int>{};
      payload["duration_s"] = s.duration_s;
      emit(s.start_s, EventKind::sentence_start, std::move(payload));
    } else {
      break;
    }
  }
}

void Session::close_sentences(double t) {
  while (next_end_ < next_start_) {
    const ScheduledSentence& s = schedule_.entries[next_end_++];
    emit(t, EventKind::sentence_end, {{"sentence_id", s.sentence_id}, {"truncated", true}});
  }
}

void Session::advance(double t) {
  if (state() != SessionState::walking) return;
  const double duration = rec_.config.duration_s;
  advance_sentences(std::min(t, duration));
  if (t >= duration) end_walking(duration);
}

void Session::end_walking(double t) {
  if (state() != SessionState::walking) throw SessionError("session is not walking");
  t = std::max(t, now_);
  advance_sentences(t);
  walk_end_ = t;
  close_sentences(t);
  now_ = t;
  if (rec_.config.condition.cognitive) {
    change_state(SessionState::recall, t);
  } else {
    change_state(SessionState::complete, t);
    finish();
  }
}

void Session::abort(double t) {
  const SessionState s = state();
  if (s == SessionState::idle || s == SessionState::complete) {
    throw SessionError(std::string("nothing to abort in state ") + to_string(s));
  }
  t = std::max(t, now_);
  if (s == SessionState::walking) {
    walk_end_ = t;
    close_sentences(t);
  }
  now_ = t;
  change_state(SessionState::complete, t, {{"aborted", true}});
  finish();
}

void Session::submit_recall(std::vector<int> numbers) {
  if (state() != SessionState::recall) throw SessionError("recall is only accepted after the walk");
  const double t = walk_end_.value_or(now_);
  emit(t, EventKind::recall_submitted, {{"numbers", numbers}});
  change_state(SessionState::complete, t);
  finish();
}

void Session::spawn(std::size_t i, double t) {
  spawned_[i] = true;
  obstacles_[i].spawn_time = t;
  monitors_[i].set_spawn_time(t);
  nlohmann::ordered_json payload{{"obstacle_id", obstacles_[i].id},
                                 {"x_position_m", obstacles_[i].x_position},
                                 {"height_mm", obstacles_[i].height.mm()},
                                 {"mode", to_string(obstacles_[i].mode)}};
  if (obstacles_[i].spawn_distance) payload["spawn_distance_m"] = *obstacles_[i].spawn_distance;
  emit(t, EventKind::obstacle_spawn, std::move(payload));
}

int Session::spawn_now() {
  if (state() != SessionState::walking) throw SessionError("obstacles spawn only while walking");
  if (rec_.config.obstacle.mode != ObstacleMode::unanticipated) {
    throw SessionError("manual spawn needs unanticipated obstacles");
  }
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    if (spawned_[i]) continue;
    if (front_x_ && obstacles_[i].x_position <= *front_x_) continue;
    spawn(i, now_);
    return obstacles_[i].id;
  }
  throw SessionError("no pending obstacle ahead of the walker");
}

std::vector<int> Session::presented_numbers() const {
  std::vector<int> out;
  for (const SessionEvent& e : rec_.events) {
    if (e.kind != EventKind::sentence_start) continue;
    for (const auto& n : e.payload["numbers"]) out.push_back(n.get<int>());
  }
  return out;
}

LiveMetrics Session::live_metrics() const {
  LiveMetrics m;
  m.time = now_;
  m.state = state();
  std::size_t loaded = 0;
  for (const FootTrack& track : live_tracker_.tracks()) {
    if (track.peak_cluster.total_force_g >= kStepForceG) ++loaded;
  }
  m.step_count = loaded > 0 ? loaded - 1 : 0;
  if (recent_head_.size() >= 2) {
    const Pose& a = recent_head_.front();
    const Pose& b = recent_head_.back();
    if (b.time - a.time >= kSpeedWindowS / 2) m.speed_mps = (b.position.x - a.position.x) / (b.time - a.time);
  }
  m.cof = live_cof_;
  m.left_share = live_share_;
  m.obstacles_cleared = cleared_;
  m.obstacles_failed = failed_;
  m.last_clearance_m = last_clearance_;
  return m;
}

void Session::finish() { report_ = compute_report(rec_); }

}  // namespace strideway
