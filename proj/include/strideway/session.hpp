#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "strideway/config.hpp"
#include "strideway/dual_task.hpp"
#include "strideway/obstacle.hpp"
#include "strideway/pressure.hpp"
#include "strideway/recording.hpp"
#include "strideway/report.hpp"

namespace strideway {

/// A command that is not legal in the current session state.
class SessionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Idle → Countdown → Walking → [Recall] → Complete. Abort jumps to Complete
/// from any running state; no state is entered twice.
class SessionStateMachine {
public:
  SessionState state() const { return state_; }
  bool can_transition(SessionState to) const;
  /// Throws SessionError on an illegal edge.
  void transition(SessionState to);
  const std::vector<SessionState>& history() const { return history_; }

private:
  SessionState state_ = SessionState::idle;
  std::vector<SessionState> history_{SessionState::idle};
};

struct LiveMetrics {
  double time = 0.0;
  SessionState state = SessionState::idle;
  std::size_t step_count = 0;
  std::optional<double> speed_mps;  // head progression over the last second
  std::optional<Vec2> cof;
  std::optional<double> left_share;
  int obstacles_cleared = 0;
  int obstacles_failed = 0;
  std::optional<double> last_clearance_m;
};

struct SessionOptions {
  /// Track feet frame by frame for LiveMetrics. Reports never depend on it.
  bool live_metrics = true;
};

/// Drives one session over time-stamped samples. Times are seconds since
/// walking onset. Every observation is appended to the recording; the report
/// is computed from the recording once the session completes.
class Session {
public:
  using Listener = std::function<void(const SessionEvent&)>;

  /// `bank` is required when the condition is cognitive.
  explicit Session(SessionConfig config, std::vector<Sentence> bank = {}, SessionOptions options = {});

  void set_listener(Listener listener) { listener_ = std::move(listener); }

  SessionState state() const { return fsm_.state(); }
  const SessionConfig& config() const { return rec_.config; }
  const std::vector<ObstacleSpec>& obstacles() const { return obstacles_; }
  const PlaybackSchedule& sentences() const { return schedule_; }
  double now() const { return now_; }

  void start();
  void begin_walking();

  /// Returns false when the sample was not recorded (session not walking,
  /// past the duration, or out of order, the latter logged as a stream gap).
  /// Throws on frames that do not match the walkway geometry.
  bool ingest(const PressureFrame& frame);
  bool ingest(const PoseSample& pose);

  /// Emits sentence events due by `t`; ends walking once `t` reaches the
  /// configured duration.
  void advance(double t);
  void end_walking(double t);
  void abort(double t);
  void submit_recall(std::vector<int> numbers);
  /// Operator-triggered appearance of the next pending unanticipated obstacle
  /// ahead of the walker. Returns its id.
  int spawn_now();

  /// Numbers of every sentence that started playing so far.
  std::vector<int> presented_numbers() const;
  LiveMetrics live_metrics() const;

  const Recording& recording() const { return rec_; }
  Recording take_recording() { return std::move(rec_); }
  const std::optional<SessionReport>& report() const { return report_; }

private:
  void emit(double time, EventKind kind, nlohmann::ordered_json payload);
  void change_state(SessionState to, double time, nlohmann::ordered_json extra = {});
  void advance_sentences(double t);
  void close_sentences(double t);
  bool accept_time(const char* stream, std::uint32_t seq, double t, std::optional<std::uint32_t>& last_seq,
                   std::optional<double>& last_t);
  void finish();
  void spawn(std::size_t index, double t);

  SessionOptions options_;
  SessionStateMachine fsm_;
  Recording rec_;
  std::vector<Sentence> bank_;
  std::vector<ObstacleSpec> obstacles_;
  std::vector<CrossingMonitor> monitors_;
  std::vector<bool> spawned_;
  std::vector<bool> resolved_;
  PlaybackSchedule schedule_;
  std::size_t next_start_ = 0;
  std::size_t next_end_ = 0;
  double now_ = 0.0;
  std::optional<double> walk_end_;
  Listener listener_;
  std::optional<SessionReport> report_;

  std::optional<std::uint32_t> frame_seq_;
  std::optional<double> frame_time_;
  std::map<PoseStream, std::optional<std::uint32_t>> pose_seq_;
  std::map<PoseStream, std::optional<double>> pose_time_;
  std::optional<double> last_pose_time_;

  FootTracker live_tracker_;
  std::optional<Vec2> live_cof_;
  std::optional<double> live_share_;
  std::deque<Pose> recent_head_;
  std::optional<double> front_x_;  // furthest foot-box front so far
  int cleared_ = 0;
  int failed_ = 0;
  std::optional<double> last_clearance_;
};

}  // namespace strideway
