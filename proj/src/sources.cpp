#include "strideway/sources.hpp"

#include <cmath>

namespace strideway {

double item_time(const StreamItem& item) {
  return std::visit(
      [](const auto& v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, PressureFrame>) {
          return v.time_s();
        } else {
          return v.pose.time;
        }
      },
      item);
}

namespace {

template <class Frames, class Poses>
std::optional<StreamItem> merge_next(const Frames& frames, const Poses& poses, std::size_t& f,
                                     std::size_t& p) {
  const bool have_frame = f < frames.size();
  const bool have_pose = p < poses.size();
  if (!have_frame && !have_pose) return std::nullopt;
  if (have_frame && (!have_pose || frames[f].time_s() <= poses[p].pose.time)) {
    return StreamItem(frames[f++]);
  }
  return StreamItem(poses[p++]);
}

}  // namespace

SimulatedSource::SimulatedSource(SimulationOutput output) : out_(std::move(output)) {}

std::optional<StreamItem> SimulatedSource::next() { return merge_next(out_.frames, out_.poses, frame_, pose_); }

ReplaySource::ReplaySource(Recording rec) : rec_(std::move(rec)) {
  end_ = rec_.config.duration_s;
  for (const SessionEvent& e : rec_.events) {
    if (e.kind == EventKind::state_change && e.payload.value("from", "") == "walking") {
      end_ = e.time;
      if (e.payload.value("aborted", false)) abort_ = e.time;
    } else if (e.kind == EventKind::state_change && e.payload.value("aborted", false)) {
      abort_ = e.time;
    } else if (e.kind == EventKind::recall_submitted) {
      recall_ = e.payload.value("numbers", std::vector<int>{});
    }
  }
}

std::optional<StreamItem> ReplaySource::next() { return merge_next(rec_.frames, rec_.poses, frame_, pose_); }

bool feed(Session& session, const StreamItem& item) {
  return std::visit([&](const auto& v) { return session.ingest(v); }, item);
}

std::vector<int> partial_recall(std::span<const int> presented, double fraction) {
  const auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(presented.size())));
  return {presented.begin(), presented.begin() + static_cast<std::ptrdiff_t>(std::min(n, presented.size()))};
}

SimulationOutput simulate_session(const SessionConfig& config, const ScenarioFile& scenario,
                                  std::span<const Sentence> bank) {
  WalkerParams params = scenario.walker;
  if (scenario.apply_load_modifiers) params = apply_load_modifiers(params, config.condition);
  PlaybackSchedule sentences;
  const PlaybackSchedule* schedule = nullptr;
  if (config.condition.cognitive && !bank.empty()) {
    sentences = sentence_schedule(config, bank);
    schedule = &sentences;
  }
  return simulate(params, scenario.scenario, config, schedule);
}

RunResult run_session(const SessionConfig& config, InputSource& source, std::vector<Sentence> bank,
                      const RunOptions& options) {
  Session session(config, std::move(bank), options.session);
  if (options.listener) session.set_listener(options.listener);
  session.start();
  session.begin_walking();

  std::optional<double> abort_at = options.abort_at;
  if (!abort_at) abort_at = source.abort_time();

  while (session.state() == SessionState::walking) {
    auto item = source.next();
    if (!item) break;
    if (abort_at && item_time(*item) > *abort_at) break;
    feed(session, *item);
  }
  const double end = std::min(source.end_time(), config.duration_s);
  if (session.state() == SessionState::walking && !(abort_at && *abort_at <= end)) {
    session.end_walking(end);
  }
  if (abort_at && session.state() != SessionState::complete) session.abort(*abort_at);
  if (session.state() == SessionState::recall) {
    const std::vector<int> presented = session.presented_numbers();
    if (options.recall) {
      session.submit_recall(options.recall(presented));
    } else if (auto recorded = source.recorded_recall()) {
      session.submit_recall(*recorded);
    } else {
      session.submit_recall(presented);
    }
  }
  SessionReport report = *session.report();
  return {session.take_recording(), std::move(report)};
}

}  // namespace strideway
