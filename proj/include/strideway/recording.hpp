#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "strideway/config.hpp"
#include "strideway/pose.hpp"
#include "strideway/walkway.hpp"

namespace strideway {

inline constexpr const char* kEngineVersion = "strideway 0.1.0";

enum class SessionState : std::uint8_t { idle, countdown, walking, recall, complete };

const char* to_string(SessionState s);
SessionState parse_session_state(const std::string& s);

enum class EventKind : std::uint8_t {
  state_change,
  obstacle_spawn,
  crossing_result,
  sentence_start,
  sentence_end,
  cue,
  recall_submitted,
  stream_gap,
};

const char* to_string(EventKind k);
EventKind parse_event_kind(const std::string& s);

/// `time` is seconds since walking onset. Pre-walk events are stamped 0 and
/// the post-walk recall submission carries the walk end time.
struct SessionEvent {
  double time = 0.0;
  EventKind kind = EventKind::state_change;
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

/// Everything a session observed. Reports are a pure function of this.
struct Recording {
  std::string engine_version = kEngineVersion;
  SessionConfig config;
  std::vector<SessionEvent> events;
  std::vector<PressureFrame> frames;
  std::vector<PoseSample> poses;  // time-ordered, all three streams interleaved
};

struct SessionReport;

/// Writes session.json (config, events, report), frames.bin (concatenated
/// PWK1 frames) and poses.bin (concatenated PWP1 records) into `dir`.
void save_recording(const std::filesystem::path& dir, const Recording& rec,
                    const SessionReport& report);

/// Throws RecordingError naming the file and byte offset on corrupt input.
Recording load_recording(const std::filesystem::path& dir);

}  // namespace strideway
