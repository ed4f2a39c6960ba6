#include "strideway/recording.hpp"

#include <array>
#include <fstream>
#include <iterator>

#include "strideway/errors.hpp"
#include "strideway/json_io.hpp"
#include "strideway/report.hpp"
#include "strideway/wire.hpp"

namespace strideway {

namespace {

constexpr std::array<const char*, 5> kStateNames{"idle", "countdown", "walking", "recall", "complete"};
constexpr std::array<const char*, 8> kEventNames{
    "state_change", "obstacle_spawn", "crossing_result", "sentence_start",
    "sentence_end", "cue",            "recall_submitted", "stream_gap"};

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw RecordingError(file.string(), 0, "cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& file, std::span<const std::uint8_t> bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + file.string());
}

}  // namespace

const char* to_string(SessionState s) { return kStateNames.at(static_cast<std::size_t>(s)); }

SessionState parse_session_state(const std::string& s) {
  for (std::size_t i = 0; i < kStateNames.size(); ++i) {
    if (s == kStateNames[i]) return static_cast<SessionState>(i);
  }
  throw ConfigError("state", "unknown session state '" + s + "'");
}

const char* to_string(EventKind k) { return kEventNames.at(static_cast<std::size_t>(k)); }

EventKind parse_event_kind(const std::string& s) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i) {
    if (s == kEventNames[i]) return static_cast<EventKind>(i);
  }
  throw ConfigError("kind", "unknown event kind '" + s + "'");
}

void save_recording(const std::filesystem::path& dir, const Recording& rec,
                    const SessionReport& report) {
  std::filesystem::create_directories(dir);

  nlohmann::ordered_json j;
  j["engine_version"] = rec.engine_version;
  j["config"] = config_to_json(rec.config);
  j["events"] = nlohmann::ordered_json::array();
  for (const SessionEvent& e : rec.events) j["events"].push_back(event_to_json(e));
  j["report"] = report_to_json(report);
  {
    std::ofstream out(dir / "session.json", std::ios::trunc);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write " + (dir / "session.json").string());
  }

  std::vector<std::uint8_t> bytes;
  if (!rec.frames.empty()) bytes.reserve(rec.frames.size() * encoded_frame_size(rec.frames[0].tile_count));
  for (const PressureFrame& f : rec.frames) encode_frame(f, bytes);
  write_bytes(dir / "frames.bin", bytes);

  bytes.clear();
  bytes.reserve(rec.poses.size() * kPoseRecordSize);
  for (const PoseSample& p : rec.poses) encode_pose(p, bytes);
  write_bytes(dir / "poses.bin", bytes);
}

Recording load_recording(const std::filesystem::path& dir) {
  Recording rec;

  const auto session_file = dir / "session.json";
  const std::vector<std::uint8_t> text = read_bytes(session_file);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw RecordingError(session_file.string(), e.byte > 0 ? e.byte - 1 : 0, "invalid JSON");
  }
  try {
    if (!j.is_object()) throw ConfigError("<root>", "expected an object");
    rec.engine_version = j.value("engine_version", std::string{});
    if (!j.contains("config")) throw ConfigError("config", "missing");
    rec.config = config_from_json(nlohmann::json(j["config"]));
    if (j.contains("events")) {
      if (!j["events"].is_array()) throw ConfigError("events", "expected an array");
      for (const auto& e : j["events"]) rec.events.push_back(event_from_json(e));
    }
  } catch (const ConfigError& e) {
    throw RecordingError(session_file.string(), 0, e.what());
  } catch (const nlohmann::json::exception& e) {
    throw RecordingError(session_file.string(), 0, e.what());
  }

  const auto frames_file = dir / "frames.bin";
  const std::vector<std::uint8_t> frame_bytes = read_bytes(frames_file);
  try {
    rec.frames = decode_frame_stream(frame_bytes);
  } catch (const WireError& e) {
    throw RecordingError(frames_file.string(), e.offset(), e.what());
  }
  const std::size_t frame_size = encoded_frame_size(rec.config.walkway.tile_count);
  for (std::size_t i = 0; i < rec.frames.size(); ++i) {
    const PressureFrame& f = rec.frames[i];
    if (f.tile_count != rec.config.walkway.tile_count) {
      throw RecordingError(frames_file.string(), i * frame_size,
                           "frame tile count does not match the session walkway");
    }
    if (i > 0 && f.timestamp_us <= rec.frames[i - 1].timestamp_us) {
      throw RecordingError(frames_file.string(), i * frame_size + 14, "frame timestamps not increasing");
    }
  }

  const auto poses_file = dir / "poses.bin";
  const std::vector<std::uint8_t> pose_bytes = read_bytes(poses_file);
  try {
    rec.poses = decode_pose_stream(pose_bytes);
  } catch (const WireError& e) {
    throw RecordingError(poses_file.string(), e.offset(), e.what());
  }
  for (std::size_t i = 1; i < rec.poses.size(); ++i) {
    if (rec.poses[i].pose.time < rec.poses[i - 1].pose.time) {
      throw RecordingError(poses_file.string(), i * kPoseRecordSize + 12, "pose timestamps not ordered");
    }
  }
  return rec;
}

}  // namespace strideway
