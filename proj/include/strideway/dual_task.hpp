#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace strideway {

struct Sentence {
  int id = 0;  // 1..45
  std::string text;
  std::vector<int> numbers;
  double duration_s = 3.0;
};

inline constexpr std::size_t kSentenceBankSize = 45;
inline constexpr std::size_t kSentencesPerWalk = 7;

/// Reads a line-delimited bank: one JSON object per line with keys id, text,
/// numbers and optional duration_s. Blank lines and lines starting with '#'
/// are skipped. Throws ConfigError naming the line on malformed input and
/// when the bank is not exactly 45 unique ids in [1, 45].
std::vector<Sentence> parse_sentence_bank(std::istream& in);
std::vector<Sentence> load_sentence_bank(const std::filesystem::path& file);

/// $STRIDEWAY_DATA_DIR when set, else the data directory of the source tree.
std::filesystem::path default_data_dir();
std::vector<Sentence> load_default_sentence_bank();

struct ScheduledSentence {
  int sentence_id = 0;
  double start_s = 0.0;
  double duration_s = 0.0;

  double end_s() const { return start_s + duration_s; }
  friend bool operator==(const ScheduledSentence&, const ScheduledSentence&) = default;
};

struct PlaybackSchedule {
  std::vector<ScheduledSentence> entries;  // ordered by start time

  friend bool operator==(const PlaybackSchedule&, const PlaybackSchedule&) = default;
};

/// Seven distinct sentences drawn without replacement, one per slot of
/// walk_s/7, centred on the slot with ±1 s jitter and clamped so playbacks are
/// disjoint and inside [0, walk_s].
PlaybackSchedule schedule_sentences(std::span<const Sentence> bank, std::uint64_t seed,
                                    double walk_s = 60.0);

struct RecallScore {
  int correct = 0;  // size of the multiset intersection
  int total = 0;
  double accuracy = 0.0;
  int in_order = 0;  // positional matches, secondary statistic
};

std::optional<RecallScore> score_recall(std::span<const int> presented, std::span<const int> reported);

/// (single − dual) / single · 100. Empty when single ≤ 0.
std::optional<double> dual_task_cost(double single_value, double dual_value);

enum class SoundLevel : std::uint8_t { quiet, busy };
enum class VisualLoad : std::uint8_t { empty, busy };

struct SoundMetadata {
  int source_count = 0;
  int loudness_tier = 0;
  int spectral_tier = 0;
};

struct VisualMetadata {
  int avatar_count = 0;
  double avatar_speed_mps = 0.0;
};

SoundMetadata sound_metadata(SoundLevel level);
VisualMetadata visual_metadata(VisualLoad load);

const char* to_string(SoundLevel s);
const char* to_string(VisualLoad v);
SoundLevel parse_sound_level(const std::string& s);
VisualLoad parse_visual_load(const std::string& s);

struct LoadCondition {
  SoundLevel sound = SoundLevel::quiet;
  VisualLoad visual = VisualLoad::empty;
  bool cognitive = false;

  friend bool operator==(const LoadCondition&, const LoadCondition&) = default;
};

}  // namespace strideway
