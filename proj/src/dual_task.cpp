#include "strideway/dual_task.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <random>
#include <set>

#include <json.hpp>

#include "strideway/errors.hpp"

namespace strideway {

std::vector<Sentence> parse_sentence_bank(std::istream& in) {
  std::vector<Sentence> bank;
  std::set<int> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string where = "sentences line " + std::to_string(line_no);
    Sentence s;
    try {
      const auto j = nlohmann::json::parse(line);
      s.id = j.at("id").get<int>();
      s.text = j.at("text").get<std::string>();
      s.numbers = j.at("numbers").get<std::vector<int>>();
      s.duration_s = j.value("duration_s", 3.0);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(where, e.what());
    }
    if (s.id < 1 || s.id > static_cast<int>(kSentenceBankSize)) {
      throw ConfigError(where, "id must be in [1, 45]");
    }
    if (!ids.insert(s.id).second) throw ConfigError(where, "duplicate id " + std::to_string(s.id));
    if (s.numbers.empty()) throw ConfigError(where, "sentence carries no numbers");
    if (!(s.duration_s > 0.0)) throw ConfigError(where, "duration_s must be positive");
    bank.push_back(std::move(s));
  }
  if (bank.size() != kSentenceBankSize) {
    throw ConfigError("sentences", "bank holds " + std::to_string(bank.size()) +
                                       " sentences, expected 45");
  }
  std::sort(bank.begin(), bank.end(), [](const Sentence& a, const Sentence& b) { return a.id < b.id; });
  return bank;
}

std::vector<Sentence> load_sentence_bank(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("sentences", "cannot open " + file.string());
  return parse_sentence_bank(in);
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("STRIDEWAY_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return STRIDEWAY_DATA_DIR;
}

std::vector<Sentence> load_default_sentence_bank() {
  return load_sentence_bank(default_data_dir() / "sentences.jsonl");
}

PlaybackSchedule schedule_sentences(std::span<const Sentence> bank, std::uint64_t seed, double walk_s) {
  if (bank.size() != kSentenceBankSize) {
    throw ConfigError("sentences", "bank holds " + std::to_string(bank.size()) +
                                       " sentences, expected 45");
  }
  std::mt19937_64 rng(seed);

  // Partial Fisher-Yates: the first 7 positions become a uniform sample.
  std::vector<std::size_t> order(bank.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = 0; i < kSentencesPerWalk; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }

  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  const double slot = walk_s / static_cast<double>(kSentencesPerWalk);
  PlaybackSchedule out;
  for (std::size_t k = 0; k < kSentencesPerWalk; ++k) {
    const Sentence& s = bank[order[k]];
    const double centre = static_cast<double>(k) * slot + slot / 2.0;
    const double start = centre - s.duration_s / 2.0 + jitter(rng);
    out.entries.push_back({s.id, std::clamp(start, 0.0, std::max(0.0, walk_s - s.duration_s)),
                           s.duration_s});
  }

  auto& e = out.entries;
  for (std::size_t k = 1; k < e.size(); ++k) e[k].start_s = std::max(e[k].start_s, e[k - 1].end_s());
  for (std::size_t k = e.size(); k-- > 0;) {
    const double limit = k + 1 < e.size() ? e[k + 1].start_s : walk_s;
    e[k].start_s = std::min(e[k].start_s, limit - e[k].duration_s);
  }
  if (e.front().start_s < 0.0) {
    throw ConfigError("sentences", "seven sentences do not fit in the walk");
  }
  return out;
}

std::optional<RecallScore> score_recall(std::span<const int> presented, std::span<const int> reported) {
  if (presented.empty()) return std::nullopt;
  std::map<int, int> remaining;
  for (const int v : presented) ++remaining[v];
  RecallScore r;
  r.total = static_cast<int>(presented.size());
  for (const int v : reported) {
    auto it = remaining.find(v);
    if (it != remaining.end() && it->second > 0) {
      --it->second;
      ++r.correct;
    }
  }
  for (std::size_t i = 0; i < std::min(presented.size(), reported.size()); ++i) {
    if (presented[i] == reported[i]) ++r.in_order;
  }
  r.accuracy = static_cast<double>(r.correct) / r.total;
  return r;
}

std::optional<double> dual_task_cost(double single_value, double dual_value) {
  if (!(single_value > 0.0)) return std::nullopt;
  return (single_value - dual_value) / single_value * 100.0;
}

SoundMetadata sound_metadata(SoundLevel level) {
  return level == SoundLevel::quiet ? SoundMetadata{4, 1, 1} : SoundMetadata{16, 2, 2};
}

VisualMetadata visual_metadata(VisualLoad load) {
  return load == VisualLoad::empty ? VisualMetadata{0, 0.0} : VisualMetadata{40, 1.4};
}

const char* to_string(SoundLevel s) { return s == SoundLevel::quiet ? "quiet" : "busy"; }
const char* to_string(VisualLoad v) { return v == VisualLoad::empty ? "empty" : "busy"; }

SoundLevel parse_sound_level(const std::string& s) {
  if (s == "quiet") return SoundLevel::quiet;
  if (s == "busy") return SoundLevel::busy;
  throw ConfigError("condition.sound", "expected quiet or busy, got '" + s + "'");
}

VisualLoad parse_visual_load(const std::string& s) {
  if (s == "empty") return VisualLoad::empty;
  if (s == "busy") return VisualLoad::busy;
  throw ConfigError("condition.visual", "expected empty or busy, got '" + s + "'");
}

}  // namespace strideway
