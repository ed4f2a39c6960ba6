#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "strideway/json_io.hpp"
#include "strideway/recording.hpp"
#include "strideway/report.hpp"
#include "strideway/session.hpp"
#include "strideway/simulator.hpp"

namespace strideway {

using StreamItem = std::variant<PressureFrame, PoseSample>;

double item_time(const StreamItem& item);

/// Time-ordered producer of frames and poses.
class InputSource {
public:
  virtual ~InputSource() = default;
  virtual std::optional<StreamItem> next() = 0;
  /// When the walk ends if the stream runs dry before the configured duration.
  virtual double end_time() const = 0;
  virtual std::optional<double> abort_time() const { return std::nullopt; }
  virtual std::optional<std::vector<int>> recorded_recall() const { return std::nullopt; }
};

/// Merges simulator frames and poses by time, frames first on ties.
class SimulatedSource final : public InputSource {
public:
  explicit SimulatedSource(SimulationOutput output);
  std::optional<StreamItem> next() override;
  double end_time() const override { return out_.end_time; }
  const SimulationOutput& output() const { return out_; }

private:
  SimulationOutput out_;
  std::size_t frame_ = 0;
  std::size_t pose_ = 0;
};

/// Plays a recording back, reproducing its abort and recall submission.
class ReplaySource final : public InputSource {
public:
  explicit ReplaySource(Recording rec);
  std::optional<StreamItem> next() override;
  double end_time() const override { return end_; }
  std::optional<double> abort_time() const override { return abort_; }
  std::optional<std::vector<int>> recorded_recall() const override { return recall_; }
  const Recording& recording() const { return rec_; }

private:
  Recording rec_;
  std::size_t frame_ = 0;
  std::size_t pose_ = 0;
  double end_ = 0.0;
  std::optional<double> abort_;
  std::optional<std::vector<int>> recall_;
};

/// Feeds one item to the session.
bool feed(Session& session, const StreamItem& item);

/// Simulated participant answering the recall prompt: reports the first
/// round(fraction · n) presented numbers.
std::vector<int> partial_recall(std::span<const int> presented, double fraction);

/// Runs the walker of `scenario` through `config`. Load modifiers are applied
/// unless disabled; the dual-task slowdown follows the session's sentences.
SimulationOutput simulate_session(const SessionConfig& config, const ScenarioFile& scenario,
                                  std::span<const Sentence> bank);

struct RunOptions {
  std::optional<double> abort_at;
  std::function<std::vector<int>(std::span<const int>)> recall;
  Session::Listener listener;
  SessionOptions session;
};

struct RunResult {
  Recording recording;
  SessionReport report;
};

/// Runs a whole session as fast as the source produces data.
RunResult run_session(const SessionConfig& config, InputSource& source, std::vector<Sentence> bank,
                      const RunOptions& options = {});

}  // namespace strideway
