#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "strideway/config.hpp"
#include "strideway/dual_task.hpp"
#include "strideway/gait.hpp"
#include "strideway/obstacle.hpp"
#include "strideway/recording.hpp"

namespace strideway {

struct ArtStats {
  std::optional<double> mean;
  std::optional<double> min;
  std::optional<double> head_mean;
  std::vector<std::optional<double>> per_trial;  // parallel to SessionReport::trials
};

struct RecallReport {
  std::vector<int> presented;
  std::vector<int> reported;
  RecallScore score;
};

struct CostRow {
  std::string metric;
  bool higher_is_better = true;
  std::optional<double> baseline;
  std::optional<double> value;
  std::optional<double> cost_percent;  // positive = worse than baseline
};

struct CostTable {
  std::string baseline_participant;
  std::uint64_t baseline_seed = 0;
  std::vector<CostRow> rows;
  std::vector<std::string> warnings;
};

struct SessionReport {
  std::string engine_version;
  SessionConfig config;
  bool complete = false;
  bool aborted = false;
  double walk_duration_s = 0.0;
  std::size_t frame_count = 0;

  GaitSummary gait;
  std::optional<double> left_share_mean;         // force distribution between feet
  std::optional<double> single_support_force_g;  // median total force, one foot loaded
  std::optional<HeadKinematics> head;

  std::vector<TrialResult> trials;
  std::optional<double> success_rate;
  ArtStats art;
  std::optional<RecallReport> recall;
  std::optional<CostTable> dual_task_costs;
  std::vector<std::string> flags;
};

/// Pure function of the recording; identical input gives identical bytes from
/// report_json(). With a baseline the dual-task cost table is attached.
SessionReport compute_report(const Recording& rec, const SessionReport* baseline = nullptr);

/// Per-metric dual-task cost of `loaded` relative to `baseline`. Rows whose
/// metric is missing on either side are kept with an empty cost.
CostTable compare_sessions(const SessionReport& baseline, const SessionReport& loaded);

nlohmann::ordered_json report_to_json(const SessionReport& report);
std::string report_json(const SessionReport& report);
/// Short operator-facing text.
std::string report_summary(const SessionReport& report);

}  // namespace strideway
