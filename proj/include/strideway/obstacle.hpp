#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <span>
#include <vector>

#include "strideway/pose.hpp"
#include "strideway/walkway.hpp"

namespace strideway {

inline constexpr std::array<int, 7> kLegalHeightsMm{25, 50, 75, 100, 125, 150, 190};

bool is_legal_height(int mm);

/// Obstacle height restricted to the clinical set. Construct via from_mm().
class ObstacleHeight {
public:
  /// Throws ConfigError("obstacle.height_mm", ...) for values outside the set.
  static ObstacleHeight from_mm(int mm);

  int mm() const { return mm_; }
  double meters() const { return mm_ / 1000.0; }

  friend bool operator==(const ObstacleHeight&, const ObstacleHeight&) = default;

private:
  explicit ObstacleHeight(int mm) : mm_(mm) {}
  int mm_;
};

enum class ObstacleMode : std::uint8_t { anticipated, unanticipated };

const char* to_string(ObstacleMode m);
/// Throws ConfigError for anything but "anticipated" / "unanticipated".
ObstacleMode parse_obstacle_mode(const std::string& s);

struct ObstacleSpec {
  int id = 0;
  double x_position = 0.0;  // leading edge, walkway meters
  ObstacleHeight height = ObstacleHeight::from_mm(100);
  double depth = 0.10;
  ObstacleMode mode = ObstacleMode::anticipated;
  /// 0 for anticipated obstacles; set at runtime for unanticipated ones.
  std::optional<double> spawn_time;
  /// Unanticipated only: the obstacle appears once the leading foot-box front
  /// is this far from the leading edge.
  std::optional<double> spawn_distance;
};

struct ScheduleConfig {
  double first_position_m = 2.0;
  double spacing_m = 2.0;
  double spawn_distance_min_m = 1.5;
  double spawn_distance_max_m = 3.0;
  double depth_m = 0.10;
};

/// Obstacles at first + k·spacing along the lane. Unanticipated obstacles get
/// a per-obstacle spawn distance drawn from the seed. Throws ConfigError when
/// the height is illegal, count < 1 or the obstacles do not fit.
std::vector<ObstacleSpec> make_schedule(ObstacleMode mode, int height_mm, int count,
                                        const WalkwayConfig& walkway, std::uint64_t seed,
                                        const ScheduleConfig& cfg = {});

/// True when the walker's leading foot-box front has come within the
/// obstacle's spawn distance.
bool spawn_due(const ObstacleSpec& spec, double front_x);

/// Rigid foot proxy attached to the ankle tracker: extends `length` forward of
/// the tracker, ±width/2 laterally, bottom face `height` below it.
struct FootBox {
  double length = 0.26;
  double width = 0.10;
  double height = 0.06;

  double bottom(const Pose& p) const { return p.position.z - height; }
  /// [rear, front] extent along x for the pose's yaw.
  std::array<double, 2> x_extent(const Pose& p) const;
};

struct FootCrossing {
  bool overlapped = false;
  bool collision = false;
  bool passed = false;
  std::optional<double> clearance;  // min(bottom − height) over overlap frames
  std::optional<double> collision_time;
  std::optional<double> pass_time;
  std::optional<double> reach_time;  // box front reaches the leading edge, after spawn
};

struct TrialResult {
  int obstacle_id = 0;
  ObstacleMode mode = ObstacleMode::anticipated;
  int height_mm = 0;
  bool crossed = false;
  bool success = false;
  std::optional<Side> collision_foot;
  std::optional<Side> lead_foot;
  std::optional<double> lead_clearance;
  std::optional<double> trail_clearance;
  std::optional<double> art;       // lead foot
  std::optional<double> art_head;  // head reaching the leading edge
  std::optional<double> crossing_speed;
  bool reliable = true;
  FootCrossing left;
  FootCrossing right;
};

struct CrossingCue {
  int obstacle_id = 0;
  bool success = false;
  double time = 0.0;
};

/// Incremental evaluation of one obstacle over time-ordered poses. Poses of
/// all three streams are fed in time order through observe().
class CrossingMonitor {
public:
  explicit CrossingMonitor(ObstacleSpec spec, FootBox box = {}, double max_gap_s = 0.1);

  /// Returns the single feedback cue of the trial when it becomes due:
  /// failure on the first collision, success once both feet are past.
  std::optional<CrossingCue> observe(const PoseSample& sample);

  void set_spawn_time(double t) { spec_.spawn_time = t; }
  const ObstacleSpec& spec() const { return spec_; }
  bool resolved() const;
  TrialResult result() const;

private:
  struct FootState {
    FootCrossing crossing;
    std::optional<Pose> last;
  };
  void observe_foot(FootState& st, const Pose& p);
  void observe_head(const Pose& p);

  ObstacleSpec spec_;
  FootBox box_;
  double max_gap_s_;
  FootState left_;
  FootState right_;
  std::optional<Pose> head_last_;
  std::optional<double> head_reach_;
  std::optional<Pose> window_head_start_;
  std::optional<Pose> window_head_end_;
  std::optional<std::array<double, 2>> window_feet_;  // mean foot x at first/last overlap
  std::optional<double> window_t0_;
  std::optional<double> window_t1_;
  bool unreliable_ = false;
  bool cue_sent_ = false;
};

/// Batch evaluation over a time-ordered merged pose stream.
TrialResult check_crossing(std::span<const PoseSample> poses, const ObstacleSpec& spec,
                           FootBox box = {});

/// ART of an unanticipated obstacle; empty for anticipated obstacles, before
/// spawn or when never reached.
std::optional<double> available_response_time(const ObstacleSpec& spec,
                                              std::span<const PoseSample> poses,
                                              FootBox box = {});

/// successes / crossed trials; empty when nothing was crossed.
std::optional<double> success_rate(std::span<const TrialResult> results);

}  // namespace strideway
