#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "strideway/dual_task.hpp"
#include "strideway/obstacle.hpp"
#include "strideway/walkway.hpp"

namespace strideway {

struct ObstacleConfig {
  ObstacleMode mode = ObstacleMode::anticipated;
  int height_mm = 100;
  int count = 5;  // 0 runs a walk without obstacles
  /// Unanticipated obstacles appear when the walker's leading foot is a
  /// distance drawn from [min, max] short of the leading edge.
  double spawn_distance_min_m = 1.5;
  double spawn_distance_max_m = 3.0;

  friend bool operator==(const ObstacleConfig&, const ObstacleConfig&) = default;
};

struct SessionConfig {
  double duration_s = 60.0;
  double countdown_s = 3.0;
  WalkwayConfig walkway{24, 0.0};
  ObstacleConfig obstacle;
  LoadCondition condition;
  std::uint64_t seed = 1;
  std::string participant;
  double frame_rate_hz = 100.0;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  friend bool operator==(const SessionConfig&, const SessionConfig&) = default;
};

/// Obstacle layout of a session; empty when count is 0. Uses `seed`.
std::vector<ObstacleSpec> obstacle_schedule(const SessionConfig& cfg);
/// Sentence playback of a cognitive session; uses `seed + 1` so it does not
/// correlate with the obstacle draws.
PlaybackSchedule sentence_schedule(const SessionConfig& cfg, std::span<const Sentence> bank);

}  // namespace strideway
