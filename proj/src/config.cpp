#include "strideway/config.hpp"

#include <cmath>

#include "strideway/errors.hpp"

namespace strideway {

void SessionConfig::validate() const {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw ConfigError("duration_s", "must be positive");
  }
  if (!(countdown_s >= 0.0)) throw ConfigError("countdown_s", "must be non-negative");
  if (!(frame_rate_hz > 0.0)) throw ConfigError("frame_rate_hz", "must be positive");
  walkway.validate();
  ObstacleHeight::from_mm(obstacle.height_mm);
  if (obstacle.count < 0) throw ConfigError("obstacle.count", "must be non-negative");
  if (!(obstacle.spawn_distance_min_m > 0.0) || !std::isfinite(obstacle.spawn_distance_min_m)) {
    throw ConfigError("obstacle.spawn_distance_min_m", "must be positive");
  }
  if (!(obstacle.spawn_distance_max_m >= obstacle.spawn_distance_min_m) ||
      !std::isfinite(obstacle.spawn_distance_max_m)) {
    throw ConfigError("obstacle.spawn_distance_max_m", "must be at least spawn_distance_min_m");
  }
  if (obstacle.count > 0) obstacle_schedule(*this);
}

std::vector<ObstacleSpec> obstacle_schedule(const SessionConfig& cfg) {
  if (cfg.obstacle.count == 0) return {};
  ScheduleConfig sc;
  sc.spawn_distance_min_m = cfg.obstacle.spawn_distance_min_m;
  sc.spawn_distance_max_m = cfg.obstacle.spawn_distance_max_m;
  return make_schedule(cfg.obstacle.mode, cfg.obstacle.height_mm, cfg.obstacle.count, cfg.walkway,
                       cfg.seed, sc);
}

PlaybackSchedule sentence_schedule(const SessionConfig& cfg, std::span<const Sentence> bank) {
  return schedule_sentences(bank, cfg.seed + 1, cfg.duration_s);
}

}  // namespace strideway
