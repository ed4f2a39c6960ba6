#include "strideway/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "strideway/errors.hpp"

namespace strideway {

bool is_legal_height(int mm) {
  return std::find(kLegalHeightsMm.begin(), kLegalHeightsMm.end(), mm) != kLegalHeightsMm.end();
}

ObstacleHeight ObstacleHeight::from_mm(int mm) {
  if (!is_legal_height(mm)) {
    throw ConfigError("obstacle.height_mm",
                      std::to_string(mm) + " mm is not one of 25, 50, 75, 100, 125, 150, 190");
  }
  return ObstacleHeight(mm);
}

const char* to_string(ObstacleMode m) {
  return m == ObstacleMode::anticipated ? "anticipated" : "unanticipated";
}

ObstacleMode parse_obstacle_mode(const std::string& s) {
  if (s == "anticipated") return ObstacleMode::anticipated;
  if (s == "unanticipated") return ObstacleMode::unanticipated;
  throw ConfigError("obstacle.mode", "expected anticipated or unanticipated, got '" + s + "'");
}

std::vector<ObstacleSpec> make_schedule(ObstacleMode mode, int height_mm, int count,
                                        const WalkwayConfig& walkway, std::uint64_t seed,
                                        const ScheduleConfig& cfg) {
  const ObstacleHeight height = ObstacleHeight::from_mm(height_mm);
  if (count < 1) throw ConfigError("obstacle.count", "must be at least 1");
  const double last_leading = cfg.first_position_m + (count - 1) * cfg.spacing_m;
  if (last_leading + cfg.depth_m > walkway.length()) {
    throw ConfigError("obstacle.count", std::to_string(count) + " obstacles need " +
                                            std::to_string(last_leading + cfg.depth_m) +
                                            " m but the walkway is " +
                                            std::to_string(walkway.length()) + " m");
  }

  std::mt19937_64 rng(seed);
  if (!(cfg.spawn_distance_min_m > 0.0) || !(cfg.spawn_distance_max_m >= cfg.spawn_distance_min_m)) {
    throw ConfigError("obstacle.spawn_distance_min_m", "spawn window must be positive and ordered");
  }
  std::uniform_real_distribution<double> distance(cfg.spawn_distance_min_m, cfg.spawn_distance_max_m);
  std::vector<ObstacleSpec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    ObstacleSpec o;
    o.id = k;
    o.x_position = walkway.origin_m + cfg.first_position_m + k * cfg.spacing_m;
    o.height = height;
    o.depth = cfg.depth_m;
    o.mode = mode;
    if (mode == ObstacleMode::anticipated) {
      o.spawn_time = 0.0;
    } else {
      o.spawn_distance = distance(rng);
    }
    out.push_back(o);
  }
  return out;
}

bool spawn_due(const ObstacleSpec& spec, double front_x) {
  return spec.mode == ObstacleMode::unanticipated && spec.spawn_distance.has_value() &&
         front_x >= spec.x_position - *spec.spawn_distance;
}

std::array<double, 2> FootBox::x_extent(const Pose& p) const {
  const double yaw = p.yaw_deg * std::numbers::pi / 180.0;
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  double lo = p.position.x;
  double hi = p.position.x;
  for (const double u : {0.0, length}) {
    for (const double v : {-0.5 * width, 0.5 * width}) {
      const double x = p.position.x + u * c - v * s;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  return {lo, hi};
}

// ---------------------------------------------------------------------------

namespace {

// Time at which a linearly interpolated coordinate first reaches `edge`,
// never earlier than `not_before`.
double reach_time(double t0, double v0, double t1, double v1, double edge, double not_before) {
  double t = t1;
  if (v1 > v0 && v0 < edge) t = t0 + (edge - v0) / (v1 - v0) * (t1 - t0);
  return std::max(t, not_before);
}

}  // namespace

CrossingMonitor::CrossingMonitor(ObstacleSpec spec, FootBox box, double max_gap_s)
    : spec_(std::move(spec)), box_(box), max_gap_s_(max_gap_s) {}

std::optional<CrossingCue> CrossingMonitor::observe(const PoseSample& sample) {
  switch (sample.stream) {
    case PoseStream::head:
      observe_head(sample.pose);
      return std::nullopt;
    case PoseStream::left_foot:
      observe_foot(left_, sample.pose);
      break;
    case PoseStream::right_foot:
      observe_foot(right_, sample.pose);
      break;
  }
  if (cue_sent_) return std::nullopt;
  if (left_.crossing.collision || right_.crossing.collision) {
    cue_sent_ = true;
    return CrossingCue{spec_.id, false, sample.pose.time};
  }
  if (left_.crossing.passed && right_.crossing.passed) {
    cue_sent_ = true;
    return CrossingCue{spec_.id, true, sample.pose.time};
  }
  return std::nullopt;
}

void CrossingMonitor::observe_head(const Pose& p) {
  if (spec_.spawn_time && !head_reach_ && p.time >= *spec_.spawn_time &&
      p.position.x >= spec_.x_position) {
    head_reach_ = head_last_ ? reach_time(head_last_->time, head_last_->position.x, p.time,
                                          p.position.x, spec_.x_position, *spec_.spawn_time)
                             : *spec_.spawn_time;
  }
  head_last_ = p;
}

void CrossingMonitor::observe_foot(FootState& st, const Pose& p) {
  const double leading = spec_.x_position;
  const double trailing = spec_.x_position + spec_.depth;
  auto overlaps = [&](const Pose& q) {
    const auto ext = box_.x_extent(q);
    return ext[1] > leading && ext[0] < trailing;
  };
  const auto ext = box_.x_extent(p);
  const bool overlap = overlaps(p);
  FootCrossing& c = st.crossing;

  if (st.last && (overlap || overlaps(*st.last)) && p.time - st.last->time > max_gap_s_) {
    unreliable_ = true;
  }

  if (overlap) {
    c.overlapped = true;
    const double clr = box_.bottom(p) - spec_.height.meters();
    c.clearance = c.clearance ? std::min(*c.clearance, clr) : clr;
    if (clr < 0.0 && !c.collision) {
      c.collision = true;
      c.collision_time = p.time;
    }
  }
  if (!c.passed && ext[0] >= trailing) {
    c.passed = true;
    c.pass_time = p.time;
  }
  if (spec_.spawn_time && !c.reach_time && p.time >= *spec_.spawn_time && ext[1] >= leading) {
    c.reach_time = st.last ? reach_time(st.last->time, box_.x_extent(*st.last)[1], p.time, ext[1],
                                        leading, *spec_.spawn_time)
                           : *spec_.spawn_time;
  }
  st.last = p;

  if (overlap) {
    double feet = 0.0;
    int n = 0;
    for (const FootState* f : {&left_, &right_}) {
      if (f->last) {
        feet += f->last->position.x;
        ++n;
      }
    }
    feet /= n;
    if (!window_t0_) {
      window_t0_ = p.time;
      window_head_start_ = head_last_;
      window_feet_ = std::array<double, 2>{feet, feet};
    }
    window_t1_ = p.time;
    window_head_end_ = head_last_;
    (*window_feet_)[1] = feet;
  }
}

bool CrossingMonitor::resolved() const {
  return (left_.crossing.passed && right_.crossing.passed);
}

TrialResult CrossingMonitor::result() const {
  TrialResult r;
  r.obstacle_id = spec_.id;
  r.mode = spec_.mode;
  r.height_mm = spec_.height.mm();
  r.left = left_.crossing;
  r.right = right_.crossing;
  r.crossed = r.left.passed && r.right.passed;
  const bool collided = r.left.collision || r.right.collision;
  r.success = r.crossed && !collided;
  r.reliable = !unreliable_;

  if (r.left.collision && r.right.collision) {
    r.collision_foot = *r.left.collision_time <= *r.right.collision_time ? Side::left : Side::right;
  } else if (r.left.collision) {
    r.collision_foot = Side::left;
  } else if (r.right.collision) {
    r.collision_foot = Side::right;
  }

  if (r.left.pass_time && r.right.pass_time) {
    r.lead_foot = *r.left.pass_time <= *r.right.pass_time ? Side::left : Side::right;
  } else if (r.left.pass_time) {
    r.lead_foot = Side::left;
  } else if (r.right.pass_time) {
    r.lead_foot = Side::right;
  }
  if (r.lead_foot) {
    const FootCrossing& lead = *r.lead_foot == Side::left ? r.left : r.right;
    const FootCrossing& trail = *r.lead_foot == Side::left ? r.right : r.left;
    r.lead_clearance = lead.clearance;
    r.trail_clearance = trail.clearance;
  }

  if (spec_.mode == ObstacleMode::unanticipated && spec_.spawn_time) {
    std::optional<double> reach;
    if (r.lead_foot) reach = (*r.lead_foot == Side::left ? r.left : r.right).reach_time;
    if (!reach) {
      for (const FootCrossing* f : {&r.left, &r.right}) {
        if (f->reach_time && (!reach || *f->reach_time < *reach)) reach = f->reach_time;
      }
    }
    if (reach) r.art = std::max(0.0, *reach - *spec_.spawn_time);
    if (head_reach_) r.art_head = std::max(0.0, *head_reach_ - *spec_.spawn_time);
  }

  if (window_t0_ && window_t1_ && *window_t1_ > *window_t0_) {
    if (window_head_start_ && window_head_end_ &&
        window_head_end_->time > window_head_start_->time) {
      r.crossing_speed = (window_head_end_->position.x - window_head_start_->position.x) /
                         (window_head_end_->time - window_head_start_->time);
    } else if (window_feet_) {
      r.crossing_speed = ((*window_feet_)[1] - (*window_feet_)[0]) / (*window_t1_ - *window_t0_);
    }
  }
  return r;
}

TrialResult check_crossing(std::span<const PoseSample> poses, const ObstacleSpec& spec,
                           FootBox box) {
  CrossingMonitor monitor(spec, box);
  for (const auto& p : poses) monitor.observe(p);
  return monitor.result();
}

std::optional<double> available_response_time(const ObstacleSpec& spec,
                                              std::span<const PoseSample> poses, FootBox box) {
  if (spec.mode != ObstacleMode::unanticipated || !spec.spawn_time) return std::nullopt;
  return check_crossing(poses, spec, box).art;
}

std::optional<double> success_rate(std::span<const TrialResult> results) {
  int crossed = 0;
  int ok = 0;
  for (const auto& r : results) {
    if (!r.crossed) continue;
    ++crossed;
    if (r.success) ++ok;
  }
  if (crossed == 0) return std::nullopt;
  return static_cast<double>(ok) / crossed;
}

}  // namespace strideway
