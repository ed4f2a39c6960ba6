#include "strideway/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "strideway/errors.hpp"

namespace strideway {

namespace {

constexpr double kAnkleHeight = 0.06;            // FootBox height: foot bottom at ankle z − 0.06
constexpr double kFirstFootprintX = 0.10;        // first on-mat ankle, from the walkway origin
constexpr double kObstacleFootMargin = 0.08;     // footprints keep this far from an obstacle
constexpr double kCrossingSlack = 0.02;          // plateau extends past the box overlap window
constexpr double kMinAdvance = 0.15;
constexpr double kEndMargin = 0.01;
constexpr std::size_t kNoiseTableSize = std::size_t{1} << 20;  // power of two
constexpr double kHeadLeadOffset = 0.13;
constexpr double kHeadSway = 0.01;

struct BlobShape {
  double along;      // centre, fraction of foot length from the ankle
  double radius_a;   // along the foot axis, m
  double radius_c;   // across, m
};
constexpr BlobShape kHeel{0.20, 0.035, 0.028};
constexpr BlobShape kForefoot{0.72, 0.045, 0.040};

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

struct Stamp {
  std::vector<std::uint32_t> nodes;
  std::vector<double> weights;  // sum to 1
};

// Nodes inside an ellipse, weighted 1 − q/2 (q = normalised squared radius).
Stamp rasterize(const WalkwayConfig& walkway, Vec2 centre, double yaw, double ra, double rc) {
  Stamp s;
  const double reach = std::max(ra, rc);
  const double pitch = TileSpec::pitch_m;
  const int c0 = std::max(0, static_cast<int>(std::floor((centre.x - reach - walkway.origin_m) / pitch)));
  const int c1 = std::min(walkway.grid_cols() - 1,
                          static_cast<int>(std::ceil((centre.x + reach - walkway.origin_m) / pitch)));
  const int r0 = std::max(0, static_cast<int>(std::floor((centre.y - reach) / pitch)));
  const int r1 = std::min(TileSpec::rows - 1, static_cast<int>(std::ceil((centre.y + reach) / pitch)));
  const double c = std::cos(yaw);
  const double sn = std::sin(yaw);
  double total = 0.0;
  for (int r = r0; r <= r1; ++r) {
    for (int gc = c0; gc <= c1; ++gc) {
      const std::size_t idx = PressureFrame::flat(node_from_grid(r, gc));
      const Vec2 p = node_center_unchecked(walkway, idx);
      const double dx = p.x - centre.x;
      const double dy = p.y - centre.y;
      const double a = (dx * c + dy * sn) / ra;
      const double b = (-dx * sn + dy * c) / rc;
      const double q = a * a + b * b;
      if (q > 1.0) continue;
      const double w = 1.0 - 0.5 * q;
      s.nodes.push_back(static_cast<std::uint32_t>(idx));
      s.weights.push_back(w);
      total += w;
    }
  }
  for (double& w : s.weights) w /= total;
  return s;
}

struct Swing {
  double xa = 0.0;
  double xb = 0.0;
  double apex = 0.0;
  double rise = 0.0;
};

struct PlannedStep {
  Footstep step;
  Swing swing;  // arc that ends on this footstep
  Stamp heel;
  Stamp forefoot;
};

class Walker {
public:
  Walker(const WalkerParams& p, const Scenario& sc, const SessionConfig& session,
         const PlaybackSchedule* sentences)
      : p_(p), scenario_(sc), session_(session), sentences_(sentences),
        obstacles_(obstacle_schedule(session)) {
    plan();
  }

  double end_time() const { return end_time_; }

  std::vector<Footstep> footsteps() const {
    std::vector<Footstep> out;
    for (const auto& s : steps_) {
      if (s.step.index >= 0 && s.step.contact_time < end_time_) out.push_back(s.step);
    }
    return out;
  }

  Pose head(double t) const {
    // Piecewise-linear progression through the per-step head stations.
    std::size_t k = 0;
    while (k + 2 < steps_.size() && steps_[k + 1].step.contact_time <= t) ++k;
    const double t0 = steps_[k].step.contact_time;
    const double t1 = steps_[k + 1].step.contact_time;
    const double u = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    const double phase = static_cast<double>(steps_[k].step.index) + u;
    const double x = station_[k] + (station_[k + 1] - station_[k]) * u;
    const double cy = session_.walkway.width() / 2.0;
    Pose pose;
    pose.time = t;
    pose.position = {x, cy + kHeadSway * std::sin(std::numbers::pi * phase),
                     p_.head_height_m + p_.head_bob_m * std::sin(2.0 * std::numbers::pi * phase)};
    return pose;
  }

  Pose foot(Side side, double t) const {
    // Latest footstep of this side already in contact.
    std::size_t j = steps_.size();
    for (std::size_t k = 0; k < steps_.size(); ++k) {
      if (steps_[k].step.side != side) continue;
      if (steps_[k].step.contact_time <= t) j = k;
      else break;
    }
    Pose pose;
    pose.time = t;
    const Footstep& cur = steps_[j].step;
    const std::size_t next = j + 2;
    if (t <= cur.toe_off_time || next >= steps_.size()) {
      pose.position = {cur.x, cur.y, kAnkleHeight};
      pose.yaw_deg = cur.yaw_deg;
      return pose;
    }
    const Footstep& dst = steps_[next].step;
    const Swing& sw = steps_[next].swing;
    const double s = std::clamp((t - cur.toe_off_time) / (dst.contact_time - cur.toe_off_time), 0.0, 1.0);
    const double blend = 0.5 * (1.0 - std::cos(std::numbers::pi * s));
    const double x = cur.x + (dst.x - cur.x) * blend;
    const double lift = sw.apex * smoothstep((x - sw.xa) / sw.rise) * smoothstep((sw.xb - x) / sw.rise);
    pose.position = {x, cur.y + (dst.y - cur.y) * blend, kAnkleHeight + lift};
    pose.yaw_deg = cur.yaw_deg + (dst.yaw_deg - cur.yaw_deg) * blend;
    return pose;
  }

  void render(double t, std::vector<double>& grams) const {
    const double body_g = p_.body_mass_kg * 1000.0;
    for (std::size_t k = 0; k + 1 < steps_.size(); ++k) {
      const Footstep& st = steps_[k].step;
      if (st.contact_time > t) break;
      if (!st.on_walkway || t > st.toe_off_time) continue;
      const double next_contact = steps_[k + 1].step.contact_time;
      const double up = (t - st.contact_time) /
                        (p_.double_support_fraction * (next_contact - st.contact_time));
      const double down = (st.toe_off_time - t) / (st.toe_off_time - next_contact);
      const double force = body_g * std::clamp(std::min(up, down), 0.0, 1.0);
      if (force <= 0.0) continue;
      const double progress = (t - st.contact_time) / (st.toe_off_time - st.contact_time);
      const double heel = force * (1.0 - progress);
      const double fore = force * progress;
      for (std::size_t i = 0; i < steps_[k].heel.nodes.size(); ++i) {
        grams[steps_[k].heel.nodes[i]] += heel * steps_[k].heel.weights[i];
      }
      for (std::size_t i = 0; i < steps_[k].forefoot.nodes.size(); ++i) {
        grams[steps_[k].forefoot.nodes[i]] += fore * steps_[k].forefoot.weights[i];
      }
    }
  }

private:
  double slowdown(double t, double x) const {
    switch (scenario_.kind) {
      case ScenarioKind::dual_task_slowdown:
        if (sentences_ != nullptr) {
          for (const auto& e : sentences_->entries) {
            if (t >= e.start_s && t < e.end_s()) return scenario_.speed_factor;
          }
        }
        return 1.0;
      case ScenarioKind::hesitation:
        for (const auto& o : obstacles_) {
          const double trailing = o.x_position + o.depth;
          if (x >= trailing) continue;
          if (scenario_.onset == HesitationOnset::approach) {
            if (x >= o.x_position - scenario_.onset_distance_m) return scenario_.speed_factor;
          } else {
            const double d = o.spawn_distance.value_or(scenario_.onset_distance_m);
            if (x + p_.foot_length_m >= o.x_position - d) return scenario_.speed_factor;
          }
        }
        return 1.0;
      case ScenarioKind::clean:
      case ScenarioKind::trip:
        break;
    }
    return 1.0;
  }

  double place(double x, double prev) const {
    x = std::max(x, prev + kMinAdvance);
    for (const auto& o : obstacles_) {
      const double lo = o.x_position - p_.foot_length_m - kObstacleFootMargin;
      const double hi = o.x_position + o.depth + kObstacleFootMargin;
      if (x <= lo || x >= hi) continue;
      x = (x - lo < hi - x) ? lo : hi;
      if (x < prev + kMinAdvance) x = hi;
    }
    return x;
  }

  void plan() {
    const WalkwayConfig& w = session_.walkway;
    const double L = p_.step_length();
    const double T = p_.step_period();
    const double x_first = w.origin_m + kFirstFootprintX;
    const double lane_end = w.origin_m + w.length() - kEndMargin;
    const double cy = w.width() / 2.0;
    std::mt19937_64 placement(p_.noise_seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> jitter(0.0, 1.0);

    auto make = [&](int k, double x, double t) {
      PlannedStep ps;
      ps.step.index = k;
      ps.step.side = (k % 2 == 0) ? Side::right : Side::left;
      ps.step.x = x;
      ps.step.y = cy + (ps.step.side == Side::left ? 0.5 : -0.5) * p_.step_width_m;
      ps.step.yaw_deg = ps.step.side == Side::left ? p_.toe_out_deg : -p_.toe_out_deg;
      ps.step.contact_time = t;
      return ps;
    };

    steps_.push_back(make(-2, x_first - 2.0 * L, -2.0 * T));
    steps_.push_back(make(-1, x_first - L, -T));
    double t = 0.0;
    double prev_x = steps_.back().step.x;
    int tail = 0;  // virtual steps after the last one on the lane
    end_time_ = session_.duration_s;
    for (int k = 0; tail < 2; ++k) {
      const double nominal = x_first + k * L;
      double x = nominal;
      if (p_.step_length_sd_m > 0.0 && tail == 0) x += p_.step_length_sd_m * jitter(placement);
      if (tail == 0) x = place(x, prev_x);
      const bool fits = x + p_.foot_length_m <= lane_end && t < session_.duration_s;
      if (!fits && tail == 0) end_time_ = std::min(session_.duration_s, t);
      if (!fits) ++tail;
      steps_.push_back(make(k, fits ? x : prev_x + L, t));
      prev_x = steps_.back().step.x;
      t += T / slowdown(t, x);
    }
    station_.assign(steps_.size(), 0.0);
    for (std::size_t k = 0; k < steps_.size(); ++k) {
      station_[k] = x_first + steps_[k].step.index * L - L / 2.0 + kHeadLeadOffset;
    }

    for (std::size_t k = 0; k + 2 < steps_.size(); ++k) {
      const double t1 = steps_[k + 1].step.contact_time;
      const double t2 = steps_[k + 2].step.contact_time;
      steps_[k].step.toe_off_time = t1 + p_.double_support_fraction * (t2 - t1);
    }
    for (std::size_t k = steps_.size() - 2; k < steps_.size(); ++k) {
      steps_[k].step.toe_off_time = std::numeric_limits<double>::infinity();
    }

    for (std::size_t k = 0; k < steps_.size(); ++k) {
      PlannedStep& ps = steps_[k];
      const bool in_lane = ps.step.index >= 0 && ps.step.contact_time < end_time_;
      ps.step.on_walkway = in_lane && ps.step.x >= w.origin_m &&
                           ps.step.x + p_.foot_length_m <= w.origin_m + w.length();
      if (ps.step.on_walkway) {
        const double yaw = deg2rad(ps.step.yaw_deg);
        auto centre = [&](const BlobShape& b) {
          const double d = b.along * p_.foot_length_m;
          return Vec2{ps.step.x + d * std::cos(yaw), ps.step.y + d * std::sin(yaw)};
        };
        ps.heel = rasterize(w, centre(kHeel), yaw, kHeel.radius_a, kHeel.radius_c);
        ps.forefoot = rasterize(w, centre(kForefoot), yaw, kForefoot.radius_a, kForefoot.radius_c);
      }
      if (k >= 2) ps.swing = plan_swing(steps_[k - 2].step.x, ps.step.x);
    }
  }

  Swing plan_swing(double xa, double xb) const {
    Swing sw{xa, xb, p_.swing_apex_m, 0.5 * (xb - xa)};
    bool crossing = false;
    for (const auto& o : obstacles_) {
      if (!(o.x_position > xa && o.x_position < xb)) continue;
      double apex = std::max(p_.swing_apex_m, o.height.meters() + p_.crossing_margin_m);
      if (scenario_.kind == ScenarioKind::trip && scenario_.obstacle_index == o.id) {
        apex = scenario_.apex_override_m;
      }
      sw.apex = crossing ? std::max(sw.apex, apex) : apex;
      crossing = true;
      const double before = (o.x_position - p_.foot_length_m - kCrossingSlack) - xa;
      const double after = xb - (o.x_position + o.depth + kCrossingSlack);
      sw.rise = std::min({sw.rise, before, after});
    }
    sw.rise = std::max(sw.rise, 0.01);
    return sw;
  }

  WalkerParams p_;
  Scenario scenario_;
  SessionConfig session_;
  const PlaybackSchedule* sentences_;
  std::vector<ObstacleSpec> obstacles_;
  std::vector<PlannedStep> steps_;
  std::vector<double> station_;
  double end_time_ = 0.0;
};

}  // namespace

void WalkerParams::validate(const WalkwayConfig& walkway) const {
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be positive");
  };
  positive(speed_mps, "walker.speed");
  positive(cadence_spm, "walker.cadence");
  positive(body_mass_kg, "walker.body_mass");
  positive(swing_apex_m, "walker.swing_apex");
  positive(foot_length_m, "walker.foot_length");
  const double L = step_length();
  if (L < 0.2 || L > 1.2) {
    throw ConfigError("walker.speed", "speed and cadence imply a step length of " +
                                          std::to_string(L) + " m, outside [0.2, 1.2]");
  }
  if (!(double_support_fraction > 0.0 && double_support_fraction < 0.5)) {
    throw ConfigError("walker.double_support_fraction", "must lie in (0, 0.5)");
  }
  if (step_width_m < 0.10 || step_width_m / 2.0 + 0.05 > walkway.width() / 2.0) {
    throw ConfigError("walker.step_width", "feet must not overlap and must stay on the walkway");
  }
  if (noise_scale < 0.0) throw ConfigError("walker.noise_scale", "must be non-negative");
  if (step_length_sd_m < 0.0) throw ConfigError("walker.step_length_sd", "must be non-negative");
  if (std::abs(toe_out_deg) > 30.0) throw ConfigError("walker.toe_out_deg", "must lie in [-30, 30]");
  if (kFirstFootprintX + 2.0 * L + foot_length_m > walkway.length()) {
    throw ConfigError("walker.speed", "walkway too short for three steps of this length");
  }
}

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::clean: return "clean";
    case ScenarioKind::trip: return "trip";
    case ScenarioKind::hesitation: return "hesitation";
    case ScenarioKind::dual_task_slowdown: break;
  }
  return "dual_task_slowdown";
}

ScenarioKind parse_scenario_kind(const std::string& s) {
  if (s == "clean") return ScenarioKind::clean;
  if (s == "trip") return ScenarioKind::trip;
  if (s == "hesitation") return ScenarioKind::hesitation;
  if (s == "dual_task_slowdown") return ScenarioKind::dual_task_slowdown;
  throw ConfigError("scenario.kind", "unknown scenario kind '" + s + "'");
}

void Scenario::validate(std::size_t obstacle_count) const {
  if (!(speed_factor > 0.0 && speed_factor <= 1.0)) {
    throw ConfigError("scenario.speed_factor", "must lie in (0, 1]");
  }
  if (kind == ScenarioKind::trip) {
    if (obstacle_index < 0 || static_cast<std::size_t>(obstacle_index) >= obstacle_count) {
      throw ConfigError("scenario.obstacle_index", "no obstacle with index " + std::to_string(obstacle_index));
    }
    if (!(apex_override_m > 0.0)) throw ConfigError("scenario.apex", "must be positive");
  }
  if (kind == ScenarioKind::hesitation && !(onset_distance_m > 0.0)) {
    throw ConfigError("scenario.distance", "must be positive");
  }
}

WalkerParams apply_load_modifiers(WalkerParams params, const LoadCondition& condition,
                                  const LoadModifiers& mods) {
  if (condition.sound == SoundLevel::busy) {
    params.speed_mps *= mods.busy_sound_speed;
    params.step_length_sd_m += mods.busy_sound_step_sd_m;
  }
  if (condition.visual == VisualLoad::busy) {
    params.speed_mps *= mods.busy_visual_speed;
    params.step_length_sd_m += mods.busy_visual_step_sd_m;
  }
  if (condition.cognitive) {
    params.speed_mps *= mods.cognitive_speed;
    params.step_length_sd_m += mods.cognitive_step_sd_m;
  }
  return params;
}

SimulationOutput simulate(const WalkerParams& params, const Scenario& scenario,
                          const SessionConfig& session, const PlaybackSchedule* sentences,
                          double pose_rate_hz) {
  session.validate();
  params.validate(session.walkway);
  const auto obstacles = obstacle_schedule(session);
  scenario.validate(obstacles.size());

  const Walker walker(params, scenario, session, sentences);
  SimulationOutput out;
  out.end_time = walker.end_time();
  out.footsteps = walker.footsteps();
  out.pose_rate_hz = pose_rate_hz;

  // Sensor noise comes from a pre-drawn table read at a fresh random offset
  // each frame; drawing every node of every frame costs seconds per session.
  std::mt19937_64 noise_rng(params.noise_seed);
  std::vector<double> noise_table(kNoiseTableSize);
  {
    std::normal_distribution<double> noise(0.0, 1.0);
    for (double& v : noise_table) v = params.noise_scale * noise(noise_rng);
  }
  std::uniform_int_distribution<std::size_t> offset(0, kNoiseTableSize - 1);
  const std::size_t nodes = session.walkway.node_count();
  std::vector<double> grams(nodes);
  const double per_gram = TileSpec::raw_max / TileSpec::force_max_g;
  for (std::uint32_t i = 0;; ++i) {
    const double t = i / session.frame_rate_hz;
    if (t >= out.end_time) break;
    std::fill(grams.begin(), grams.end(), 0.0);
    walker.render(t, grams);
    PressureFrame f(session.walkway.tile_count, i,
                    static_cast<std::uint64_t>(std::llround(t * 1e6)));
    std::size_t k = offset(noise_rng);
    for (std::size_t n = 0; n < nodes; ++n) {
      double raw = grams[n] * per_gram + noise_table[k];
      k = (k + 1) & (kNoiseTableSize - 1);
      raw = std::clamp(std::round(raw), 0.0, static_cast<double>(TileSpec::raw_max));
      f.values[n] = static_cast<std::uint16_t>(raw);
    }
    out.frames.push_back(std::move(f));
  }

  for (std::uint32_t i = 0;; ++i) {
    const double t = i / pose_rate_hz;
    if (t >= out.end_time) break;
    out.poses.push_back({PoseStream::head, i, walker.head(t)});
    out.poses.push_back({PoseStream::left_foot, i, walker.foot(Side::left, t)});
    out.poses.push_back({PoseStream::right_foot, i, walker.foot(Side::right, t)});
  }
  return out;
}

}  // namespace strideway
