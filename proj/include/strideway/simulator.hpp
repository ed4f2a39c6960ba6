#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "strideway/config.hpp"
#include "strideway/dual_task.hpp"
#include "strideway/obstacle.hpp"
#include "strideway/pose.hpp"
#include "strideway/walkway.hpp"

namespace strideway {

/// Gait of the synthetic walker. Step length is derived:
/// speed = cadence / 60 · step_length.
struct WalkerParams {
  double speed_mps = 1.2;
  double cadence_spm = 110.0;
  double step_width_m = 0.15;
  double foot_length_m = 0.26;
  double body_mass_kg = 70.0;
  double swing_apex_m = 0.05;       // foot-bottom apex of an ordinary swing
  double crossing_margin_m = 0.10;  // apex above an obstacle top when stepping over it
  double double_support_fraction = 0.2;  // of the gait cycle, both periods together
  std::uint64_t noise_seed = 1;
  double noise_scale = 3.0;         // sd of additive sensor noise, raw counts
  double step_length_sd_m = 0.0;    // footstep placement variability
  double toe_out_deg = 0.0;
  double head_height_m = 1.7;
  double head_bob_m = 0.02;

  double step_length() const { return speed_mps * 60.0 / cadence_spm; }
  double step_period() const { return 60.0 / cadence_spm; }

  /// Throws ConfigError when inconsistent or when the gait does not fit.
  void validate(const WalkwayConfig& walkway) const;
};

enum class ScenarioKind : std::uint8_t { clean, trip, hesitation, dual_task_slowdown };
enum class HesitationOnset : std::uint8_t { approach, spawn };

const char* to_string(ScenarioKind k);
/// Throws ConfigError("scenario.kind", ...) for unknown kinds.
ScenarioKind parse_scenario_kind(const std::string& s);

struct Scenario {
  ScenarioKind kind = ScenarioKind::clean;
  int obstacle_index = 0;        // trip
  double apex_override_m = 0.0;  // trip: swing apex over that obstacle
  double speed_factor = 1.0;     // hesitation, dual_task_slowdown; in (0, 1]
  HesitationOnset onset = HesitationOnset::approach;
  double onset_distance_m = 1.5;  // hesitation with approach onset

  void validate(std::size_t obstacle_count) const;
};

struct LoadModifiers {
  double busy_sound_speed = 0.95;
  double busy_visual_speed = 0.97;
  double cognitive_speed = 0.92;
  double busy_sound_step_sd_m = 0.005;
  double busy_visual_step_sd_m = 0.005;
  double cognitive_step_sd_m = 0.01;
};

/// Synthetic assumption, not an empirical claim: each active load slows the
/// walker by its factor (factors compose multiplicatively) and adds footstep
/// variability. Cadence is kept, so the step shortens.
WalkerParams apply_load_modifiers(WalkerParams params, const LoadCondition& condition,
                                  const LoadModifiers& mods = {});

/// Ground truth of one planned footstep.
struct Footstep {
  int index = 0;
  Side side = Side::right;
  double x = 0.0;  // ankle (rear of the foot)
  double y = 0.0;
  double yaw_deg = 0.0;
  double contact_time = 0.0;
  double toe_off_time = 0.0;
  bool on_walkway = false;
};

struct SimulationOutput {
  std::vector<PressureFrame> frames;  // frame_rate_hz of the session
  std::vector<PoseSample> poses;      // 90 Hz, head/left/right per tick, time-ordered
  std::vector<Footstep> footsteps;
  double end_time = 0.0;  // duration, or earlier when the walker reaches the lane end
  double pose_rate_hz = 90.0;
};

/// Kinematic walker: alternating stance/swing, swing arcs that plateau over
/// obstacles, heel and forefoot pressure blobs whose combined force ramps
/// 0 → body weight → 0 while the centre of force migrates heel to toe.
/// `sentences` drives the dual-task slowdown scenario. Deterministic for
/// identical inputs.
SimulationOutput simulate(const WalkerParams& params, const Scenario& scenario,
                          const SessionConfig& session,
                          const PlaybackSchedule* sentences = nullptr,
                          double pose_rate_hz = 90.0);

}  // namespace strideway
