#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "strideway/pose.hpp"
#include "strideway/pressure.hpp"

namespace strideway {

enum class ContactKind : std::uint8_t { on, off };  // heel contact / toe off

struct GaitEvent {
  Side foot = Side::unknown;
  ContactKind kind = ContactKind::on;
  double time = 0.0;
  Vec2 anchor;  // COF averaged over the first (on) or last (off) 50 ms of stance
};

struct EventDetectorConfig {
  double on_threshold_g = 2000.0;
  double off_threshold_g = 1000.0;
  double sustain_s = 0.030;
  double anchor_window_s = 0.050;
};

/// Hysteresis event detection on one foot's force series. A crossing counts
/// only when the new level holds for at least `sustain_s`; the event is
/// stamped at the first sample of that run. Events alternate on/off by
/// construction, starting with `on`.
std::vector<GaitEvent> detect_events(std::span<const ForceSample> series, Side foot,
                                     const EventDetectorConfig& cfg = {});

struct StepRecord {
  Side leading_foot = Side::unknown;  // the foot that lands
  double time = 0.0;                  // its contact time
  double length = 0.0;                // anterior Δx between contact anchors
  double width = 0.0;                 // |Δy|
  double duration = 0.0;
  double speed = 0.0;
};

struct StrideRecord {
  Side foot = Side::unknown;
  double time = 0.0;
  double length = 0.0;
  double duration = 0.0;
};

struct StepMetrics {
  std::vector<StepRecord> steps;
  std::vector<StrideRecord> strides;
};

/// Steps pair consecutive contralateral heel contacts, strides consecutive
/// ipsilateral ones. Events of both feet may be passed in any order.
StepMetrics step_metrics(std::span<const GaitEvent> events);

struct FootAngle {
  double degrees = 0.0;  // (-90, 90], positive = toe-out
  bool low_confidence = false;
};

/// Angle of the force-weighted principal axis of a contact patch relative to
/// the walking axis. Near-isotropic patches (eigenvalue ratio below
/// `min_eigen_ratio`) report 0° flagged low-confidence. Empty for fewer than
/// two distinct points.
std::optional<FootAngle> foot_angle(std::span<const Vec2> points, std::span<const double> weights,
                                    Side side, Vec2 walking_axis = {1.0, 0.0},
                                    double min_eigen_ratio = 1.2);
std::optional<FootAngle> foot_angle(const FootCluster& cluster, Side side,
                                    Vec2 walking_axis = {1.0, 0.0});

struct HeadKinematics {
  double path_length = 0.0;
  double mean_speed = 0.0;
  double rms_ml = 0.0;
  double rms_vertical = 0.0;
  double yaw_range = 0.0;
};

/// Empty for fewer than two samples or zero duration.
std::optional<HeadKinematics> head_kinematics(std::span<const Pose> head);

struct SideForces {
  double time = 0.0;
  double left_g = 0.0;
  double right_g = 0.0;
};

struct SidedFootAngle {
  Side side = Side::unknown;
  FootAngle angle;
};

struct GaitSummary {
  std::size_t step_count = 0;
  std::optional<double> mean_speed;
  std::optional<double> cadence;
  std::optional<double> step_length_mean;
  std::optional<double> step_length_sd;
  std::optional<double> step_width_mean;
  std::optional<double> step_width_sd;
  std::optional<double> stride_length_mean;
  std::optional<double> stance_time_mean;
  std::optional<double> foot_angle_left;
  std::optional<double> foot_angle_right;
  std::optional<double> symmetry_index;
};

/// Aggregates one session. `analyzed_s` is the interval the steps were
/// counted over (cadence = steps / analyzed_s · 60). Symmetry is averaged over
/// double-support samples only. Aggregates stay empty when undefined.
GaitSummary gait_summary(const StepMetrics& metrics, std::span<const GaitEvent> events,
                         std::span<const SideForces> distribution,
                         std::span<const SidedFootAngle> angles, double analyzed_s);

/// Sample mean and standard deviation (n − 1); sd empty below two values.
struct MeanSd {
  std::optional<double> mean;
  std::optional<double> sd;
};
MeanSd mean_sd(std::span<const double> values);

}  // namespace strideway
