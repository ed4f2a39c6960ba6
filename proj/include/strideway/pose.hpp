#pragma once

#include <cstdint>

namespace strideway {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// Tracker pose. For ankle trackers the position is the tracker origin; for
/// the headset it is the head.
struct Pose {
  double time = 0.0;  // seconds since walking onset
  Vec3 position;
  double yaw_deg = 0.0;

  friend bool operator==(const Pose&, const Pose&) = default;
};

enum class PoseStream : std::uint8_t { head = 0, left_foot = 1, right_foot = 2 };

const char* to_string(PoseStream s);

struct PoseSample {
  PoseStream stream = PoseStream::head;
  std::uint32_t seq = 0;
  Pose pose;

  friend bool operator==(const PoseSample&, const PoseSample&) = default;
};

}  // namespace strideway
