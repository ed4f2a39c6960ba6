#pragma once

// Helpers and independent oracles shared by the test binaries.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "strideway/pose.hpp"
#include "strideway/walkway.hpp"

namespace testing {

using namespace strideway;

// Sparse random frame: each node is active with probability `density`,
// active values uniform over the full raw range, the rest below threshold.
inline PressureFrame random_frame(std::mt19937_64& rng, int tiles, double density,
                                  std::uint32_t seq = 0, std::uint64_t ts = 0) {
  PressureFrame f(tiles, seq, ts);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> active(0, 4095);
  std::uniform_int_distribution<int> quiet(0, 20);
  for (auto& v : f.values) v = static_cast<std::uint16_t>(u(rng) < density ? active(rng) : quiet(rng));
  return f;
}

// Brute force from the physical definitions: 12-bit counts over 10 kg, 50 g
// contact threshold, 0.5 in pitch, tiles end to end along x.
struct BruteCof {
  double x = 0.0;
  double y = 0.0;
  double total = 0.0;
};

inline BruteCof brute_force_cof(const PressureFrame& f, double origin_m) {
  const double pitch = 0.0127;
  long double sx = 0.0L;
  long double sy = 0.0L;
  long double sw = 0.0L;
  for (int tile = 0; tile < f.tile_count; ++tile) {
    for (int row = 0; row < 33; ++row) {
      for (int col = 0; col < 48; ++col) {
        const int raw = f.values[static_cast<std::size_t>((tile * 33 + row) * 48 + col)];
        const long double grams = raw * 10000.0L / 4095.0L;
        if (grams < 50.0L) continue;
        const long double x = origin_m + (tile * 48 + col + 0.5L) * pitch;
        const long double y = (row + 0.5L) * pitch;
        sx += grams * x;
        sy += grams * y;
        sw += grams;
      }
    }
  }
  if (sw == 0.0L) return {};
  return {static_cast<double>(sx / sw), static_cast<double>(sy / sw), static_cast<double>(sw)};
}

inline double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// Merged head / left / right pose stream of a rigid walker moving at constant
// speed: head at x0 + v·t, both ankles `ankle_behind` behind the head, feet
// at `foot_z` (ankle height). Samples at `rate` Hz on [0, t_end).
inline std::vector<PoseSample> constant_speed_poses(double x0, double v, double t_end, double rate,
                                                    double ankle_behind, double foot_z) {
  std::vector<PoseSample> out;
  for (std::uint32_t i = 0;; ++i) {
    const double t = i / rate;
    if (t >= t_end) break;
    const double hx = x0 + v * t;
    out.push_back({PoseStream::head, i, {t, {hx, 0.2, 1.7}, 0.0}});
    out.push_back({PoseStream::left_foot, i, {t, {hx - ankle_behind, 0.28, foot_z}, 0.0}});
    out.push_back({PoseStream::right_foot, i, {t, {hx - ankle_behind, 0.13, foot_z}, 0.0}});
  }
  return out;
}

}  // namespace testing
