#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace strideway {

/// Geometry and calibration of one sensing tile. The 48-node axis runs along
/// the walking direction (+x) so tiles chain end-to-end into a single lane.
struct TileSpec {
  static constexpr int rows = 33;
  static constexpr int cols = 48;
  static constexpr int nodes = rows * cols;
  static constexpr double pitch_m = 0.0127;  // 0.5 in
  static constexpr std::uint16_t raw_max = 4095;
  static constexpr double force_max_g = 10000.0;
  static constexpr double contact_threshold_g = 50.0;

  static constexpr double length_m = cols * pitch_m;  // 24 in
  static constexpr double width_m = rows * pitch_m;   // 16.5 in
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

enum class Side : std::uint8_t { left, right, unknown };

const char* to_string(Side s);
Side opposite(Side s);

struct NodeIndex {
  int tile = 0;
  int row = 0;
  int col = 0;

  friend bool operator==(const NodeIndex&, const NodeIndex&) = default;
};

struct WalkwayConfig {
  int tile_count = 1;
  double origin_m = 0.0;

  double length() const { return tile_count * TileSpec::length_m; }
  double width() const { return TileSpec::width_m; }
  std::size_t node_count() const {
    return static_cast<std::size_t>(tile_count) * TileSpec::nodes;
  }
  /// Global grid: rows × (tile_count·cols); tiles abut along x.
  int grid_cols() const { return tile_count * TileSpec::cols; }

  /// Throws ConfigError when tile_count < 1.
  void validate() const;
  /// Non-fatal notes (lane shorter than 5 m or longer than 15 m).
  std::vector<std::string> warnings() const;

  friend bool operator==(const WalkwayConfig&, const WalkwayConfig&) = default;
};

/// One snapshot of raw 12-bit counts. `values` is tile-major, then row-major
/// within each tile: index = (tile·rows + row)·cols + col.
struct PressureFrame {
  std::uint32_t seq = 0;
  std::uint64_t timestamp_us = 0;
  int tile_count = 1;
  std::vector<std::uint16_t> values;

  PressureFrame() = default;
  PressureFrame(int tiles, std::uint32_t seq_, std::uint64_t ts)
      : seq(seq_), timestamp_us(ts), tile_count(tiles),
        values(static_cast<std::size_t>(tiles) * TileSpec::nodes, 0) {}

  static std::size_t flat(NodeIndex n) {
    return (static_cast<std::size_t>(n.tile) * TileSpec::rows + n.row) * TileSpec::cols + n.col;
  }
  std::uint16_t at(NodeIndex n) const { return values[flat(n)]; }
  std::uint16_t& at(NodeIndex n) { return values[flat(n)]; }

  double time_s() const { return static_cast<double>(timestamp_us) / 1e6; }

  friend bool operator==(const PressureFrame&, const PressureFrame&) = default;
};

/// Global grid coordinates (row, global column) to tile-local index and back.
inline NodeIndex node_from_grid(int row, int grid_col) {
  return {grid_col / TileSpec::cols, row, grid_col % TileSpec::cols};
}
inline int grid_col(NodeIndex n) { return n.tile * TileSpec::cols + n.col; }
inline NodeIndex node_from_flat(std::size_t i) {
  const auto col = static_cast<int>(i % TileSpec::cols);
  const auto rest = i / TileSpec::cols;
  return {static_cast<int>(rest / TileSpec::rows), static_cast<int>(rest % TileSpec::rows), col};
}

/// Linear calibration, 0 → 0 g and 4095 → 10 kg. Throws OutOfRangeError for raw > 4095.
double raw_to_force(int raw);
/// Inverse of raw_to_force, rounded to the nearest count and clipped to [0, 4095].
std::uint16_t force_to_raw(double grams);

/// Node center in walkway meters. Throws OutOfRangeError on bad indices.
Vec2 node_center(const WalkwayConfig& walkway, NodeIndex n);

/// Unchecked variant used in inner loops.
inline Vec2 node_center_unchecked(const WalkwayConfig& walkway, std::size_t flat_index) {
  const NodeIndex n = node_from_flat(flat_index);
  return {walkway.origin_m + n.tile * TileSpec::length_m + (n.col + 0.5) * TileSpec::pitch_m,
          (n.row + 0.5) * TileSpec::pitch_m};
}

/// One flag per node, same layout as PressureFrame::values.
using ContactMask = std::vector<std::uint8_t>;

/// Node active iff its force reaches the 50 g contact threshold.
ContactMask contact_mask(const PressureFrame& frame);

/// Throws OutOfRangeError when the frame does not match the walkway or holds
/// a value above 4095.
void validate_frame(const PressureFrame& frame, const WalkwayConfig& walkway);

}  // namespace strideway
