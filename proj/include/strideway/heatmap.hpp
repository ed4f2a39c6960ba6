#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "strideway/walkway.hpp"

namespace strideway {

enum class HeatmapAggregation : std::uint8_t { mean, max };

const char* to_string(HeatmapAggregation a);
HeatmapAggregation parse_heatmap_aggregation(const std::string& s);

/// Walkway-shaped image: one pixel per node, x along the lane (global
/// column), y across it (row). Pixel values are raw counts.
struct Heatmap {
  int width = 0;   // tile_count · 48
  int height = 0;  // 33
  HeatmapAggregation aggregation = HeatmapAggregation::max;
  std::size_t frame_count = 0;
  std::vector<std::uint16_t> pixels;  // row-major, height × width
  std::uint16_t min = 0;
  std::uint16_t max = 0;
  double pixel_mean = 0.0;
  double node_mean = 0.0;  // unrounded mean of the per-frame node means

  std::uint16_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// Mean pixels are rounded to the nearest count. Throws std::invalid_argument
/// for an empty frame set or frames of differing tile counts.
Heatmap aggregate_heatmap(std::span<const PressureFrame> frames, HeatmapAggregation aggregation);

/// Binary 16-bit portable graymap (P5, maxval 4095, big-endian samples).
void write_pgm(const Heatmap& map, std::ostream& out);
std::string heatmap_sidecar(const Heatmap& map, const WalkwayConfig& walkway);

/// Writes `image` and `<image stem>.json` next to it; returns the sidecar path.
std::filesystem::path export_heatmap(std::span<const PressureFrame> frames,
                                     HeatmapAggregation aggregation, const WalkwayConfig& walkway,
                                     const std::filesystem::path& image);

}  // namespace strideway
