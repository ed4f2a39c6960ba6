#include "strideway/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "strideway/errors.hpp"

namespace strideway {

const char* to_string(HeatmapAggregation a) { return a == HeatmapAggregation::mean ? "mean" : "max"; }

HeatmapAggregation parse_heatmap_aggregation(const std::string& s) {
  if (s == "mean") return HeatmapAggregation::mean;
  if (s == "max") return HeatmapAggregation::max;
  throw ConfigError("mode", "expected mean or max, got '" + s + "'");
}

Heatmap aggregate_heatmap(std::span<const PressureFrame> frames, HeatmapAggregation aggregation) {
  if (frames.empty()) throw std::invalid_argument("heatmap needs at least one frame");
  const int tiles = frames.front().tile_count;
  const std::size_t n = static_cast<std::size_t>(tiles) * TileSpec::nodes;

  std::vector<double> acc(n, 0.0);
  double node_mean_sum = 0.0;
  for (const auto& f : frames) {
    if (f.tile_count != tiles || f.values.size() != n) {
      throw std::invalid_argument("heatmap frames disagree on walkway size");
    }
    double frame_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = f.values[i];
      frame_sum += v;
      acc[i] = aggregation == HeatmapAggregation::max ? std::max(acc[i], v) : acc[i] + v;
    }
    node_mean_sum += frame_sum / static_cast<double>(n);
  }

  Heatmap map;
  map.width = tiles * TileSpec::cols;
  map.height = TileSpec::rows;
  map.aggregation = aggregation;
  map.frame_count = frames.size();
  map.node_mean = node_mean_sum / static_cast<double>(frames.size());
  map.pixels.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeIndex node = node_from_flat(i);
    double v = acc[i];
    if (aggregation == HeatmapAggregation::mean) v = std::round(v / static_cast<double>(frames.size()));
    map.pixels[static_cast<std::size_t>(node.row) * map.width + grid_col(node)] =
        static_cast<std::uint16_t>(v);
  }
  const auto [lo, hi] = std::minmax_element(map.pixels.begin(), map.pixels.end());
  map.min = *lo;
  map.max = *hi;
  double sum = 0.0;
  for (const auto p : map.pixels) sum += p;
  map.pixel_mean = sum / static_cast<double>(map.pixels.size());
  return map;
}

void write_pgm(const Heatmap& map, std::ostream& out) {
  out << "P5\n" << map.width << ' ' << map.height << '\n' << TileSpec::raw_max << '\n';
  for (const auto p : map.pixels) {
    out.put(static_cast<char>(p >> 8));
    out.put(static_cast<char>(p & 0xff));
  }
}

std::string heatmap_sidecar(const Heatmap& map, const WalkwayConfig& walkway) {
  nlohmann::ordered_json j;
  j["aggregation"] = to_string(map.aggregation);
  j["frames"] = map.frame_count;
  j["width_px"] = map.width;
  j["height_px"] = map.height;
  j["min"] = map.min;
  j["max"] = map.max;
  j["pixel_mean"] = map.pixel_mean;
  j["node_mean"] = map.node_mean;
  j["walkway"] = {{"tile_count", walkway.tile_count},
                  {"origin_m", walkway.origin_m},
                  {"length_m", walkway.length()},
                  {"width_m", walkway.width()},
                  {"pitch_m", TileSpec::pitch_m},
                  {"x_axis", "pixel column = walking direction"},
                  {"y_axis", "pixel row = mediolateral, row 0 at y = 0"}};
  return j.dump(2) + "\n";
}

std::filesystem::path export_heatmap(std::span<const PressureFrame> frames,
                                     HeatmapAggregation aggregation, const WalkwayConfig& walkway,
                                     const std::filesystem::path& image) {
  const Heatmap map = aggregate_heatmap(frames, aggregation);
  std::ofstream img(image, std::ios::binary);
  if (!img) throw std::runtime_error("cannot write " + image.string());
  write_pgm(map, img);
  auto sidecar = image;
  sidecar.replace_extension(".json");
  std::ofstream side(sidecar);
  if (!side) throw std::runtime_error("cannot write " + sidecar.string());
  side << heatmap_sidecar(map, walkway);
  return sidecar;
}

}  // namespace strideway
