#include "strideway/walkway.hpp"

#include <cmath>
#include <sstream>

#include "strideway/errors.hpp"

namespace strideway {

namespace {

constexpr double kMinLaneLength = 5.0;
constexpr double kMaxLaneLength = 15.0;

// Smallest raw count whose calibrated force reaches the contact threshold.
int contact_raw_floor() {
  static const int floor = [] {
    int r = 0;
    while (raw_to_force(r) < TileSpec::contact_threshold_g) ++r;
    return r;
  }();
  return floor;
}

}  // namespace

const char* to_string(Side s) {
  switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::unknown: break;
  }
  return "unknown";
}

Side opposite(Side s) {
  if (s == Side::left) return Side::right;
  if (s == Side::right) return Side::left;
  return Side::unknown;
}

void WalkwayConfig::validate() const {
  if (tile_count < 1) throw ConfigError("walkway.tile_count", "must be at least 1");
  if (tile_count > 255) throw ConfigError("walkway.tile_count", "wire format carries at most 255 tiles");
  if (!std::isfinite(origin_m)) throw ConfigError("walkway.origin_m", "must be finite");
}

std::vector<std::string> WalkwayConfig::warnings() const {
  std::vector<std::string> out;
  const double len = length();
  if (len < kMinLaneLength || len > kMaxLaneLength) {
    std::ostringstream os;
    os << "walkway length " << len << " m is outside the 5-15 m range";
    out.push_back(os.str());
  }
  return out;
}

double raw_to_force(int raw) {
  if (raw < 0 || raw > TileSpec::raw_max) {
    throw OutOfRangeError("raw value " + std::to_string(raw) + " outside [0, 4095]");
  }
  return static_cast<double>(raw) * TileSpec::force_max_g / TileSpec::raw_max;
}

std::uint16_t force_to_raw(double grams) {
  if (!(grams > 0.0)) return 0;
  const double raw = std::round(grams * TileSpec::raw_max / TileSpec::force_max_g);
  return raw >= TileSpec::raw_max ? TileSpec::raw_max : static_cast<std::uint16_t>(raw);
}

Vec2 node_center(const WalkwayConfig& walkway, NodeIndex n) {
  if (n.tile < 0 || n.tile >= walkway.tile_count || n.row < 0 || n.row >= TileSpec::rows ||
      n.col < 0 || n.col >= TileSpec::cols) {
    std::ostringstream os;
    os << "node (" << n.tile << "," << n.row << "," << n.col << ") outside a "
       << walkway.tile_count << "-tile walkway";
    throw OutOfRangeError(os.str());
  }
  return node_center_unchecked(walkway, PressureFrame::flat(n));
}

ContactMask contact_mask(const PressureFrame& frame) {
  const int floor = contact_raw_floor();
  ContactMask mask(frame.values.size(), 0);
  for (std::size_t i = 0; i < frame.values.size(); ++i) {
    mask[i] = frame.values[i] >= floor ? 1 : 0;
  }
  return mask;
}

void validate_frame(const PressureFrame& frame, const WalkwayConfig& walkway) {
  if (frame.tile_count != walkway.tile_count || frame.values.size() != walkway.node_count()) {
    throw OutOfRangeError("frame holds " + std::to_string(frame.values.size()) +
                          " nodes, walkway expects " + std::to_string(walkway.node_count()));
  }
  for (std::size_t i = 0; i < frame.values.size(); ++i) {
    if (frame.values[i] > TileSpec::raw_max) {
      throw OutOfRangeError("node " + std::to_string(i) + " raw value " +
                            std::to_string(frame.values[i]) + " exceeds 4095");
    }
  }
}

}  // namespace strideway
