#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "strideway/walkway.hpp"

namespace strideway {

struct BoundingBox {
  Vec2 min;
  Vec2 max;

  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  /// Euclidean gap between two rectangles, 0 when they touch or overlap.
  double distance_to(const BoundingBox& other) const;
  void expand(const BoundingBox& other);
};

/// An 8-connected region of active nodes.
struct Blob {
  std::vector<std::uint32_t> nodes;  // flat indices into PressureFrame::values
  std::vector<double> forces;        // grams, parallel to nodes
  std::vector<Vec2> points;          // node centers, parallel to nodes
  double total_force_g = 0.0;
  double peak_force_g = 0.0;
  Vec2 cof;
  BoundingBox bbox;
};

/// One or more blobs agglomerated into a single foot contact.
struct FootCluster {
  std::vector<Vec2> points;     // node centers
  std::vector<double> forces;   // grams, parallel to points
  double total_force_g = 0.0;
  Vec2 cof;
  BoundingBox bbox;
  int blob_count = 0;
};

std::vector<Blob> segment_blobs(const ContactMask& mask, const PressureFrame& frame,
                                const WalkwayConfig& walkway);

/// Blobs whose bounding boxes lie within `merge_distance_m` of each other
/// (transitively) become one cluster. Output order follows the first blob of
/// each cluster.
std::vector<FootCluster> cluster_feet(std::span<const Blob> blobs, double merge_distance_m = 0.10);

/// Mask, segment and cluster in one pass.
std::vector<FootCluster> frame_clusters(const PressureFrame& frame, const WalkwayConfig& walkway,
                                        double merge_distance_m = 0.10);

/// Force-weighted mean over clusters; empty when nothing is in contact.
std::optional<Vec2> center_of_force(std::span<const FootCluster> clusters);
/// Force-weighted mean over every active node of the frame.
std::optional<Vec2> center_of_force(const PressureFrame& frame, const WalkwayConfig& walkway);

struct TrackSample {
  double time = 0.0;
  double total_force_g = 0.0;
  Vec2 cof;
};

struct FootTrack {
  int id = 0;
  Side side = Side::unknown;
  std::vector<TrackSample> samples;
  FootCluster peak_cluster;  // cluster at the frame of highest total force
  bool open = true;
};

struct TrackerConfig {
  double gate_m = 0.30;
  /// Clusters lighter than this are ignored (isolated noisy nodes).
  double min_cluster_force_g = 200.0;
};

/// Sequential nearest-neighbour association of foot clusters across frames.
///
/// A track ends as soon as a frame has no cluster within the gate of its last
/// COF, so each stance phase becomes its own track. Sides are resolved by
/// mediolateral order while two tracks are concurrent (smaller y is the right
/// foot when walking toward +x) and propagated by alternation otherwise. A
/// side, once set, is never changed.
class FootTracker {
public:
  explicit FootTracker(TrackerConfig cfg = {}) : cfg_(cfg) {}

  void update(double time, std::span<const FootCluster> clusters);
  /// Closes open tracks and back-fills sides still unknown by alternation.
  std::vector<FootTrack> finish();

  const std::vector<FootTrack>& tracks() const { return tracks_; }
  std::size_t active_count() const { return active_.size(); }

private:
  Side alternate_from_history(std::size_t exclude) const;

  TrackerConfig cfg_;
  std::vector<FootTrack> tracks_;
  std::vector<std::size_t> active_;  // indices into tracks_
  double last_time_ = 0.0;
  bool started_ = false;
};

struct ClusterFrame {
  double time = 0.0;
  std::vector<FootCluster> clusters;
};

std::vector<FootTrack> track_feet(std::span<const ClusterFrame> frames, TrackerConfig cfg = {});

/// left / (left + right). Empty when neither foot carries force.
std::optional<double> force_distribution(double left_g, double right_g);
/// Left share at one timestamp, summing every track of each side sampled then.
std::optional<double> force_distribution(std::span<const FootTrack> tracks, double time);

struct ForceSample {
  double time = 0.0;
  double force_g = 0.0;
  Vec2 cof;  // meaningful only when force_g > 0
};

/// Per-side force series on the given timestamps, zero where the foot is
/// airborne. Tracks of unknown side are ignored.
std::vector<ForceSample> foot_force_series(std::span<const FootTrack> tracks, Side side,
                                           std::span<const double> times);

}  // namespace strideway
