#include "strideway/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace strideway {

double BoundingBox::distance_to(const BoundingBox& o) const {
  const double dx = std::max({0.0, o.min.x - max.x, min.x - o.max.x});
  const double dy = std::max({0.0, o.min.y - max.y, min.y - o.max.y});
  return std::hypot(dx, dy);
}

void BoundingBox::expand(const BoundingBox& o) {
  min.x = std::min(min.x, o.min.x);
  min.y = std::min(min.y, o.min.y);
  max.x = std::max(max.x, o.max.x);
  max.y = std::max(max.y, o.max.y);
}

std::vector<Blob> segment_blobs(const ContactMask& mask, const PressureFrame& frame,
                                const WalkwayConfig& walkway) {
  std::vector<Blob> blobs;
  const std::size_t n = std::min(mask.size(), frame.values.size());
  const int rows = TileSpec::rows;
  const int gcols = frame.tile_count * TileSpec::cols;
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::uint32_t> stack;

  for (std::size_t start = 0; start < n; ++start) {
    if (!mask[start] || seen[start]) continue;
    Blob blob;
    seen[start] = 1;
    stack.assign(1, static_cast<std::uint32_t>(start));
    while (!stack.empty()) {
      const std::uint32_t cur = stack.back();
      stack.pop_back();
      blob.nodes.push_back(cur);
      const NodeIndex ni = node_from_flat(cur);
      const int gr = ni.row;
      const int gc = grid_col(ni);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int r = gr + dr;
          const int c = gc + dc;
          if (r < 0 || r >= rows || c < 0 || c >= gcols) continue;
          const std::size_t j = PressureFrame::flat(node_from_grid(r, c));
          if (j < n && mask[j] && !seen[j]) {
            seen[j] = 1;
            stack.push_back(static_cast<std::uint32_t>(j));
          }
        }
      }
    }
    std::sort(blob.nodes.begin(), blob.nodes.end());

    double sx = 0.0;
    double sy = 0.0;
    bool first = true;
    blob.forces.reserve(blob.nodes.size());
    blob.points.reserve(blob.nodes.size());
    for (const std::uint32_t idx : blob.nodes) {
      const double f = raw_to_force(frame.values[idx]);
      const Vec2 p = node_center_unchecked(walkway, idx);
      blob.forces.push_back(f);
      blob.points.push_back(p);
      blob.total_force_g += f;
      blob.peak_force_g = std::max(blob.peak_force_g, f);
      sx += f * p.x;
      sy += f * p.y;
      if (first) {
        blob.bbox = {p, p};
        first = false;
      } else {
        blob.bbox.expand({p, p});
      }
    }
    blob.cof = {sx / blob.total_force_g, sy / blob.total_force_g};
    blobs.push_back(std::move(blob));
  }
  return blobs;
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<FootCluster> cluster_feet(std::span<const Blob> blobs, double merge_distance_m) {
  std::vector<std::size_t> parent(blobs.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    for (std::size_t j = i + 1; j < blobs.size(); ++j) {
      if (blobs[i].bbox.distance_to(blobs[j].bbox) <= merge_distance_m) {
        const std::size_t a = find_root(parent, i);
        const std::size_t b = find_root(parent, j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }

  std::vector<FootCluster> clusters;
  std::vector<std::ptrdiff_t> slot(blobs.size(), -1);
  std::vector<Vec2> moments;
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    const std::size_t root = find_root(parent, i);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::ptrdiff_t>(clusters.size());
      clusters.emplace_back();
      clusters.back().bbox = blobs[i].bbox;
      moments.push_back({});
    }
    const auto k = static_cast<std::size_t>(slot[root]);
    FootCluster& c = clusters[k];
    const Blob& b = blobs[i];
    c.bbox.expand(b.bbox);
    c.total_force_g += b.total_force_g;
    moments[k].x += b.total_force_g * b.cof.x;
    moments[k].y += b.total_force_g * b.cof.y;
    c.forces.insert(c.forces.end(), b.forces.begin(), b.forces.end());
    c.points.insert(c.points.end(), b.points.begin(), b.points.end());
    c.blob_count += 1;
  }
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    clusters[k].cof = {moments[k].x / clusters[k].total_force_g,
                       moments[k].y / clusters[k].total_force_g};
  }
  return clusters;
}

std::vector<FootCluster> frame_clusters(const PressureFrame& frame, const WalkwayConfig& walkway,
                                        double merge_distance_m) {
  const auto blobs = segment_blobs(contact_mask(frame), frame, walkway);
  return cluster_feet(blobs, merge_distance_m);
}

std::optional<Vec2> center_of_force(std::span<const FootCluster> clusters) {
  double total = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& c : clusters) {
    total += c.total_force_g;
    sx += c.total_force_g * c.cof.x;
    sy += c.total_force_g * c.cof.y;
  }
  if (!(total > 0.0)) return std::nullopt;
  return Vec2{sx / total, sy / total};
}

std::optional<Vec2> center_of_force(const PressureFrame& frame, const WalkwayConfig& walkway) {
  const ContactMask mask = contact_mask(frame);
  double total = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const double f = raw_to_force(frame.values[i]);
    const Vec2 p = node_center_unchecked(walkway, i);
    total += f;
    sx += f * p.x;
    sy += f * p.y;
  }
  if (!(total > 0.0)) return std::nullopt;
  return Vec2{sx / total, sy / total};
}

// ---------------------------------------------------------------------------

Side FootTracker::alternate_from_history(std::size_t exclude) const {
  for (std::size_t i = tracks_.size(); i-- > 0;) {
    if (i == exclude) continue;
    if (tracks_[i].side != Side::unknown) return opposite(tracks_[i].side);
  }
  return Side::unknown;
}

void FootTracker::update(double time, std::span<const FootCluster> clusters) {
  if (started_ && !(time > last_time_)) {
    throw std::invalid_argument("FootTracker: timestamps must be strictly increasing");
  }
  started_ = true;
  last_time_ = time;

  std::vector<std::size_t> usable;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].total_force_g >= cfg_.min_cluster_force_g) usable.push_back(c);
  }

  // Greedy global nearest-neighbour matching inside the gate.
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < active_.size(); ++a) {
    const Vec2 last = tracks_[active_[a]].samples.back().cof;
    for (std::size_t u = 0; u < usable.size(); ++u) {
      const Vec2 p = clusters[usable[u]].cof;
      const double d = std::hypot(p.x - last.x, p.y - last.y);
      if (d <= cfg_.gate_m) pairs.emplace_back(d, a, u);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::ptrdiff_t> track_match(active_.size(), -1);
  std::vector<bool> cluster_taken(usable.size(), false);
  for (const auto& [d, a, u] : pairs) {
    if (track_match[a] >= 0 || cluster_taken[u]) continue;
    track_match[a] = static_cast<std::ptrdiff_t>(u);
    cluster_taken[u] = true;
  }

  auto append = [&](FootTrack& t, const FootCluster& c) {
    t.samples.push_back({time, c.total_force_g, c.cof});
    if (c.total_force_g > t.peak_cluster.total_force_g) t.peak_cluster = c;
  };

  std::vector<std::size_t> still_active;
  for (std::size_t a = 0; a < active_.size(); ++a) {
    FootTrack& t = tracks_[active_[a]];
    if (track_match[a] >= 0) {
      append(t, clusters[usable[static_cast<std::size_t>(track_match[a])]]);
      still_active.push_back(active_[a]);
    } else {
      t.open = false;
    }
  }

  std::vector<std::size_t> fresh;
  for (std::size_t u = 0; u < usable.size(); ++u) {
    if (cluster_taken[u]) continue;
    FootTrack t;
    t.id = static_cast<int>(tracks_.size());
    append(t, clusters[usable[u]]);
    tracks_.push_back(std::move(t));
    fresh.push_back(tracks_.size() - 1);
    still_active.push_back(tracks_.size() - 1);
  }
  active_ = std::move(still_active);

  if (active_.size() == 1 && !fresh.empty()) {
    FootTrack& t = tracks_[active_.front()];
    t.side = alternate_from_history(active_.front());
    return;
  }
  if (active_.size() < 2) return;

  std::vector<std::size_t> known;
  std::vector<std::size_t> unknown;
  for (const std::size_t i : active_) {
    (tracks_[i].side == Side::unknown ? unknown : known).push_back(i);
  }
  if (unknown.empty()) return;
  if (known.size() == 1 && unknown.size() == 1) {
    tracks_[unknown.front()].side = opposite(tracks_[known.front()].side);
  } else if (known.empty() && unknown.size() == 2) {
    FootTrack& a = tracks_[unknown[0]];
    FootTrack& b = tracks_[unknown[1]];
    const bool a_lower = a.samples.back().cof.y < b.samples.back().cof.y;
    a.side = a_lower ? Side::right : Side::left;
    b.side = a_lower ? Side::left : Side::right;
  }
  // More than two concurrent contacts: leave unresolved, finish() back-fills.
}

std::vector<FootTrack> FootTracker::finish() {
  for (const std::size_t i : active_) tracks_[i].open = false;
  active_.clear();

  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    if (tracks_[i].side != Side::unknown) continue;
    Side resolved = Side::unknown;
    for (std::size_t j = i + 1; j < tracks_.size(); ++j) {
      if (tracks_[j].side != Side::unknown) {
        resolved = (j - i) % 2 == 0 ? tracks_[j].side : opposite(tracks_[j].side);
        break;
      }
    }
    if (resolved == Side::unknown) {
      for (std::size_t j = i; j-- > 0;) {
        if (tracks_[j].side != Side::unknown) {
          resolved = (i - j) % 2 == 0 ? tracks_[j].side : opposite(tracks_[j].side);
          break;
        }
      }
    }
    tracks_[i].side = resolved;
  }
  return tracks_;
}

std::vector<FootTrack> track_feet(std::span<const ClusterFrame> frames, TrackerConfig cfg) {
  FootTracker tracker(cfg);
  for (const auto& f : frames) tracker.update(f.time, f.clusters);
  return tracker.finish();
}

std::optional<double> force_distribution(double left_g, double right_g) {
  const double total = left_g + right_g;
  if (!(total > 0.0)) return std::nullopt;
  return left_g / total;
}

std::optional<double> force_distribution(std::span<const FootTrack> tracks, double time) {
  double left = 0.0;
  double right = 0.0;
  for (const auto& t : tracks) {
    if (t.side == Side::unknown || t.samples.empty()) continue;
    if (time < t.samples.front().time || time > t.samples.back().time) continue;
    const auto it = std::lower_bound(t.samples.begin(), t.samples.end(), time,
                                     [](const TrackSample& s, double v) { return s.time < v; });
    if (it == t.samples.end() || it->time != time) continue;
    (t.side == Side::left ? left : right) += it->total_force_g;
  }
  return force_distribution(left, right);
}

std::vector<ForceSample> foot_force_series(std::span<const FootTrack> tracks, Side side,
                                           std::span<const double> times) {
  std::vector<ForceSample> out(times.size());
  std::vector<Vec2> moment(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i].time = times[i];
  for (const auto& t : tracks) {
    if (t.side != side) continue;
    for (const auto& s : t.samples) {
      const auto it = std::lower_bound(times.begin(), times.end(), s.time);
      if (it == times.end() || *it != s.time) continue;
      const auto i = static_cast<std::size_t>(it - times.begin());
      out[i].force_g += s.total_force_g;
      moment[i].x += s.total_force_g * s.cof.x;
      moment[i].y += s.total_force_g * s.cof.y;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].force_g > 0.0) out[i].cof = {moment[i].x / out[i].force_g, moment[i].y / out[i].force_g};
  }
  return out;
}

}  // namespace strideway
