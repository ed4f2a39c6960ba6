#include "strideway/gait.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace strideway {

namespace {

constexpr double kTimeEps = 1e-9;

double to_degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

// Fold an angle in degrees into (-90, 90]; an axis has no direction.
double fold_axis_angle(double deg) {
  while (deg <= -90.0) deg += 180.0;
  while (deg > 90.0) deg -= 180.0;
  return deg;
}

Vec2 mean_cof(std::span<const ForceSample> series, double from, double to) {
  double w = 0.0;
  Vec2 acc;
  for (const auto& s : series) {
    if (s.time < from - kTimeEps || s.time >= to - kTimeEps || !(s.force_g > 0.0)) continue;
    w += 1.0;
    acc.x += s.cof.x;
    acc.y += s.cof.y;
  }
  if (w == 0.0) return {};
  return {acc.x / w, acc.y / w};
}

}  // namespace

std::vector<GaitEvent> detect_events(std::span<const ForceSample> series, Side foot,
                                     const EventDetectorConfig& cfg) {
  std::vector<GaitEvent> events;
  bool in_contact = false;
  const std::size_t n = series.size();
  std::size_t i = 0;
  while (i < n) {
    auto holds = [&](std::size_t k) {
      return in_contact ? series[k].force_g < cfg.off_threshold_g
                        : series[k].force_g > cfg.on_threshold_g;
    };
    if (!holds(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && holds(j + 1)) ++j;
    if (series[j].time - series[i].time >= cfg.sustain_s - kTimeEps) {
      GaitEvent ev;
      ev.foot = foot;
      ev.time = series[i].time;
      if (!in_contact) {
        ev.kind = ContactKind::on;
        ev.anchor = mean_cof(series, ev.time, ev.time + cfg.anchor_window_s);
      } else {
        ev.kind = ContactKind::off;
        ev.anchor = mean_cof(series, ev.time - cfg.anchor_window_s, ev.time);
      }
      events.push_back(ev);
      in_contact = !in_contact;
    }
    i = j + 1;
  }
  return events;
}

StepMetrics step_metrics(std::span<const GaitEvent> events) {
  std::vector<GaitEvent> on;
  for (const auto& e : events) {
    if (e.kind == ContactKind::on && e.foot != Side::unknown) on.push_back(e);
  }
  std::stable_sort(on.begin(), on.end(),
                   [](const GaitEvent& a, const GaitEvent& b) { return a.time < b.time; });

  StepMetrics out;
  for (std::size_t k = 1; k < on.size(); ++k) {
    const GaitEvent& a = on[k - 1];
    const GaitEvent& b = on[k];
    if (a.foot == b.foot || !(b.time > a.time)) continue;
    StepRecord s;
    s.leading_foot = b.foot;
    s.time = b.time;
    s.length = b.anchor.x - a.anchor.x;
    s.width = std::abs(b.anchor.y - a.anchor.y);
    s.duration = b.time - a.time;
    s.speed = s.length / s.duration;
    out.steps.push_back(s);
  }
  for (const Side side : {Side::left, Side::right}) {
    const GaitEvent* prev = nullptr;
    for (const auto& e : on) {
      if (e.foot != side) continue;
      if (prev != nullptr && e.time > prev->time) {
        out.strides.push_back({side, e.time, e.anchor.x - prev->anchor.x, e.time - prev->time});
      }
      prev = &e;
    }
  }
  std::stable_sort(out.strides.begin(), out.strides.end(),
                   [](const StrideRecord& a, const StrideRecord& b) { return a.time < b.time; });
  return out;
}

std::optional<FootAngle> foot_angle(std::span<const Vec2> points, std::span<const double> weights,
                                    Side side, Vec2 walking_axis, double min_eigen_ratio) {
  const std::size_t n = std::min(points.size(), weights.size());
  if (n < 2) return std::nullopt;
  double w = 0.0;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w += weights[i];
    mx += weights[i] * points[i].x;
    my += weights[i] * points[i].y;
  }
  if (!(w > 0.0)) return std::nullopt;
  mx /= w;
  my /= w;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = points[i].x - mx;
    const double dy = points[i].y - my;
    sxx += weights[i] * dx * dx;
    syy += weights[i] * dy * dy;
    sxy += weights[i] * dx * dy;
  }
  sxx /= w;
  syy /= w;
  sxy /= w;

  const double half_trace = 0.5 * (sxx + syy);
  const double disc = std::sqrt(0.25 * (sxx - syy) * (sxx - syy) + sxy * sxy);
  const double major = half_trace + disc;
  const double minor = half_trace - disc;
  if (!(major > 1e-15)) return std::nullopt;  // all points coincide

  FootAngle out;
  if (minor > 0.0 && major / minor < min_eigen_ratio) {
    out.low_confidence = true;
    return out;
  }
  const double axis = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  double deg = fold_axis_angle(to_degrees(axis - std::atan2(walking_axis.y, walking_axis.x)));
  // Lateral is counter-clockwise of the walking axis for the left foot.
  if (side == Side::right) deg = fold_axis_angle(-deg);
  out.degrees = deg;
  return out;
}

std::optional<FootAngle> foot_angle(const FootCluster& cluster, Side side, Vec2 walking_axis) {
  return foot_angle(cluster.points, cluster.forces, side, walking_axis);
}

namespace {

// RMS of the residual after a least-squares linear fit against time.
double detrended_rms(std::span<const double> t, std::span<const double> v) {
  const auto n = static_cast<double>(t.size());
  double mt = 0.0;
  double mv = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    mv += v[i];
  }
  mt /= n;
  mv /= n;
  double stt = 0.0;
  double stv = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    stv += (t[i] - mt) * (v[i] - mv);
  }
  const double slope = stt > 0.0 ? stv / stt : 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = v[i] - (mv + slope * (t[i] - mt));
    ss += r * r;
  }
  return std::sqrt(ss / n);
}

}  // namespace

std::optional<HeadKinematics> head_kinematics(std::span<const Pose> head) {
  if (head.size() < 2) return std::nullopt;
  const double duration = head.back().time - head.front().time;
  if (!(duration > 0.0)) return std::nullopt;

  HeadKinematics k;
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> z;
  t.reserve(head.size());
  y.reserve(head.size());
  z.reserve(head.size());
  double yaw_min = head.front().yaw_deg;
  double yaw_max = yaw_min;
  for (std::size_t i = 0; i < head.size(); ++i) {
    const Pose& p = head[i];
    if (i > 0) {
      const Vec3& a = head[i - 1].position;
      k.path_length += std::sqrt((p.position.x - a.x) * (p.position.x - a.x) +
                                 (p.position.y - a.y) * (p.position.y - a.y) +
                                 (p.position.z - a.z) * (p.position.z - a.z));
    }
    t.push_back(p.time);
    y.push_back(p.position.y);
    z.push_back(p.position.z);
    yaw_min = std::min(yaw_min, p.yaw_deg);
    yaw_max = std::max(yaw_max, p.yaw_deg);
  }
  k.mean_speed = k.path_length / duration;
  k.rms_ml = detrended_rms(t, y);
  k.rms_vertical = detrended_rms(t, z);
  k.yaw_range = yaw_max - yaw_min;
  return k;
}

MeanSd mean_sd(std::span<const double> values) {
  MeanSd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  out.mean = mean;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

GaitSummary gait_summary(const StepMetrics& metrics, std::span<const GaitEvent> events,
                         std::span<const SideForces> distribution,
                         std::span<const SidedFootAngle> angles, double analyzed_s) {
  GaitSummary s;
  s.step_count = metrics.steps.size();

  if (!metrics.steps.empty()) {
    std::vector<double> lengths;
    std::vector<double> widths;
    double total_length = 0.0;
    double total_duration = 0.0;
    for (const auto& st : metrics.steps) {
      lengths.push_back(st.length);
      widths.push_back(st.width);
      total_length += st.length;
      total_duration += st.duration;
    }
    const MeanSd l = mean_sd(lengths);
    const MeanSd w = mean_sd(widths);
    s.step_length_mean = l.mean;
    s.step_length_sd = l.sd;
    s.step_width_mean = w.mean;
    s.step_width_sd = w.sd;
    if (total_duration > 0.0) s.mean_speed = total_length / total_duration;
    if (analyzed_s > 0.0) s.cadence = static_cast<double>(s.step_count) / analyzed_s * 60.0;
  }
  if (!metrics.strides.empty()) {
    std::vector<double> strides;
    for (const auto& st : metrics.strides) strides.push_back(st.length);
    s.stride_length_mean = mean_sd(strides).mean;
  }

  std::vector<double> stance;
  for (const Side side : {Side::left, Side::right}) {
    std::vector<GaitEvent> mine;
    for (const auto& e : events) {
      if (e.foot == side) mine.push_back(e);
    }
    std::stable_sort(mine.begin(), mine.end(),
                     [](const GaitEvent& a, const GaitEvent& b) { return a.time < b.time; });
    for (std::size_t k = 1; k < mine.size(); ++k) {
      if (mine[k - 1].kind == ContactKind::on && mine[k].kind == ContactKind::off) {
        stance.push_back(mine[k].time - mine[k - 1].time);
      }
    }
  }
  s.stance_time_mean = mean_sd(stance).mean;

  for (const Side side : {Side::left, Side::right}) {
    std::vector<double> vals;
    for (const auto& a : angles) {
      if (a.side == side && !a.angle.low_confidence) vals.push_back(a.angle.degrees);
    }
    (side == Side::left ? s.foot_angle_left : s.foot_angle_right) = mean_sd(vals).mean;
  }

  std::vector<double> asym;
  for (const auto& d : distribution) {
    if (d.left_g > 0.0 && d.right_g > 0.0) {
      asym.push_back(std::abs(d.left_g - d.right_g) / (d.left_g + d.right_g));
    }
  }
  s.symmetry_index = mean_sd(asym).mean;
  return s;
}

}  // namespace strideway
