#include "strideway/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "strideway/pressure.hpp"

namespace strideway {

namespace {

using nlohmann::ordered_json;

constexpr double kLoadedFootG = 2000.0;

struct Lifecycle {
  bool complete = false;
  bool aborted = false;
  std::optional<double> walk_end;
};

Lifecycle read_lifecycle(std::span<const SessionEvent> events) {
  Lifecycle lc;
  for (const SessionEvent& e : events) {
    if (e.kind != EventKind::state_change) continue;
    const std::string from = e.payload.value("from", "");
    const std::string to = e.payload.value("to", "");
    if (from == "walking" && !lc.walk_end) lc.walk_end = e.time;
    if (to == "complete") {
      lc.complete = true;
      lc.aborted = e.payload.value("aborted", false);
    }
  }
  return lc;
}

std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid))) / 2.0;
  }
  return m;
}

std::optional<double> mean_of(std::span<const double> v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::optional<double> mean_lead_clearance(const SessionReport& r) {
  std::vector<double> v;
  for (const TrialResult& t : r.trials) {
    if (t.crossed && t.lead_clearance) v.push_back(*t.lead_clearance);
  }
  return mean_of(v);
}

void add_flag(std::vector<std::string>& flags, const std::string& f) {
  if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
}

template <class T>
ordered_json opt(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json crossing_json(const FootCrossing& c) {
  ordered_json j;
  j["overlapped"] = c.overlapped;
  j["collision"] = c.collision;
  j["passed"] = c.passed;
  j["clearance_m"] = opt(c.clearance);
  j["collision_time"] = opt(c.collision_time);
  j["pass_time"] = opt(c.pass_time);
  j["reach_time"] = opt(c.reach_time);
  return j;
}

ordered_json side_json(const std::optional<Side>& s) {
  return s ? ordered_json(to_string(*s)) : ordered_json(nullptr);
}

}  // namespace

SessionReport compute_report(const Recording& rec, const SessionReport* baseline) {
  SessionReport r;
  r.engine_version = rec.engine_version;
  r.config = rec.config;
  const WalkwayConfig& walkway = rec.config.walkway;

  const Lifecycle lc = read_lifecycle(rec.events);
  r.complete = lc.complete && !lc.aborted;
  r.aborted = lc.aborted;
  if (lc.walk_end) {
    r.walk_duration_s = *lc.walk_end;
  } else if (!rec.frames.empty()) {
    r.walk_duration_s = rec.frames.back().time_s();
  }
  r.frame_count = rec.frames.size();

  // Plantar pressure: clusters per frame, feet tracked across frames.
  FootTracker tracker;
  std::vector<double> times;
  times.reserve(rec.frames.size());
  std::size_t crowded = 0;
  for (const PressureFrame& frame : rec.frames) {
    validate_frame(frame, walkway);
    const double t = frame.time_s();
    const std::vector<FootCluster> clusters = frame_clusters(frame, walkway);
    const auto heavy = std::count_if(clusters.begin(), clusters.end(), [](const FootCluster& c) {
      return c.total_force_g >= kLoadedFootG;
    });
    if (heavy > 2) ++crowded;
    tracker.update(t, clusters);
    times.push_back(t);
  }
  const std::vector<FootTrack> tracks = tracker.finish();

  const std::vector<ForceSample> left = foot_force_series(tracks, Side::left, times);
  const std::vector<ForceSample> right = foot_force_series(tracks, Side::right, times);
  std::vector<GaitEvent> events = detect_events(left, Side::left);
  const std::vector<GaitEvent> right_events = detect_events(right, Side::right);
  events.insert(events.end(), right_events.begin(), right_events.end());
  std::stable_sort(events.begin(), events.end(),
                   [](const GaitEvent& a, const GaitEvent& b) { return a.time < b.time; });
  const StepMetrics metrics = step_metrics(events);

  std::vector<SideForces> distribution;
  distribution.reserve(times.size());
  std::vector<double> shares;
  std::vector<double> single_support;
  for (std::size_t i = 0; i < times.size(); ++i) {
    distribution.push_back({times[i], left[i].force_g, right[i].force_g});
    if (auto s = force_distribution(left[i].force_g, right[i].force_g)) shares.push_back(*s);
    if ((left[i].force_g > 0.0) != (right[i].force_g > 0.0)) {
      single_support.push_back(left[i].force_g + right[i].force_g);
    }
  }
  r.left_share_mean = mean_of(shares);
  r.single_support_force_g = median(std::move(single_support));

  std::vector<SidedFootAngle> angles;
  bool unknown_side = false;
  bool low_confidence = false;
  for (const FootTrack& track : tracks) {
    if (track.peak_cluster.total_force_g < kLoadedFootG) continue;
    if (track.side == Side::unknown) {
      unknown_side = true;
      continue;
    }
    if (auto a = foot_angle(track.peak_cluster, track.side)) {
      low_confidence = low_confidence || a->low_confidence;
      angles.push_back({track.side, *a});
    }
  }

  double analyzed_s = 0.0;
  for (const StepRecord& s : metrics.steps) analyzed_s += s.duration;
  r.gait = gait_summary(metrics, events, distribution, angles, analyzed_s);

  // Head kinematics.
  std::vector<Pose> head;
  for (const PoseSample& p : rec.poses) {
    if (p.stream == PoseStream::head) head.push_back(p.pose);
  }
  r.head = head_kinematics(head);

  // Obstacle trials, with spawn times as observed live.
  std::map<int, double> spawned;
  for (const SessionEvent& e : rec.events) {
    if (e.kind == EventKind::obstacle_spawn) spawned.emplace(e.payload.value("obstacle_id", -1), e.time);
  }
  std::vector<CrossingMonitor> monitors;
  for (ObstacleSpec spec : obstacle_schedule(rec.config)) {
    if (spec.mode == ObstacleMode::unanticipated) {
      auto it = spawned.find(spec.id);
      if (it == spawned.end()) {
        add_flag(r.flags, "obstacle_not_presented");
        continue;
      }
      spec.spawn_time = it->second;
    }
    monitors.emplace_back(spec);
  }
  for (const PoseSample& p : rec.poses) {
    for (CrossingMonitor& m : monitors) m.observe(p);
  }
  std::vector<double> arts;
  std::vector<double> head_arts;
  for (const CrossingMonitor& m : monitors) {
    TrialResult t = m.result();
    if (!t.crossed) add_flag(r.flags, "obstacle_not_crossed");
    if (!t.reliable) add_flag(r.flags, "unreliable_crossing");
    r.art.per_trial.push_back(t.art);
    if (t.art) arts.push_back(*t.art);
    if (t.art_head) head_arts.push_back(*t.art_head);
    r.trials.push_back(std::move(t));
  }
  r.success_rate = success_rate(r.trials);
  r.art.mean = mean_of(arts);
  if (!arts.empty()) r.art.min = *std::min_element(arts.begin(), arts.end());
  r.art.head_mean = mean_of(head_arts);

  // Number recall.
  if (rec.config.condition.cognitive) {
    RecallReport recall;
    bool submitted = false;
    for (const SessionEvent& e : rec.events) {
      if (e.kind == EventKind::sentence_start) {
        for (const auto& n : e.payload.value("numbers", ordered_json::array())) {
          recall.presented.push_back(n.get<int>());
        }
      } else if (e.kind == EventKind::recall_submitted) {
        submitted = true;
        recall.reported = e.payload.value("numbers", std::vector<int>{});
      }
    }
    if (!submitted) {
      add_flag(r.flags, "recall_missing");
    } else if (auto score = score_recall(recall.presented, recall.reported)) {
      recall.score = *score;
      r.recall = std::move(recall);
    } else {
      add_flag(r.flags, "no_sentences_presented");
    }
  }

  if (r.aborted) add_flag(r.flags, "aborted");
  if (!r.complete) add_flag(r.flags, "incomplete");
  for (const SessionEvent& e : rec.events) {
    if (e.kind == EventKind::stream_gap) add_flag(r.flags, "stream_gap");
  }
  for (const std::string& w : walkway.warnings()) add_flag(r.flags, "walkway: " + w);
  if (r.trials.empty()) add_flag(r.flags, "no_obstacle_trials");
  if (rec.frames.empty()) add_flag(r.flags, "no_frames");
  if (metrics.steps.size() < 2) add_flag(r.flags, "too_few_steps");
  if (crowded > 0) add_flag(r.flags, "more_than_two_contacts");
  if (unknown_side) add_flag(r.flags, "unknown_foot_side");
  if (low_confidence) add_flag(r.flags, "low_confidence_foot_angle");

  if (baseline) r.dual_task_costs = compare_sessions(*baseline, r);
  return r;
}

CostTable compare_sessions(const SessionReport& baseline, const SessionReport& loaded) {
  CostTable t;
  t.baseline_participant = baseline.config.participant;
  t.baseline_seed = baseline.config.seed;

  auto row = [&](std::string metric, bool higher_is_better, std::optional<double> b,
                 std::optional<double> v) {
    CostRow c{std::move(metric), higher_is_better, b, v, std::nullopt};
    if (b && v) {
      if (auto cost = dual_task_cost(*b, *v)) c.cost_percent = higher_is_better ? *cost : -*cost;
    }
    t.rows.push_back(std::move(c));
  };
  row("mean_speed_mps", true, baseline.gait.mean_speed, loaded.gait.mean_speed);
  row("step_length_mean_m", true, baseline.gait.step_length_mean, loaded.gait.step_length_mean);
  row("step_length_sd_m", false, baseline.gait.step_length_sd, loaded.gait.step_length_sd);
  row("cadence_spm", true, baseline.gait.cadence, loaded.gait.cadence);
  row("success_rate", true, baseline.success_rate, loaded.success_rate);
  row("lead_clearance_m", true, mean_lead_clearance(baseline), mean_lead_clearance(loaded));
  row("art_mean_s", true, baseline.art.mean, loaded.art.mean);

  if (!(baseline.config.walkway == loaded.config.walkway)) {
    t.warnings.push_back("walkway configuration differs from baseline");
  }
  if (!(baseline.config.obstacle == loaded.config.obstacle)) {
    t.warnings.push_back("obstacle configuration differs from baseline");
  }
  if (baseline.config.condition.cognitive) {
    t.warnings.push_back("baseline session carried a cognitive load");
  }
  if (!baseline.complete) t.warnings.push_back("baseline session is incomplete");
  return t;
}

ordered_json report_to_json(const SessionReport& r) {
  ordered_json j;
  j["engine_version"] = r.engine_version;
  j["participant"] = r.config.participant;
  j["seed"] = r.config.seed;
  j["complete"] = r.complete;
  j["aborted"] = r.aborted;
  j["walk_duration_s"] = r.walk_duration_s;
  j["frame_count"] = r.frame_count;
  j["condition"] = {{"sound", to_string(r.config.condition.sound)},
                    {"visual", to_string(r.config.condition.visual)},
                    {"cognitive", r.config.condition.cognitive}};

  const GaitSummary& g = r.gait;
  ordered_json gait;
  gait["step_count"] = g.step_count;
  gait["mean_speed_mps"] = opt(g.mean_speed);
  gait["cadence_spm"] = opt(g.cadence);
  gait["step_length_mean_m"] = opt(g.step_length_mean);
  gait["step_length_sd_m"] = opt(g.step_length_sd);
  gait["step_width_mean_m"] = opt(g.step_width_mean);
  gait["step_width_sd_m"] = opt(g.step_width_sd);
  gait["stride_length_mean_m"] = opt(g.stride_length_mean);
  gait["stance_time_mean_s"] = opt(g.stance_time_mean);
  gait["foot_angle_left_deg"] = opt(g.foot_angle_left);
  gait["foot_angle_right_deg"] = opt(g.foot_angle_right);
  gait["symmetry_index"] = opt(g.symmetry_index);
  gait["left_share_mean"] = opt(r.left_share_mean);
  gait["single_support_force_g"] = opt(r.single_support_force_g);
  j["gait"] = gait;

  if (r.head) {
    j["head"] = {{"path_length_m", r.head->path_length},
                 {"mean_speed_mps", r.head->mean_speed},
                 {"rms_ml_m", r.head->rms_ml},
                 {"rms_vertical_m", r.head->rms_vertical},
                 {"yaw_range_deg", r.head->yaw_range}};
  } else {
    j["head"] = nullptr;
  }

  ordered_json trials = ordered_json::array();
  for (const TrialResult& t : r.trials) {
    ordered_json tj;
    tj["obstacle_id"] = t.obstacle_id;
    tj["mode"] = to_string(t.mode);
    tj["height_mm"] = t.height_mm;
    tj["crossed"] = t.crossed;
    tj["success"] = t.success;
    tj["collision_foot"] = side_json(t.collision_foot);
    tj["lead_foot"] = side_json(t.lead_foot);
    tj["lead_clearance_m"] = opt(t.lead_clearance);
    tj["trail_clearance_m"] = opt(t.trail_clearance);
    tj["art_s"] = opt(t.art);
    tj["art_head_s"] = opt(t.art_head);
    tj["crossing_speed_mps"] = opt(t.crossing_speed);
    tj["reliable"] = t.reliable;
    tj["left"] = crossing_json(t.left);
    tj["right"] = crossing_json(t.right);
    trials.push_back(std::move(tj));
  }
  j["obstacles"] = {{"success_rate", opt(r.success_rate)},
                    {"art_mean_s", opt(r.art.mean)},
                    {"art_min_s", opt(r.art.min)},
                    {"art_head_mean_s", opt(r.art.head_mean)},
                    {"trials", trials}};

  if (r.recall) {
    j["recall"] = {{"presented", r.recall->presented},
                   {"reported", r.recall->reported},
                   {"correct", r.recall->score.correct},
                   {"total", r.recall->score.total},
                   {"accuracy", r.recall->score.accuracy},
                   {"in_order", r.recall->score.in_order}};
  } else {
    j["recall"] = nullptr;
  }

  if (r.dual_task_costs) {
    ordered_json rows = ordered_json::array();
    for (const CostRow& c : r.dual_task_costs->rows) {
      rows.push_back({{"metric", c.metric},
                      {"higher_is_better", c.higher_is_better},
                      {"baseline", opt(c.baseline)},
                      {"value", opt(c.value)},
                      {"cost_percent", opt(c.cost_percent)}});
    }
    j["dual_task_costs"] = {{"baseline_participant", r.dual_task_costs->baseline_participant},
                            {"baseline_seed", r.dual_task_costs->baseline_seed},
                            {"rows", rows},
                            {"warnings", r.dual_task_costs->warnings}};
  } else {
    j["dual_task_costs"] = nullptr;
  }
  j["flags"] = r.flags;
  return j;
}

std::string report_json(const SessionReport& r) { return report_to_json(r).dump(2) + "\n"; }

std::string report_summary(const SessionReport& r) {
  std::ostringstream out;
  auto num = [](const std::optional<double>& v, int precision = 3) {
    if (!v) return std::string("n/a");
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(precision);
    s << *v;
    return s.str();
  };
  out << "session " << (r.config.participant.empty() ? "-" : r.config.participant) << " seed "
      << r.config.seed << (r.complete ? " complete" : " incomplete") << "\n";
  out << "  walk " << num(r.walk_duration_s, 2) << " s, " << r.frame_count << " frames\n";
  out << "  steps " << r.gait.step_count << ", speed " << num(r.gait.mean_speed) << " m/s, cadence "
      << num(r.gait.cadence, 1) << " steps/min\n";
  out << "  step length " << num(r.gait.step_length_mean) << " m (sd " << num(r.gait.step_length_sd)
      << "), width " << num(r.gait.step_width_mean) << " m\n";
  if (!r.trials.empty()) {
    int ok = 0;
    int crossed = 0;
    for (const TrialResult& t : r.trials) {
      crossed += t.crossed;
      ok += t.success;
    }
    out << "  obstacles " << ok << "/" << crossed << " cleared, success rate " << num(r.success_rate)
        << ", ART mean " << num(r.art.mean) << " s\n";
  }
  if (r.recall) {
    out << "  recall " << r.recall->score.correct << "/" << r.recall->score.total << " ("
        << num(r.recall->score.accuracy) << ")\n";
  }
  if (r.dual_task_costs) {
    out << "  dual-task cost vs baseline:\n";
    for (const CostRow& c : r.dual_task_costs->rows) {
      out << "    " << c.metric << ": " << num(c.cost_percent, 1)
          << (c.cost_percent ? " %" : " (unavailable)") << "\n";
    }
    for (const std::string& w : r.dual_task_costs->warnings) out << "    warning: " << w << "\n";
  }
  for (const std::string& f : r.flags) out << "  flag: " << f << "\n";
  return out.str();
}

}  // namespace strideway
