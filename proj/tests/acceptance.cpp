// Acceptance run: one PASS/FAIL line per criterion, each checked at its
// tolerance and within its wall-clock budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "strideway/errors.hpp"
#include "strideway/gait.hpp"
#include "strideway/heatmap.hpp"
#include "strideway/obstacle.hpp"
#include "strideway/pressure.hpp"
#include "strideway/session.hpp"
#include "strideway/sources.hpp"
#include "strideway/wire.hpp"
#include "support.hpp"

using namespace strideway;
namespace fs = std::filesystem;

namespace {

// Collects the first failed check of a criterion.
struct Check {
  std::string failure;
  void operator()(bool ok, const std::string& what) {
    if (!ok && failure.empty()) failure = what;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// 1 ---------------------------------------------------------------------------
std::string constants() {
  Check check;
  check(TileSpec::rows == 33 && TileSpec::cols == 48, "tile grid is not 33x48");
  check(TileSpec::pitch_m == 0.0127, "pitch is not 0.0127 m");
  check(std::abs(TileSpec::width_m - 16.5 * 0.0254) < 1e-12, "tile width is not 16.5 in");
  check(std::abs(TileSpec::length_m - 24 * 0.0254) < 1e-12, "tile length is not 24 in");
  check(raw_to_force(0) == 0.0, "raw_to_force(0) != 0 g");
  check(raw_to_force(4095) == 10000.0, "raw_to_force(4095) != 10000 g");
  check(TileSpec::contact_threshold_g == 50.0, "contact threshold is not 50 g");
  PressureFrame f(1, 0, 0);
  f.values[0] = 20;  // 48.8 g
  f.values[1] = 21;  // 51.3 g
  const ContactMask m = contact_mask(f);
  check(!m[0] && m[1], "contact mask does not switch at 50 g");
  const std::set<int> legal(kLegalHeightsMm.begin(), kLegalHeightsMm.end());
  check(legal == std::set<int>{25, 50, 75, 100, 125, 150, 190}, "legal heights differ");
  for (int mm = -10; mm <= 300; ++mm) check(is_legal_height(mm) == (legal.count(mm) == 1), "height check disagrees");
  return check.failure;
}

// 2 ---------------------------------------------------------------------------
std::string cof_oracle() {
  Check check;
  std::mt19937_64 rng(2024);
  WalkwayConfig w;
  w.tile_count = 4;
  w.origin_m = 0.75;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const PressureFrame f = testing::random_frame(rng, w.tile_count, 0.02 + 0.003 * i);
    const auto cof = center_of_force(f, w);
    const testing::BruteCof ref = testing::brute_force_cof(f, w.origin_m);
    check(cof.has_value() == (ref.total > 0.0), "COF presence disagrees");
    if (!cof) continue;
    worst = std::max({worst, testing::rel_err(cof->x, ref.x), testing::rel_err(cof->y, ref.y)});
  }
  check(worst <= 1e-9, fmt("worst relative error %.3g", worst));
  return check.failure;
}

// 3 ---------------------------------------------------------------------------
std::string gait_recovery() {
  Check check;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto t0 = std::chrono::steady_clock::now();
    SessionConfig cfg;
    cfg.duration_s = 60.0;
    cfg.obstacle.count = 0;
    cfg.seed = seed;
    ScenarioFile sc;
    sc.walker.speed_mps = 1.2;
    sc.walker.cadence_spm = 110.0;
    sc.walker.step_width_m = 0.15;
    sc.walker.body_mass_kg = 70.0;
    sc.walker.noise_seed = seed;
    SimulatedSource source(simulate_session(cfg, sc, {}));
    RunOptions opts;
    opts.session.live_metrics = false;
    const RunResult r = run_session(cfg, source, {}, opts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const GaitSummary& g = r.report.gait;
    const std::string tag = "seed " + std::to_string(seed) + ": ";
    check(secs < 10.0, tag + fmt("session took %.2f s", secs));
    if (!g.mean_speed || !g.cadence || !g.step_length_mean || !g.step_width_mean ||
        !r.report.single_support_force_g) {
      check(false, tag + "gait metrics missing");
      continue;
    }
    check(std::abs(*g.mean_speed - 1.2) <= 0.03 * 1.2, tag + fmt("speed %.4f", *g.mean_speed));
    check(std::abs(*g.cadence - 110.0) <= 2.0, tag + fmt("cadence %.3f", *g.cadence));
    check(std::abs(*g.step_length_mean - 1.2 * 60.0 / 110.0) <= 0.02,
          tag + fmt("step length %.4f", *g.step_length_mean));
    check(std::abs(*g.step_width_mean - 0.15) <= 0.01, tag + fmt("step width %.4f", *g.step_width_mean));
    check(std::abs(*r.report.single_support_force_g - 70000.0) <= 0.05 * 70000.0,
          tag + fmt("single-support force %.0f g", *r.report.single_support_force_g));
  }
  return check.failure;
}

// 4 ---------------------------------------------------------------------------
std::vector<ForceSample> pulse_series(double t_end, double width, double period, double first) {
  std::vector<ForceSample> s;
  for (int i = 0; i * 0.01 < t_end; ++i) {
    const double t = i * 0.01;
    double f = 0.0;
    for (double start = first; start < t_end; start += period) {
      if (t >= start - 1e-9 && t < start + width - 1e-9) f = 50000.0;
    }
    s.push_back({t, f, f > 0.0 ? Vec2{1.0, 0.2} : Vec2{}});
  }
  return s;
}

std::string debounce() {
  Check check;
  const auto spikes = detect_events(pulse_series(10.0, 0.02, 0.3, 0.1), Side::left);
  check(spikes.empty(), std::to_string(spikes.size()) + " events from 20 ms spikes");
  const auto pulses = detect_events(pulse_series(10.5, 0.6, 1.5, 0.5), Side::left);
  const std::size_t expected = 2 * 7;  // starts at 0.5, 2.0, ..., 9.5
  check(pulses.size() == expected, std::to_string(pulses.size()) + " events from 7 pulses");
  for (std::size_t k = 0; k + 1 < pulses.size(); k += 2) {
    check(pulses[k].kind == ContactKind::on && pulses[k + 1].kind == ContactKind::off, "pairs out of order");
    check(std::abs(pulses[k + 1].time - pulses[k].time - 0.6) < 1e-9, "pulse duration wrong");
  }
  return check.failure;
}

// 5 ---------------------------------------------------------------------------
std::string art_analytic() {
  Check check;
  const double rate = 90.0;
  for (double d : {1.5, 2.0, 2.4, 3.0}) {
    for (double v : {1.0, 1.2}) {
      SessionConfig cfg;
      cfg.obstacle.mode = ObstacleMode::unanticipated;
      cfg.obstacle.count = 1;
      cfg.obstacle.spawn_distance_min_m = d;
      cfg.obstacle.spawn_distance_max_m = d;
      Session s(cfg, {}, {false});
      s.start();
      s.begin_walking();
      // walker starts well before the spawn point and walks past the obstacle
      const double x0 = s.obstacles()[0].x_position - d - 1.0;
      for (const PoseSample& p : testing::constant_speed_poses(x0, v, (d + 3.0) / v, rate, 0.3, 0.3)) s.ingest(p);
      s.end_walking(s.now());
      const SessionReport& r = *s.report();
      const std::string tag = fmt("d=%.1f v=%.1f: ", d, v);
      if (r.trials.size() != 1 || !r.trials[0].art) {
        check(false, tag + "no ART");
        continue;
      }
      const double art = *r.trials[0].art;
      check(art >= 0.0, tag + "negative ART");
      check(std::abs(art - d / v) <= 1.0 / rate + 1e-6, tag + fmt("ART %.6f vs %.6f", art, d / v));
    }
  }
  return check.failure;
}

// 6 ---------------------------------------------------------------------------
std::string clearance() {
  Check check;
  for (double apex : {0.08, 0.15}) {
    SessionConfig cfg;
    cfg.walkway.tile_count = 10;
    cfg.obstacle.count = 2;
    cfg.obstacle.height_mm = 100;
    ScenarioFile sc;
    sc.scenario.kind = ScenarioKind::trip;
    sc.scenario.obstacle_index = 1;
    sc.scenario.apex_override_m = apex;
    SimulatedSource source(simulate_session(cfg, sc, {}));
    RunOptions opts;
    opts.session.live_metrics = false;
    const RunResult r = run_session(cfg, source, {}, opts);
    if (r.report.trials.size() != 2) {
      check(false, "trip run lost its trials");
      continue;
    }
    const TrialResult& t = r.report.trials[1];
    if (apex < 0.1) {
      check(!t.success, "apex 0.08 m counted as success");
      check(t.collision_foot.has_value(), "apex 0.08 m without a collision");
    } else {
      check(t.success, "apex 0.15 m failed");
      check(t.lead_clearance && std::abs(*t.lead_clearance - 0.05) <= 0.005,
            fmt("apex 0.15 m clearance %.4f", t.lead_clearance.value_or(-1.0)));
    }
  }

  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> z(0.05, 0.35);
  std::uniform_real_distribution<double> speed(0.5, 1.5);
  std::uniform_int_distribution<int> height(0, static_cast<int>(kLegalHeightsMm.size()) - 1);
  for (int sweep = 0; sweep < 100; ++sweep) {
    ObstacleSpec spec;
    spec.x_position = 2.0;
    spec.height = ObstacleHeight::from_mm(kLegalHeightsMm[static_cast<std::size_t>(height(rng))]);
    spec.spawn_time = 0.0;
    const double v = speed(rng);
    std::vector<PoseSample> poses;
    for (std::uint32_t i = 0; i * v / 90.0 < 2.5; ++i) {
      const double t = i / 90.0;
      const double x = 0.8 + v * t;
      poses.push_back({PoseStream::left_foot, i, {t, {x, 0.28, z(rng)}, 0.0}});
      poses.push_back({PoseStream::right_foot, i, {t, {x - 0.1, 0.13, z(rng)}, 0.0}});
    }
    const TrialResult r = check_crossing(poses, spec);
    for (const FootCrossing* f : {&r.left, &r.right}) {
      if (!f->clearance) {
        check(false, "sweep without an overlap");
        continue;
      }
      check(f->collision == (*f->clearance < 0.0), "collision disagrees with clearance sign");
    }
  }
  return check.failure;
}

// 7 ---------------------------------------------------------------------------
std::string scheduler() {
  Check check;
  const auto bank = load_default_sentence_bank();
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const PlaybackSchedule s = schedule_sentences(bank, seed, 60.0);
    std::set<int> ids;
    for (std::size_t k = 0; k < s.entries.size(); ++k) {
      const auto& e = s.entries[k];
      ids.insert(e.sentence_id);
      check(e.sentence_id >= 1 && e.sentence_id <= 45, "id outside the bank");
      check(e.start_s >= 0.0 && e.end_s() <= 60.0, "playback outside [0, 60)");
      for (std::size_t j = 0; j < k; ++j) {
        check(e.start_s >= s.entries[j].end_s() || e.end_s() <= s.entries[j].start_s, "overlapping playbacks");
      }
    }
    check(s.entries.size() == 7 && ids.size() == 7, "not seven distinct sentences");
    check(schedule_sentences(bank, seed, 60.0) == s, "same seed gave a different schedule");
  }
  return check.failure;
}

// 8 ---------------------------------------------------------------------------
std::string wire() {
  Check check;
  check(encoded_frame_size(1) == 3190 && encode_frame(PressureFrame(1, 0, 0)).size() == 3190,
        "1-tile frame is not 3190 bytes");
  std::mt19937_64 rng(8);
  for (int i = 0; i < 1000; ++i) {
    const int tiles = 1 + static_cast<int>(rng() % 6);
    const PressureFrame f = testing::random_frame(rng, tiles, 0.5, static_cast<std::uint32_t>(rng()), rng() >> 8);
    const auto bytes = encode_frame(f);
    const PressureFrame back = decode_frame(bytes);
    check(back == f && encode_frame(back) == bytes, "round trip differs");
  }
  std::vector<std::uint8_t> pose;
  encode_pose({PoseStream::head, 7, {1.5, {1.0, 0.2, 1.7}, 3.0}}, pose);
  const auto frame = encode_frame(testing::random_frame(rng, 1, 0.3, 1, 2));
  std::size_t typed = 0;
  for (int i = 0; i < 100000; ++i) {
    std::vector<std::uint8_t> b = (i % 4 == 3) ? pose : frame;
    switch (rng() % 4) {
      case 0: b[rng() % 22] = static_cast<std::uint8_t>(rng()); break;  // header byte
      case 1:
        for (int k = 0; k < 8; ++k) b[rng() % b.size()] = static_cast<std::uint8_t>(rng());
        break;
      case 2: b.resize(rng() % b.size()); break;
      case 3: b.push_back(static_cast<std::uint8_t>(rng())); break;
    }
    try {
      if (i % 4 == 3) {
        (void)decode_pose_stream(b);
      } else {
        (void)decode_frame(b);
      }
    } catch (const WireError& e) {
      ++typed;
      check(e.offset() <= b.size(), "error offset past the buffer");
    } catch (const std::exception& e) {
      check(false, std::string("untyped error: ") + e.what());
    }
  }
  check(typed > 50000, "fuzzing produced too few rejections");
  return check.failure;
}

// 9 ---------------------------------------------------------------------------
std::string determinism() {
  Check check;
  SessionConfig cfg;
  cfg.walkway.tile_count = 9;
  cfg.duration_s = 30.0;
  cfg.obstacle.count = 1;
  cfg.obstacle.mode = ObstacleMode::unanticipated;
  cfg.condition.cognitive = true;
  cfg.seed = 99;
  const auto bank = load_default_sentence_bank();
  SimulatedSource source(simulate_session(cfg, {}, bank));
  const RunResult r = run_session(cfg, source, bank);
  const std::string live = report_json(r.report);
  check(report_json(compute_report(r.recording)) == report_json(compute_report(r.recording)),
        "two computations differ");
  check(report_json(compute_report(r.recording)) == live, "live report differs from recompute");
  const fs::path dir = fs::temp_directory_path() / "strideway_acceptance_recording";
  fs::remove_all(dir);
  save_recording(dir, r.recording, r.report);
  check(report_json(compute_report(load_recording(dir))) == live, "reloaded recording differs");
  fs::remove_all(dir);
  return check.failure;
}

// 10 --------------------------------------------------------------------------
std::string heatmap() {
  Check check;
  SessionConfig cfg;
  cfg.walkway.tile_count = 9;
  cfg.obstacle.count = 0;
  const SimulationOutput out = simulate(WalkerParams{}, Scenario{}, cfg);
  const Heatmap m = aggregate_heatmap(out.frames, HeatmapAggregation::mean);
  check(m.width == 9 * 48 && m.height == 33, "image dimensions differ from the walkway grid");
  check(m.pixels.size() == static_cast<std::size_t>(m.width * m.height), "pixel count");
  long double sum_of_means = 0.0L;
  for (const auto& f : out.frames) {
    long double s = 0.0L;
    for (const auto v : f.values) s += v;
    sum_of_means += s / f.values.size();
  }
  const double mean_of_means = static_cast<double>(sum_of_means / out.frames.size());
  check(std::abs(m.pixel_mean - mean_of_means) <= 0.5,
        fmt("pixel mean %.4f vs node mean %.4f", m.pixel_mean, mean_of_means));
  return check.failure;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<std::string()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "model constants", 1.0, constants},
      {2, "COF oracle equivalence", 5.0, cof_oracle},
      {3, "closed-loop gait recovery", 50.0, gait_recovery},
      {4, "event-detection debounce", 1.0, debounce},
      {5, "ART analytic check", 5.0, art_analytic},
      {6, "clearance and collision", 5.0, clearance},
      {7, "dual-task scheduler", 5.0, scheduler},
      {8, "wire protocol", 30.0, wire},
      {9, "report determinism", 5.0, determinism},
      {10, "heatmap", 2.0, heatmap},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string failure;
    try {
      failure = c.run();
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (failure.empty() && secs > c.budget_s) failure = "over the time budget";
    const bool pass = failure.empty();
    failed += pass ? 0 : 1;
    std::printf("criterion %2d %s  %-28s %7.3f s (budget %.0f s)%s%s\n", c.id, pass ? "PASS" : "FAIL", c.name,
                secs, c.budget_s, pass ? "" : "  ", failure.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
