#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "strideway/errors.hpp"
#include "strideway/simulator.hpp"
#include "strideway/sources.hpp"

using namespace strideway;

namespace {

SessionConfig clean_config(int obstacles = 0, std::uint64_t seed = 1) {
  SessionConfig c;
  c.obstacle.count = obstacles;
  c.seed = seed;
  return c;
}

RunResult run(const SessionConfig& cfg, const ScenarioFile& sc) {
  SimulatedSource source(simulate_session(cfg, sc, {}));
  RunOptions opts;
  opts.session.live_metrics = false;
  return run_session(cfg, source, {}, opts);
}

}  // namespace

TEST_CASE("simulation is deterministic") {
  const SessionConfig cfg = clean_config(5);
  const auto a = simulate(WalkerParams{}, Scenario{}, cfg);
  const auto b = simulate(WalkerParams{}, Scenario{}, cfg);
  CHECK(a.frames == b.frames);
  CHECK(a.poses == b.poses);
  WalkerParams other;
  other.noise_seed = 2;
  CHECK_FALSE(simulate(other, Scenario{}, cfg).frames == a.frames);
}

TEST_CASE("streams are regular and time-ordered") {
  const auto out = simulate(WalkerParams{}, Scenario{}, clean_config());
  REQUIRE(out.frames.size() > 100);
  for (std::size_t i = 1; i < out.frames.size(); ++i) {
    CHECK(out.frames[i].seq == out.frames[i - 1].seq + 1);
    CHECK(out.frames[i].timestamp_us - out.frames[i - 1].timestamp_us == 10000);
  }
  for (std::size_t i = 1; i < out.poses.size(); ++i) CHECK(out.poses[i].pose.time >= out.poses[i - 1].pose.time);
  CHECK(out.poses.size() % 3 == 0);
  CHECK(out.frames.back().time_s() < out.end_time + 1e-9);
}

TEST_CASE("the walker stops at the end of the lane") {
  const auto out = simulate(WalkerParams{}, Scenario{}, clean_config());
  // 24 tiles = 14.63 m at 1.2 m/s, a little over 12 s
  CHECK(out.end_time > 10.0);
  CHECK(out.end_time < 13.0);
  const double lane = 24 * 48 * 0.0127;
  for (const auto& s : out.footsteps) {
    CHECK(s.x + 0.26 <= lane);
  }
}

TEST_CASE("footsteps alternate at the programmed length and width") {
  WalkerParams p;
  p.speed_mps = 1.0;
  p.cadence_spm = 100.0;
  p.step_width_m = 0.12;
  const auto out = simulate(p, Scenario{}, clean_config());
  REQUIRE(out.footsteps.size() > 8);
  for (std::size_t i = 1; i < out.footsteps.size(); ++i) {
    const auto& a = out.footsteps[i - 1];
    const auto& b = out.footsteps[i];
    CHECK(a.side != b.side);
    CHECK(b.x - a.x == doctest::Approx(0.6));
    CHECK(std::abs(b.y - a.y) == doctest::Approx(0.12));
    CHECK(b.contact_time - a.contact_time == doctest::Approx(0.6));
  }
}

TEST_CASE("pressure totals follow body mass") {
  WalkerParams p;
  p.noise_scale = 0.0;
  const auto out = simulate(p, Scenario{}, clean_config());
  double peak = 0.0;
  for (const auto& f : out.frames) {
    double total = 0.0;
    for (const auto v : f.values) {
      if (v >= 21) total += raw_to_force(v);
    }
    peak = std::max(peak, total);
  }
  CHECK(peak == doctest::Approx(70000.0).epsilon(0.02));
}

TEST_CASE("closed-loop gait recovery") {
  for (std::uint64_t seed : {1, 2, 3}) {
    ScenarioFile sc;
    sc.walker.noise_seed = seed;
    const RunResult r = run(clean_config(0, seed), sc);
    const GaitSummary& g = r.report.gait;
    REQUIRE(g.mean_speed);
    CHECK(*g.mean_speed == doctest::Approx(1.2).epsilon(0.03));
    CHECK(std::abs(*g.cadence - 110.0) <= 2.0);
    CHECK(std::abs(*g.step_length_mean - 1.2 * 60.0 / 110.0) <= 0.02);
    CHECK(std::abs(*g.step_width_mean - 0.15) <= 0.01);
    REQUIRE(r.report.single_support_force_g);
    CHECK(*r.report.single_support_force_g == doctest::Approx(70000.0).epsilon(0.05));
  }
}

TEST_CASE("recovery holds away from the defaults") {
  ScenarioFile sc;
  sc.walker.speed_mps = 0.9;
  sc.walker.cadence_spm = 96.0;
  sc.walker.step_width_m = 0.2;
  sc.walker.body_mass_kg = 55.0;
  const RunResult r = run(clean_config(), sc);
  const GaitSummary& g = r.report.gait;
  CHECK(*g.mean_speed == doctest::Approx(0.9).epsilon(0.03));
  CHECK(std::abs(*g.cadence - 96.0) <= 2.0);
  CHECK(std::abs(*g.step_length_mean - 0.5625) <= 0.02);
  CHECK(std::abs(*g.step_width_mean - 0.2) <= 0.01);
  CHECK(*r.report.single_support_force_g == doctest::Approx(55000.0).epsilon(0.05));
}

TEST_CASE("obstacles are stepped over with the programmed margin") {
  const RunResult r = run(clean_config(5), ScenarioFile{});
  REQUIRE(r.report.trials.size() == 5);
  for (const auto& t : r.report.trials) {
    CHECK(t.crossed);
    CHECK(t.success);
    REQUIRE(t.lead_clearance);
    CHECK(*t.lead_clearance == doctest::Approx(0.10).epsilon(0.05));
  }
  CHECK(*r.report.success_rate == 1.0);
}

TEST_CASE("trip scenario apex sets the clearance") {
  for (double apex : {0.08, 0.15}) {
    ScenarioFile sc;
    sc.scenario.kind = ScenarioKind::trip;
    sc.scenario.obstacle_index = 1;
    sc.scenario.apex_override_m = apex;
    SessionConfig cfg = clean_config(3);
    cfg.obstacle.height_mm = 100;
    const RunResult r = run(cfg, sc);
    REQUIRE(r.report.trials.size() == 3);
    const TrialResult& t = r.report.trials[1];
    if (apex < 0.1) {
      CHECK_FALSE(t.success);
      CHECK(t.collision_foot.has_value());
    } else {
      CHECK(t.success);
      REQUIRE(t.lead_clearance);
      CHECK(std::abs(*t.lead_clearance - 0.05) <= 0.005);
    }
    CHECK(r.report.trials[0].success);
    CHECK(r.report.trials[2].success);
  }
}

TEST_CASE("hesitation slows the approach") {
  ScenarioFile sc;
  sc.scenario.kind = ScenarioKind::hesitation;
  sc.scenario.speed_factor = 0.6;
  const RunResult slow = run(clean_config(3), sc);
  const RunResult base = run(clean_config(3), ScenarioFile{});
  CHECK(*slow.report.gait.mean_speed < *base.report.gait.mean_speed - 0.05);
  CHECK(*slow.report.trials[0].crossing_speed < *base.report.trials[0].crossing_speed);
}

TEST_CASE("load modifiers compose") {
  WalkerParams p;
  LoadCondition c;
  CHECK(apply_load_modifiers(p, c).speed_mps == p.speed_mps);
  c.sound = SoundLevel::busy;
  c.visual = VisualLoad::busy;
  c.cognitive = true;
  const WalkerParams q = apply_load_modifiers(p, c);
  CHECK(q.speed_mps == doctest::Approx(1.2 * 0.95 * 0.97 * 0.92));
  CHECK(q.cadence_spm == p.cadence_spm);
  CHECK(q.step_length_sd_m > 0.0);
}

TEST_CASE("invalid walker and scenario parameters") {
  WalkerParams p;
  p.speed_mps = -1.0;
  CHECK_THROWS_AS(p.validate(WalkwayConfig{}), ConfigError);
  CHECK_THROWS_AS(parse_scenario_kind("stumble"), ConfigError);
  Scenario s;
  s.kind = ScenarioKind::trip;
  s.obstacle_index = 9;
  s.apex_override_m = 0.1;
  CHECK_THROWS_AS(s.validate(5), ConfigError);
  s.obstacle_index = 0;
  s.apex_override_m = 0.0;
  CHECK_THROWS_AS(s.validate(5), ConfigError);
}
