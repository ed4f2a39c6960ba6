#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "strideway/gait.hpp"

using namespace strideway;

namespace {

constexpr double kDt = 0.01;

// Force series at 100 Hz: `level` inside any [start, start + width) pulse.
std::vector<ForceSample> pulses(double t_end, std::vector<std::pair<double, double>> on, double level,
                                Vec2 cof = {1.0, 0.2}) {
  std::vector<ForceSample> s;
  for (int i = 0; i * kDt < t_end; ++i) {
    const double t = i * kDt;
    double f = 0.0;
    for (auto [start, width] : on) {
      if (t >= start - 1e-9 && t < start + width - 1e-9) f = level;
    }
    s.push_back({t, f, f > 0.0 ? cof : Vec2{}});
  }
  return s;
}

GaitEvent on_event(Side foot, double t, double x, double y) {
  return {foot, ContactKind::on, t, {x, y}};
}

// Elliptical patch of weighted points, major axis rotated `deg` from +x.
void ellipse(double deg, double a, double b, std::vector<Vec2>& pts, std::vector<double>& w) {
  const double th = deg * std::numbers::pi / 180.0;
  for (int i = -10; i <= 10; ++i) {
    for (int j = -10; j <= 10; ++j) {
      const double u = i / 10.0;
      const double v = j / 10.0;
      if (u * u + v * v > 1.0) continue;
      const double px = a * u;
      const double py = b * v;
      pts.push_back({3.0 + px * std::cos(th) - py * std::sin(th), 0.2 + px * std::sin(th) + py * std::cos(th)});
      w.push_back(1.0 + 0.5 * (1.0 - u * u));
    }
  }
}

}  // namespace

TEST_CASE("20 ms spikes are debounced") {
  std::vector<std::pair<double, double>> spikes;
  for (double t = 0.1; t < 5.0; t += 0.25) spikes.push_back({t, 0.02});
  CHECK(detect_events(pulses(5.0, spikes, 60000.0), Side::left).empty());
}

TEST_CASE("clean 0.6 s pulses give one on/off pair each") {
  const auto series = pulses(6.0, {{0.5, 0.6}, {2.0, 0.6}, {3.5, 0.6}, {5.0, 0.6}}, 50000.0);
  const auto ev = detect_events(series, Side::right);
  REQUIRE(ev.size() == 8);
  for (std::size_t k = 0; k < ev.size(); k += 2) {
    CHECK(ev[k].kind == ContactKind::on);
    CHECK(ev[k + 1].kind == ContactKind::off);
    CHECK(ev[k + 1].time - ev[k].time == doctest::Approx(0.6));
    CHECK(ev[k].foot == Side::right);
  }
  CHECK(ev[0].time == doctest::Approx(0.5));
  CHECK(ev[0].anchor.x == doctest::Approx(1.0));
}

TEST_CASE("hysteresis ignores chatter between the thresholds") {
  std::vector<ForceSample> s;
  for (int i = 0; i < 300; ++i) {
    const double t = i * kDt;
    double f = 0.0;
    if (t >= 0.5 && t < 2.5) f = (i % 2 == 0) ? 1500.0 : 2500.0;  // dips never reach the off level
    if (t >= 1.0 && t < 2.0) f = 30000.0;
    s.push_back({t, f, {1.0, 0.2}});
  }
  const auto ev = detect_events(s, Side::left);
  REQUIRE(ev.size() == 2);
  // the sustained run starts at the last chatter peak before the plateau
  CHECK(ev[0].time == doctest::Approx(0.99));
  CHECK(ev[1].time == doctest::Approx(2.5));
}

TEST_CASE("sustain is measured over the run") {
  // 30 ms run = 4 samples at 100 Hz (0, 10, 20, 30 ms): gives an on/off pair; 3 samples do not
  CHECK(detect_events(pulses(1.0, {{0.2, 0.04}}, 5000.0), Side::left).size() == 2);
  CHECK(detect_events(pulses(1.0, {{0.2, 0.03}}, 5000.0), Side::left).empty());
}

TEST_CASE("steps and strides from contact anchors") {
  const std::vector<GaitEvent> ev{
      on_event(Side::right, 0.0, 1.00, 0.13), on_event(Side::left, 0.5, 1.60, 0.28),
      on_event(Side::right, 1.0, 2.25, 0.14), on_event(Side::left, 1.5, 2.85, 0.27),
  };
  const StepMetrics m = step_metrics(ev);
  REQUIRE(m.steps.size() == 3);
  CHECK(m.steps[0].length == doctest::Approx(0.60));
  CHECK(m.steps[0].width == doctest::Approx(0.15));
  CHECK(m.steps[0].leading_foot == Side::left);
  CHECK(m.steps[1].length == doctest::Approx(0.65));
  CHECK(m.steps[2].width == doctest::Approx(0.13));
  CHECK(m.steps[1].speed == doctest::Approx(1.3));
  REQUIRE(m.strides.size() == 2);
  CHECK(m.strides[0].foot == Side::right);
  CHECK(m.strides[0].length == doctest::Approx(1.25));
  CHECK(m.strides[1].length == doctest::Approx(1.25));
  CHECK(m.strides[1].duration == doctest::Approx(1.0));
}

TEST_CASE("same-foot contacts in a row are not steps") {
  const std::vector<GaitEvent> ev{on_event(Side::right, 0.0, 1.0, 0.13), on_event(Side::right, 0.5, 1.6, 0.13),
                                  on_event(Side::left, 1.0, 2.2, 0.28)};
  const StepMetrics m = step_metrics(ev);
  REQUIRE(m.steps.size() == 1);
  CHECK(m.steps[0].length == doctest::Approx(0.6));
}

TEST_CASE("summary aggregates") {
  // constant 0.6 m steps every 0.5 s: 1.2 m/s, 120 steps/min
  std::vector<GaitEvent> ev;
  for (int k = 0; k < 10; ++k) {
    const Side side = k % 2 == 0 ? Side::right : Side::left;
    ev.push_back(on_event(side, 0.5 * k, 1.0 + 0.6 * k, side == Side::right ? 0.13 : 0.28));
    ev.push_back({side, ContactKind::off, 0.5 * k + 0.6, {}});
  }
  const StepMetrics m = step_metrics(ev);
  double analyzed = 0.0;
  for (const auto& s : m.steps) analyzed += s.duration;
  const std::vector<SideForces> dist{{0.0, 300, 100}, {0.1, 0, 500}, {0.2, 200, 200}};
  const std::vector<SidedFootAngle> angles{{Side::left, {10.0, false}},
                                           {Side::left, {20.0, false}},
                                           {Side::right, {5.0, true}}};
  const GaitSummary g = gait_summary(m, ev, dist, angles, analyzed);
  CHECK(g.step_count == 9);
  CHECK(*g.mean_speed == doctest::Approx(1.2));
  CHECK(*g.cadence == doctest::Approx(120.0));
  CHECK(*g.step_length_mean == doctest::Approx(0.6));
  CHECK(*g.step_length_sd == doctest::Approx(0.0));
  CHECK(*g.step_width_mean == doctest::Approx(0.15));
  CHECK(*g.stride_length_mean == doctest::Approx(1.2));
  CHECK(*g.stance_time_mean == doctest::Approx(0.6));
  CHECK(*g.foot_angle_left == doctest::Approx(15.0));
  CHECK_FALSE(g.foot_angle_right);  // only a low-confidence sample
  CHECK(*g.symmetry_index == doctest::Approx((0.5 + 0.0) / 2));
}

TEST_CASE("empty summary stays empty") {
  const GaitSummary g = gait_summary({}, {}, {}, {}, 0.0);
  CHECK(g.step_count == 0);
  CHECK_FALSE(g.mean_speed);
  CHECK_FALSE(g.cadence);
  CHECK_FALSE(g.symmetry_index);
}

TEST_CASE("sample standard deviation") {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  const MeanSd m = mean_sd(v);
  CHECK(*m.mean == doctest::Approx(5.0));
  CHECK(*m.sd == doctest::Approx(std::sqrt(32.0 / 7.0)));
  const std::vector<double> one{3.0};
  CHECK_FALSE(mean_sd(one).sd);
}

TEST_CASE("foot angle recovers patch orientation with toe-out positive") {
  for (double deg : {-30.0, -12.0, 0.0, 7.5, 25.0}) {
    std::vector<Vec2> pts;
    std::vector<double> w;
    ellipse(deg, 0.12, 0.04, pts, w);
    const auto left = foot_angle(pts, w, Side::left);
    const auto right = foot_angle(pts, w, Side::right);
    REQUIRE(left);
    REQUIRE(right);
    CHECK(left->degrees == doctest::Approx(deg).epsilon(1e-9));
    // rotating toward -y is outward for the right foot
    CHECK(right->degrees == doctest::Approx(-deg).epsilon(1e-9));
    CHECK_FALSE(left->low_confidence);
  }
}

TEST_CASE("foot angle against a rotated walking axis") {
  std::vector<Vec2> pts;
  std::vector<double> w;
  ellipse(40.0, 0.12, 0.04, pts, w);
  const double a = 30.0 * std::numbers::pi / 180.0;
  const auto r = foot_angle(pts, w, Side::left, {std::cos(a), std::sin(a)});
  REQUIRE(r);
  CHECK(r->degrees == doctest::Approx(10.0));
}

TEST_CASE("near-isotropic patches are low confidence") {
  std::vector<Vec2> pts;
  std::vector<double> w;
  ellipse(20.0, 0.05, 0.049, pts, w);
  const auto r = foot_angle(pts, w, Side::left);
  REQUIRE(r);
  CHECK(r->low_confidence);
  CHECK(r->degrees == 0.0);
  const std::vector<Vec2> one{{1.0, 1.0}};
  const std::vector<double> ow{1.0};
  CHECK_FALSE(foot_angle(one, ow, Side::left));
}

TEST_CASE("head kinematics of a straight walk with sway") {
  std::vector<Pose> head;
  const double v = 1.1;
  const double amp = 0.02;
  for (int i = 0; i <= 900; ++i) {
    const double t = i / 90.0;
    head.push_back({t, {v * t, 0.2 + amp * std::sin(2 * std::numbers::pi * t), 1.7}, 0.0});
  }
  const auto k = head_kinematics(head);
  REQUIRE(k);
  CHECK(k->rms_ml == doctest::Approx(amp / std::sqrt(2.0)).epsilon(0.01));
  CHECK(k->rms_vertical == doctest::Approx(0.0));
  CHECK(k->mean_speed >= v);
  CHECK(k->mean_speed == doctest::Approx(v).epsilon(0.01));
  CHECK(k->yaw_range == 0.0);
  CHECK_FALSE(head_kinematics(std::span<const Pose>(head.data(), 1)));
}
