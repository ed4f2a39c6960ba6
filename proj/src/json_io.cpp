#include "strideway/json_io.hpp"

#include <fstream>
#include <set>

#include "strideway/errors.hpp"

namespace strideway {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads an object field by field, remembering the dotted path for errors and
// rejecting keys nobody asked for.
class Fields {
public:
  Fields(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(prefix_.empty() ? "<root>" : prefix_, "expected an object");
  }

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(path(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(path(key), "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) {
          out = v->get<Int>();
          return;
        }
        if (v->get<std::int64_t>() < 0) throw ConfigError(path(key), "must be non-negative");
      }
      out = static_cast<Int>(v->get<std::int64_t>());
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(path(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(path(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(path(key), "unknown field");
    }
  }

private:
  const json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string(), "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string(), std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

ordered_json config_to_json(const SessionConfig& cfg) {
  ordered_json j;
  j["duration_s"] = cfg.duration_s;
  j["countdown_s"] = cfg.countdown_s;
  j["walkway"] = {{"tile_count", cfg.walkway.tile_count}, {"origin_m", cfg.walkway.origin_m}};
  j["obstacle"] = {{"mode", to_string(cfg.obstacle.mode)},
                   {"height_mm", cfg.obstacle.height_mm},
                   {"count", cfg.obstacle.count},
                   {"spawn_distance_min_m", cfg.obstacle.spawn_distance_min_m},
                   {"spawn_distance_max_m", cfg.obstacle.spawn_distance_max_m}};
  j["condition"] = {{"sound", to_string(cfg.condition.sound)},
                    {"visual", to_string(cfg.condition.visual)},
                    {"cognitive", cfg.condition.cognitive}};
  j["seed"] = cfg.seed;
  j["participant"] = cfg.participant;
  j["frame_rate_hz"] = cfg.frame_rate_hz;
  return j;
}

SessionConfig config_from_json(const json& j) {
  SessionConfig cfg;
  Fields f(j, "");
  f.number("duration_s", cfg.duration_s);
  f.number("countdown_s", cfg.countdown_s);
  if (const json* w = f.find("walkway")) {
    Fields wf(*w, "walkway");
    wf.integer("tile_count", cfg.walkway.tile_count);
    wf.number("origin_m", cfg.walkway.origin_m);
    wf.finish();
  }
  if (const json* o = f.find("obstacle")) {
    Fields of(*o, "obstacle");
    std::string mode = to_string(cfg.obstacle.mode);
    of.string("mode", mode);
    cfg.obstacle.mode = parse_obstacle_mode(mode);
    of.integer("height_mm", cfg.obstacle.height_mm);
    of.integer("count", cfg.obstacle.count);
    of.number("spawn_distance_min_m", cfg.obstacle.spawn_distance_min_m);
    of.number("spawn_distance_max_m", cfg.obstacle.spawn_distance_max_m);
    of.finish();
  }
  if (const json* c = f.find("condition")) {
    Fields cf(*c, "condition");
    std::string sound = to_string(cfg.condition.sound);
    std::string visual = to_string(cfg.condition.visual);
    cf.string("sound", sound);
    cf.string("visual", visual);
    cf.boolean("cognitive", cfg.condition.cognitive);
    cf.finish();
    cfg.condition.sound = parse_sound_level(sound);
    cfg.condition.visual = parse_visual_load(visual);
  }
  f.integer("seed", cfg.seed);
  f.string("participant", cfg.participant);
  f.number("frame_rate_hz", cfg.frame_rate_hz);
  f.finish();
  cfg.validate();
  return cfg;
}

SessionConfig load_config(const std::filesystem::path& file) {
  return config_from_json(read_json_file(file));
}

ordered_json scenario_file_to_json(const ScenarioFile& s) {
  const WalkerParams& w = s.walker;
  ordered_json walker;
  walker["speed_mps"] = w.speed_mps;
  walker["cadence_spm"] = w.cadence_spm;
  walker["step_width_m"] = w.step_width_m;
  walker["foot_length_m"] = w.foot_length_m;
  walker["body_mass_kg"] = w.body_mass_kg;
  walker["swing_apex_m"] = w.swing_apex_m;
  walker["crossing_margin_m"] = w.crossing_margin_m;
  walker["double_support_fraction"] = w.double_support_fraction;
  walker["noise_seed"] = w.noise_seed;
  walker["noise_scale"] = w.noise_scale;
  walker["step_length_sd_m"] = w.step_length_sd_m;
  walker["toe_out_deg"] = w.toe_out_deg;
  walker["head_height_m"] = w.head_height_m;
  walker["head_bob_m"] = w.head_bob_m;

  const Scenario& sc = s.scenario;
  ordered_json scenario;
  scenario["kind"] = to_string(sc.kind);
  scenario["obstacle_index"] = sc.obstacle_index;
  scenario["apex_override_m"] = sc.apex_override_m;
  scenario["speed_factor"] = sc.speed_factor;
  scenario["onset"] = sc.onset == HesitationOnset::approach ? "approach" : "spawn";
  scenario["onset_distance_m"] = sc.onset_distance_m;

  ordered_json j;
  j["walker"] = walker;
  j["scenario"] = scenario;
  j["apply_load_modifiers"] = s.apply_load_modifiers;
  j["recall_fraction"] = s.recall_fraction;
  return j;
}

ScenarioFile scenario_file_from_json(const json& j) {
  ScenarioFile s;
  Fields f(j, "");
  if (const json* w = f.find("walker")) {
    Fields wf(*w, "walker");
    WalkerParams& p = s.walker;
    wf.number("speed_mps", p.speed_mps);
    wf.number("cadence_spm", p.cadence_spm);
    wf.number("step_width_m", p.step_width_m);
    wf.number("foot_length_m", p.foot_length_m);
    wf.number("body_mass_kg", p.body_mass_kg);
    wf.number("swing_apex_m", p.swing_apex_m);
    wf.number("crossing_margin_m", p.crossing_margin_m);
    wf.number("double_support_fraction", p.double_support_fraction);
    wf.integer("noise_seed", p.noise_seed);
    wf.number("noise_scale", p.noise_scale);
    wf.number("step_length_sd_m", p.step_length_sd_m);
    wf.number("toe_out_deg", p.toe_out_deg);
    wf.number("head_height_m", p.head_height_m);
    wf.number("head_bob_m", p.head_bob_m);
    wf.finish();
  }
  if (const json* sc = f.find("scenario")) {
    Fields sf(*sc, "scenario");
    std::string kind = to_string(s.scenario.kind);
    sf.string("kind", kind);
    s.scenario.kind = parse_scenario_kind(kind);
    sf.integer("obstacle_index", s.scenario.obstacle_index);
    sf.number("apex_override_m", s.scenario.apex_override_m);
    sf.number("speed_factor", s.scenario.speed_factor);
    std::string onset = s.scenario.onset == HesitationOnset::approach ? "approach" : "spawn";
    sf.string("onset", onset);
    if (onset == "approach") {
      s.scenario.onset = HesitationOnset::approach;
    } else if (onset == "spawn") {
      s.scenario.onset = HesitationOnset::spawn;
    } else {
      throw ConfigError("scenario.onset", "expected approach or spawn, got '" + onset + "'");
    }
    sf.number("onset_distance_m", s.scenario.onset_distance_m);
    sf.finish();
  }
  f.boolean("apply_load_modifiers", s.apply_load_modifiers);
  f.number("recall_fraction", s.recall_fraction);
  f.finish();
  if (!(s.recall_fraction >= 0.0 && s.recall_fraction <= 1.0)) {
    throw ConfigError("recall_fraction", "must lie in [0, 1]");
  }
  return s;
}

ScenarioFile load_scenario_file(const std::filesystem::path& file) {
  return scenario_file_from_json(read_json_file(file));
}

ordered_json event_to_json(const SessionEvent& e) {
  ordered_json j;
  j["time"] = e.time;
  j["kind"] = to_string(e.kind);
  j["payload"] = e.payload;
  return j;
}

SessionEvent event_from_json(const ordered_json& j) {
  if (!j.is_object() || !j.contains("time") || !j.contains("kind")) {
    throw ConfigError("events", "event needs time and kind");
  }
  if (!j["time"].is_number() || !j["kind"].is_string()) {
    throw ConfigError("events", "event time must be a number and kind a string");
  }
  SessionEvent e;
  e.time = j["time"].get<double>();
  e.kind = parse_event_kind(j["kind"].get<std::string>());
  if (auto it = j.find("payload"); it != j.end()) e.payload = *it;
  return e;
}

}  // namespace strideway
