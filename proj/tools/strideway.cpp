// strideway: simulate, serve, analyze and export instrumented-walkway sessions.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration or usage,
// 3 unreadable or corrupt recording.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "strideway/control.hpp"
#include "strideway/errors.hpp"
#include "strideway/heatmap.hpp"
#include "strideway/json_io.hpp"
#include "strideway/recording.hpp"
#include "strideway/report.hpp"
#include "strideway/sources.hpp"

namespace fs = std::filesystem;
using namespace strideway;
using nlohmann::ordered_json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRecording = 3;

struct Common {
  std::string format = "human";
  std::string config_file;
  std::optional<std::uint64_t> seed;
};

bool structured(const Common& c) { return c.format == "structured"; }

SessionConfig load_session_config(const Common& c) {
  SessionConfig cfg = c.config_file.empty() ? SessionConfig{} : load_config(c.config_file);
  if (c.seed) cfg.seed = *c.seed;
  cfg.validate();
  return cfg;
}

std::vector<Sentence> bank_for(const SessionConfig& cfg) {
  return cfg.condition.cognitive ? load_default_sentence_bank() : std::vector<Sentence>{};
}

void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + file.string());
}

void print_header(const std::string& command, const SessionConfig& cfg, std::uint64_t noise_seed) {
  std::cout << "strideway " << command << "  seed=" << cfg.seed << " noise_seed=" << noise_seed
            << " participant=" << (cfg.participant.empty() ? "-" : cfg.participant) << "\n";
}

std::optional<SessionReport> load_baseline(const std::string& dir) {
  if (dir.empty()) return std::nullopt;
  return compute_report(load_recording(dir));
}

int cmd_simulate(const Common& c, const std::string& scenario_file, const std::string& out_dir,
                 const std::string& baseline_dir, std::optional<double> abort_at) {
  const SessionConfig cfg = load_session_config(c);
  const ScenarioFile scenario = scenario_file.empty() ? ScenarioFile{} : load_scenario_file(scenario_file);
  const std::optional<SessionReport> baseline = load_baseline(baseline_dir);
  const std::vector<Sentence> bank = bank_for(cfg);

  SimulatedSource source(simulate_session(cfg, scenario, bank));
  RunOptions options;
  options.session.live_metrics = false;
  options.abort_at = abort_at;
  const double fraction = scenario.recall_fraction;
  options.recall = [fraction](std::span<const int> presented) { return partial_recall(presented, fraction); };
  RunResult result = run_session(cfg, source, bank, options);
  if (baseline) result.report = compute_report(result.recording, &*baseline);
  save_recording(out_dir, result.recording, result.report);

  if (structured(c)) {
    ordered_json j;
    j["command"] = "simulate";
    j["seed"] = cfg.seed;
    j["noise_seed"] = scenario.walker.noise_seed;
    j["out"] = out_dir;
    j["report"] = report_to_json(result.report);
    std::cout << j.dump(2) << "\n";
  } else {
    print_header("simulate", cfg, scenario.walker.noise_seed);
    std::cout << "recording written to " << out_dir << "\n" << report_summary(result.report);
  }
  return 0;
}

int cmd_analyze(const Common& c, const std::string& dir, const std::string& baseline_dir,
                const std::string& out_file) {
  const Recording rec = load_recording(dir);
  const std::optional<SessionReport> baseline = load_baseline(baseline_dir);
  const SessionReport report = compute_report(rec, baseline ? &*baseline : nullptr);
  const std::string text = report_json(report);
  write_text(out_file.empty() ? fs::path(dir) / "analysis.json" : fs::path(out_file), text);
  if (structured(c)) {
    std::cout << text;
  } else {
    std::cout << "strideway analyze  seed=" << rec.config.seed << " engine=" << rec.engine_version << "\n"
              << report_summary(report);
  }
  return 0;
}

int cmd_export(const Common& c, const std::string& dir, const std::string& mode, const std::string& out_file) {
  const HeatmapAggregation agg = parse_heatmap_aggregation(mode);
  const Recording rec = load_recording(dir);
  const fs::path image = out_file.empty() ? fs::path(dir) / ("heatmap-" + mode + ".pgm") : fs::path(out_file);
  if (image.has_parent_path()) fs::create_directories(image.parent_path());
  const fs::path sidecar = export_heatmap(rec.frames, agg, rec.config.walkway, image);
  if (structured(c)) {
    ordered_json j{{"command", "export-heatmap"},
                   {"seed", rec.config.seed},
                   {"mode", mode},
                   {"image", image.string()},
                   {"sidecar", sidecar.string()},
                   {"frames", rec.frames.size()}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "strideway export-heatmap  seed=" << rec.config.seed << "\n"
              << "wrote " << image.string() << " and " << sidecar.string() << " from " << rec.frames.size()
              << " frames\n";
  }
  return 0;
}

int cmd_serve(const Common& c, const std::string& source, const std::string& scenario_file,
              const std::string& host, int port, double time_scale, const std::string& out_dir) {
  ServerOptions opts;
  opts.config = load_session_config(c);
  opts.scenario = scenario_file.empty() ? ScenarioFile{} : load_scenario_file(scenario_file);
  opts.address = host;
  if (port < 0 || port > 65535) throw ConfigError("port", "must lie in 0..65535");
  opts.port = static_cast<std::uint16_t>(port);
  opts.time_scale = time_scale;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  if (source == "sim") {
    opts.source = SourceKind::sim;
  } else if (source.rfind("replay:", 0) == 0) {
    opts.source = SourceKind::replay;
    opts.replay_dir = source.substr(7);
    if (!fs::is_directory(opts.replay_dir)) {
      throw ConfigError("source", "replay directory '" + opts.replay_dir.string() + "' does not exist");
    }
  } else {
    throw ConfigError("source", "expected sim or replay:<dir>, got '" + source + "'");
  }
  opts.bank = load_default_sentence_bank();

  // Signals are taken synchronously by this thread once the server runs.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ControlServer server(opts);
  if (structured(c)) {
    ordered_json j{{"command", "serve"},
                   {"seed", opts.config.seed},
                   {"noise_seed", opts.scenario.walker.noise_seed},
                   {"address", host},
                   {"port", server.port()},
                   {"source", source}};
    std::cout << j.dump() << std::endl;
  } else {
    print_header("serve", opts.config, opts.scenario.walker.noise_seed);
    std::cout << "listening on ws://" << host << ":" << server.port() << "/ (source " << source << ")"
              << std::endl;
  }
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instrumented walkway session engine"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"human", "structured"}));
    sub->add_option("--config", common.config_file, "Session configuration (JSON)");
    sub->add_option("--seed", common.seed, "Override the session seed");
  };

  std::string scenario_file;
  std::string out;
  std::string baseline;
  std::optional<double> abort_at;
  auto* simulate = app.add_subcommand("simulate", "Run the synthetic walker through a session");
  add_common(simulate);
  simulate->add_option("--scenario", scenario_file, "Walker and scenario description (JSON)");
  simulate->add_option("--out", out, "Recording directory")->required();
  simulate->add_option("--baseline", baseline, "Baseline recording for dual-task costs");
  simulate->add_option("--abort-at", abort_at, "Abort the walk at this session time (s)");

  std::string source = "sim";
  std::string host = "127.0.0.1";
  int port = 8765;
  double time_scale = 1.0;
  auto* serve = app.add_subcommand("serve", "Serve the control channel and frame stream");
  add_common(serve);
  serve->add_option("--source", source, "sim or replay:<dir>");
  serve->add_option("--scenario", scenario_file, "Walker description for the sim source");
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port (0 picks one)");
  serve->add_option("--time-scale", time_scale, "Session seconds per wall second");
  serve->add_option("--out", out, "Save completed sessions under this directory");

  std::string dir;
  auto* analyze = app.add_subcommand("analyze", "Recompute the report of a recording");
  add_common(analyze);
  analyze->add_option("recording", dir, "Recording directory")->required();
  analyze->add_option("--baseline", baseline, "Baseline recording for dual-task costs");
  analyze->add_option("--out", out, "Report file (default <recording>/analysis.json)");

  std::string mode = "mean";
  auto* heatmap = app.add_subcommand("export-heatmap", "Export an aggregated pressure image");
  add_common(heatmap);
  heatmap->add_option("recording", dir, "Recording directory")->required();
  heatmap->add_option("--mode", mode, "mean or max");
  heatmap->add_option("--out", out, "Image path (default <recording>/heatmap-<mode>.pgm)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(common, scenario_file, out, baseline, abort_at);
    if (*serve) return cmd_serve(common, source, scenario_file, host, port, time_scale, out);
    if (*analyze) return cmd_analyze(common, dir, baseline, out);
    if (*heatmap) return cmd_export(common, dir, mode, out);
  } catch (const ConfigError& e) {
    std::cerr << "strideway: invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const RecordingError& e) {
    std::cerr << "strideway: bad recording: " << e.what() << "\n";
    return kExitRecording;
  } catch (const std::exception& e) {
    std::cerr << "strideway: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
