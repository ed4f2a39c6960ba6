#include "strideway/control.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "strideway/errors.hpp"
#include "strideway/session.hpp"
#include "strideway/sources.hpp"
#include "strideway/wire.hpp"

namespace strideway {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string control_message(const std::string& type, ordered_json payload) {
  ordered_json j;
  j["type"] = type;
  j["payload"] = std::move(payload);
  return j.dump();
}

namespace {

std::string error_message(const std::string& request, const std::string& field, const std::string& what) {
  ordered_json p;
  p["request"] = request.empty() ? ordered_json(nullptr) : ordered_json(request);
  p["field"] = field;
  p["message"] = what;
  return control_message("error", std::move(p));
}

template <class T>
ordered_json opt(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json metrics_json(const LiveMetrics& m) {
  ordered_json j;
  j["time"] = m.time;
  j["state"] = to_string(m.state);
  j["step_count"] = m.step_count;
  j["speed_mps"] = opt(m.speed_mps);
  j["cof"] = m.cof ? ordered_json{{"x", m.cof->x}, {"y", m.cof->y}} : ordered_json(nullptr);
  j["left_share"] = opt(m.left_share);
  j["obstacles_cleared"] = m.obstacles_cleared;
  j["obstacles_failed"] = m.obstacles_failed;
  j["last_clearance_m"] = opt(m.last_clearance_m);
  return j;
}

bool is_control_command(const std::string& type) {
  return type == "configure_session" || type == "start_session" || type == "abort" ||
         type == "submit_recall" || type == "spawn_obstacle";
}

}  // namespace

struct ControlServer::Impl {
  class Client;

  struct Command {
    std::weak_ptr<Client> client;
    std::string type;
    nlohmann::json payload;
  };

  class Client : public std::enable_shared_from_this<Client> {
  public:
    Client(tcp::socket socket, Impl& server) : ws_(std::move(socket)), server_(server) {}

    void run() {
      ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
      ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
        if (ec) return;
        self->server_.add(self);
        self->read();
      });
    }

    void send(std::string data, bool binary) {
      net::post(ws_.get_executor(), [self = shared_from_this(), data = std::move(data), binary]() mutable {
        if (self->closed_) return;
        if (binary) {
          if (self->queued_frames_ >= self->server_.options.max_queued_frames) return;
          ++self->queued_frames_;
        }
        self->queue_.push_back({std::move(data), binary});
        if (!self->writing_) self->write();
      });
    }

    void close() {
      net::post(ws_.get_executor(), [self = shared_from_this()] {
        if (self->closed_) return;
        self->closed_ = true;
        beast::error_code ec;
        beast::get_lowest_layer(self->ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
        beast::get_lowest_layer(self->ws_).socket().close(ec);
      });
    }

    std::atomic<int> decimation{0};  // 0: not subscribed to frames

  private:
    struct Outgoing {
      std::string data;
      bool binary;
    };

    void read() {
      ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) {
          self->closed_ = true;
          self->server_.remove(self);
          return;
        }
        const bool text = self->ws_.got_text();
        std::string msg = beast::buffers_to_string(self->buffer_.data());
        self->buffer_.consume(self->buffer_.size());
        if (text) {
          self->server_.on_message(self, msg);
        } else {
          self->send(error_message("", "<message>", "binary messages are not accepted"), false);
        }
        self->read();
      });
    }

    void write() {
      writing_ = true;
      ws_.binary(queue_.front().binary);
      ws_.async_write(net::buffer(queue_.front().data),
                      [self = shared_from_this()](beast::error_code ec, std::size_t) {
                        if (self->queue_.front().binary) --self->queued_frames_;
                        self->queue_.pop_front();
                        if (ec) {
                          self->queue_.clear();
                          self->writing_ = false;
                          return;
                        }
                        if (self->queue_.empty()) {
                          self->writing_ = false;
                        } else {
                          self->write();
                        }
                      });
    }

    websocket::stream<beast::tcp_stream> ws_;
    Impl& server_;
    beast::flat_buffer buffer_;
    std::deque<Outgoing> queue_;
    std::size_t queued_frames_ = 0;
    bool writing_ = false;
    bool closed_ = false;
  };

  explicit Impl(ServerOptions opts) : options(std::move(opts)), acceptor(ioc) {
    if (!(options.time_scale > 0.0)) throw ConfigError("time_scale", "must be positive");
    options.config.validate();
    config = options.config;
    if (options.source == SourceKind::replay) {
      if (!std::filesystem::is_directory(options.replay_dir)) {
        throw RecordingError(options.replay_dir.string(), 0, "replay directory does not exist");
      }
      replay = load_recording(options.replay_dir);
      config = replay->config;
    }
    try {
      const tcp::endpoint endpoint(net::ip::make_address(options.address), options.port);
      acceptor.open(endpoint.protocol());
      acceptor.set_option(net::socket_base::reuse_address(true));
      acceptor.bind(endpoint);
      acceptor.listen();
      bound_port = acceptor.local_endpoint().port();
    } catch (const boost::system::system_error& e) {
      throw std::runtime_error("cannot listen on " + options.address + ":" + std::to_string(options.port) +
                               ": " + e.code().message());
    }
    publish_state("idle");
    accept();
    io_thread = std::thread([this] { ioc.run(); });
    engine_thread = std::thread([this] { engine_loop(); });
  }

  ~Impl() { shutdown(); }

  void shutdown() {
    {
      std::lock_guard lk(mu);
      if (stopping) return;
      stopping = true;
    }
    cv.notify_all();
    if (engine_thread.joinable()) engine_thread.join();
    net::post(ioc, [this] {
      beast::error_code ec;
      acceptor.close(ec);
    });
    {
      std::lock_guard lk(clients_mu);
      for (const auto& c : clients) c->close();
    }
    ioc.stop();
    if (io_thread.joinable()) io_thread.join();
    stopped_cv.notify_all();
  }

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Client>(std::move(socket), *this)->run();
      accept();
    });
  }

  // io thread ---------------------------------------------------------------

  void add(const std::shared_ptr<Client>& c) {
    {
      std::lock_guard lk(clients_mu);
      clients.insert(c);
    }
    c->send(control_message("state_update", snapshot()), false);
  }

  void remove(const std::shared_ptr<Client>& c) {
    std::lock_guard lk(clients_mu);
    clients.erase(c);
    if (controller.lock() == c) controller.reset();
  }

  void on_message(const std::shared_ptr<Client>& c, const std::string& text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
      c->send(error_message("", "<message>", "not valid JSON"), false);
      return;
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
      c->send(error_message("", "type", "message needs a string type"), false);
      return;
    }
    const std::string type = j["type"];
    nlohmann::json payload = j.value("payload", nlohmann::json::object());
    if (payload.is_null()) payload = nlohmann::json::object();
    if (!payload.is_object()) {
      c->send(error_message(type, "payload", "payload must be an object"), false);
      return;
    }
    if (type == "subscribe_frames") {
      subscribe(c, payload);
      return;
    }
    if (!is_control_command(type)) {
      c->send(error_message(type, "type", "unknown message type '" + type + "'"), false);
      return;
    }
    {
      std::lock_guard lk(clients_mu);
      auto current = controller.lock();
      if (current && current != c) {
        c->send(error_message(type, "controller", "busy: another client controls the session"), false);
        return;
      }
      controller = c;
    }
    {
      std::lock_guard lk(mu);
      commands.push_back({c, type, std::move(payload)});
    }
    cv.notify_all();
  }

  void subscribe(const std::shared_ptr<Client>& c, const nlohmann::json& payload) {
    const double rate = config_snapshot_rate.load();
    int decimation = 0;
    if (payload.contains("decimation")) {
      if (!payload["decimation"].is_number_integer() || payload["decimation"].get<int>() < 0) {
        c->send(error_message("subscribe_frames", "decimation", "expected a non-negative integer"), false);
        return;
      }
      decimation = payload["decimation"].get<int>();
    } else {
      double fps = 15.0;
      if (payload.contains("fps")) {
        if (!payload["fps"].is_number() || payload["fps"].get<double>() < 0.0) {
          c->send(error_message("subscribe_frames", "fps", "expected a non-negative number"), false);
          return;
        }
        fps = payload["fps"].get<double>();
      }
      decimation = fps > 0.0 ? std::max(1, static_cast<int>(std::lround(rate / fps))) : 0;
    }
    c->decimation = decimation;
    ordered_json ack{{"request", "subscribe_frames"}, {"decimation", decimation}};
    ack["fps"] = decimation > 0 ? ordered_json(rate / decimation) : ordered_json(0);
    c->send(control_message("ack", std::move(ack)), false);
  }

  // engine thread -----------------------------------------------------------

  ordered_json snapshot() {
    std::lock_guard lk(snapshot_mu);
    ordered_json s;
    s["state"] = state_name;
    s["previous"] = nullptr;
    s["time"] = 0.0;
    s["source"] = options.source == SourceKind::sim ? "sim" : "replay";
    s["config"] = config_json;
    return s;
  }

  void publish_state(const std::string& state) {
    std::lock_guard lk(snapshot_mu);
    state_name = state;
    config_json = config_to_json(config);
    config_snapshot_rate = config.frame_rate_hz;
  }

  void broadcast(const std::string& msg) {
    std::lock_guard lk(clients_mu);
    for (const auto& c : clients) c->send(msg, false);
  }

  void broadcast_frame(const PressureFrame& frame) {
    std::optional<std::string> bytes;
    std::lock_guard lk(clients_mu);
    for (const auto& c : clients) {
      const int d = c->decimation.load();
      if (d <= 0 || frame.seq % static_cast<std::uint32_t>(d) != 0) continue;
      if (!bytes) {
        const std::vector<std::uint8_t> enc = encode_frame(frame);
        bytes.emplace(enc.begin(), enc.end());
      }
      c->send(*bytes, true);
    }
  }

  void reply(const Command& cmd, const std::string& msg) {
    if (auto c = cmd.client.lock()) c->send(msg, false);
  }

  void ack(const Command& cmd, ordered_json extra = ordered_json::object()) {
    ordered_json p{{"request", cmd.type}};
    for (auto& [k, v] : extra.items()) p[k] = v;
    reply(cmd, control_message("ack", std::move(p)));
  }

  double session_time() const {
    if (!session) return 0.0;
    if (session->state() == SessionState::walking) {
      const double wall = std::chrono::duration<double>(Clock::now() - walk_t0).count();
      return std::max(session->now(), wall * options.time_scale);
    }
    return session->now();
  }

  void on_event(const SessionEvent& e) {
    ordered_json p = e.payload;
    switch (e.kind) {
      case EventKind::state_change: {
        const std::string to = p.value("to", "");
        publish_state(to);
        ordered_json s{{"state", to}, {"previous", p.value("from", "")}, {"time", e.time}};
        if (p.contains("aborted")) s["aborted"] = p["aborted"];
        if (to == "countdown") s["countdown_s"] = config.countdown_s;
        if (to == "walking") s["duration_s"] = config.duration_s;
        broadcast(control_message("state_update", std::move(s)));
        break;
      }
      case EventKind::obstacle_spawn:
      case EventKind::cue:
      case EventKind::crossing_result: {
        ordered_json o{{"kind", e.kind == EventKind::obstacle_spawn ? "spawn"
                                : e.kind == EventKind::cue          ? "cue"
                                                                    : "crossing_result"},
                       {"time", e.time}};
        for (auto& [k, v] : p.items()) o[k] = v;
        broadcast(control_message("obstacle_event", std::move(o)));
        break;
      }
      case EventKind::sentence_start:
      case EventKind::sentence_end: {
        ordered_json o{{"kind", e.kind == EventKind::sentence_start ? "start" : "end"}, {"time", e.time}};
        for (auto& [k, v] : p.items()) o[k] = v;
        broadcast(control_message("sentence_event", std::move(o)));
        break;
      }
      case EventKind::stream_gap:
        ++stream_gaps;
        break;
      case EventKind::recall_submitted:
        break;
    }
  }

  void send_metrics() {
    ordered_json m = metrics_json(session->live_metrics());
    m["stream_gaps"] = stream_gaps;
    broadcast(control_message("metrics_update", std::move(m)));
  }

  void finish_session() {
    send_metrics();
    const SessionReport& report = *session->report();
    broadcast(control_message("session_report", report_to_json(report)));
    if (options.out_dir) {
      const auto dir = *options.out_dir / ("session-" + std::to_string(++saved_sessions));
      try {
        save_recording(dir, session->recording(), report);
      } catch (const std::exception& e) {
        std::cerr << "strideway: cannot save " << dir << ": " << e.what() << "\n";
      }
    }
    source.reset();
    pending.reset();
  }

  bool running() const {
    return session && session->state() != SessionState::idle && session->state() != SessionState::complete;
  }

  void handle(const Command& cmd) {
    const nlohmann::json& p = cmd.payload;
    try {
      if (cmd.type == "configure_session") {
        if (running()) throw SessionError("configure is only accepted while no session runs");
        if (replay) throw ConfigError("source", "the replay source uses the recorded configuration");
        nlohmann::json merged = nlohmann::json(config_to_json(config));
        merged.merge_patch(p);
        config = config_from_json(merged);
        publish_state(session ? to_string(session->state()) : "idle");
        ack(cmd, {{"config", config_to_json(config)}});
      } else if (cmd.type == "start_session") {
        if (running()) throw SessionError("a session is already running");
        session.reset();
        session.emplace(config, options.bank);
        session->set_listener([this](const SessionEvent& e) { on_event(e); });
        stream_gaps = 0;
        if (replay) {
          source = std::make_unique<ReplaySource>(*replay);
        } else {
          source = std::make_unique<SimulatedSource>(simulate_session(config, options.scenario, options.bank));
        }
        ack(cmd, {{"seed", config.seed}});
        session->start();
        countdown_end = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(config.countdown_s / options.time_scale));
      } else if (cmd.type == "abort") {
        if (!running()) throw SessionError("no session is running");
        ack(cmd);
        session->abort(session_time());
        finish_session();
      } else if (cmd.type == "submit_recall") {
        if (!session || session->state() != SessionState::recall) {
          throw SessionError("recall is only accepted in the recall state");
        }
        if (!p.contains("numbers") || !p["numbers"].is_array()) {
          throw ConfigError("numbers", "expected an array of integers");
        }
        std::vector<int> numbers;
        for (const auto& n : p["numbers"]) {
          if (!n.is_number_integer()) throw ConfigError("numbers", "expected an array of integers");
          numbers.push_back(n.get<int>());
        }
        ack(cmd, {{"count", numbers.size()}});
        session->submit_recall(std::move(numbers));
        finish_session();
      } else if (cmd.type == "spawn_obstacle") {
        if (!session) throw SessionError("no session is running");
        const int id = session->spawn_now();
        ack(cmd, {{"obstacle_id", id}});
      }
    } catch (const ConfigError& e) {
      reply(cmd, error_message(cmd.type, e.field(), e.what()));
    } catch (const SessionError& e) {
      reply(cmd, error_message(cmd.type, "state", e.what()));
    } catch (const std::exception& e) {
      reply(cmd, error_message(cmd.type, "<engine>", e.what()));
    }
  }

  void engine_loop() {
    for (;;) {
      std::optional<Clock::time_point> deadline;
      const SessionState st = session ? session->state() : SessionState::idle;
      if (st == SessionState::countdown) {
        deadline = countdown_end;
      } else if (st == SessionState::walking) {
        if (!pending) pending = source->next();
        if (!pending) {
          session->end_walking(std::min(source->end_time(), config.duration_s));
          if (session->state() == SessionState::complete) finish_session();
          continue;
        }
        deadline = walk_t0 + std::chrono::duration_cast<Clock::duration>(
                                 std::chrono::duration<double>(item_time(*pending) / options.time_scale));
      }

      std::unique_lock lk(mu);
      auto ready = [this] { return stopping || !commands.empty(); };
      if (deadline) {
        cv.wait_until(lk, *deadline, ready);
      } else {
        cv.wait(lk, ready);
      }
      if (stopping) return;
      if (!commands.empty()) {
        Command cmd = std::move(commands.front());
        commands.pop_front();
        lk.unlock();
        handle(cmd);
        continue;
      }
      lk.unlock();

      if (st == SessionState::countdown) {
        session->begin_walking();
        walk_t0 = Clock::now();
        next_metrics = 0.0;
      } else if (st == SessionState::walking) {
        const StreamItem item = std::move(*pending);
        pending.reset();
        const double t = item_time(item);
        const bool recorded = feed(*session, item);
        if (recorded && std::holds_alternative<PressureFrame>(item)) {
          broadcast_frame(std::get<PressureFrame>(item));
        }
        if (session->state() == SessionState::walking && t >= next_metrics) {
          send_metrics();
          next_metrics = t + options.metrics_interval_s;
        }
        if (session->state() == SessionState::complete) finish_session();
      }
    }
  }

  ServerOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::uint16_t bound_port = 0;
  std::thread io_thread;
  std::thread engine_thread;

  std::mutex clients_mu;
  std::set<std::shared_ptr<Client>> clients;
  std::weak_ptr<Client> controller;

  std::mutex mu;
  std::condition_variable cv;
  std::deque<Command> commands;
  bool stopping = false;
  std::condition_variable stopped_cv;

  std::mutex snapshot_mu;
  std::string state_name = "idle";
  ordered_json config_json;
  std::atomic<double> config_snapshot_rate{100.0};

  // Owned by the engine thread.
  SessionConfig config;
  std::optional<Recording> replay;
  std::optional<Session> session;
  std::unique_ptr<InputSource> source;
  std::optional<StreamItem> pending;
  Clock::time_point countdown_end;
  Clock::time_point walk_t0;
  double next_metrics = 0.0;
  int stream_gaps = 0;
  int saved_sessions = 0;
};

ControlServer::ControlServer(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

ControlServer::~ControlServer() = default;

std::uint16_t ControlServer::port() const { return impl_->bound_port; }

void ControlServer::wait() {
  std::unique_lock lk(impl_->mu);
  impl_->stopped_cv.wait(lk, [this] { return impl_->stopping; });
}

void ControlServer::stop() { impl_->shutdown(); }

}  // namespace strideway
