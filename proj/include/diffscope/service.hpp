#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "diffscope/event_io.hpp"
#include "diffscope/report.hpp"
#include "diffscope/session.hpp"
#include "diffscope/source.hpp"
#include "diffscope/synth.hpp"

namespace httplib {
class Server;
}

namespace diffscope::service {

enum class SessionState { Created, Running, Paused, Finished, Failed };
std::string_view state_name(SessionState s) noexcept;

/// HTTP-facing failure: status code plus message.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

struct SourceSpec {
  enum class Type { Replay, Generator, Live };
  Type type = Type::Replay;
  std::filesystem::path log;
  std::filesystem::path graph;  // optional for live sessions
  synth::GeneratorParams params;
  std::string adapter;  // live adapter name; only "push" is registered
  std::size_t queue_capacity = MessageQueue::kDefaultCapacity;
};

struct Pacing {
  bool paced = false;
  // Source seconds replayed per wall-clock second.
  double speed = 1.0;
};

/// Throws ApiError(400) on malformed descriptors.
SourceSpec source_from_json(const nlohmann::json& doc);
Pacing pacing_from_json(const nlohmann::json& doc);

struct Notice {
  std::uint64_t seq = 0;
  std::uint64_t event_count = 0;
  std::vector<std::string> changed;
  SessionState state = SessionState::Created;
  bool terminal = false;

  nlohmann::ordered_json to_json() const;
  bool operator==(const Notice&) const = default;
};

class Subscriber {
 public:
  /// Waits up to `timeout` for the next notice.
  std::optional<Notice> next(std::chrono::milliseconds timeout);

 private:
  friend class Session;
  void push(const Notice& n);

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Notice> queue_;
};

struct SessionOptions {
  std::chrono::milliseconds flush_interval{500};
  std::optional<std::filesystem::path> persist_dir;
};

/// One analysis session with its own driver thread. Every read takes a shared
/// lock on the engine, so a response reflects a single consistent snapshot.
class Session {
 public:
  /// Validates every resource eagerly. Throws ApiError (400/404).
  Session(std::string id, SessionConfig config, SourceSpec source, Pacing pacing, SessionOptions options = {});
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const noexcept { return id_; }
  SessionState state() const;

  /// start | pause | resume | stop. Throws ApiError(409) on illegal
  /// transitions and (400) on unknown actions. `stop` returns once the driver
  /// has halted.
  void control(const std::string& action);
  /// Blocks until the session is Finished or Failed, or the timeout expires.
  bool wait_done(std::chrono::milliseconds timeout) const;

  /// Parses JSON Lines and enqueues them for a live session. Throws ApiError.
  std::size_t push_events(const std::string& body, bool close_stream);

  nlohmann::ordered_json handle_json() const;
  nlohmann::ordered_json global_json() const;
  nlohmann::ordered_json series_json(std::optional<Duration> bucket) const;
  nlohmann::ordered_json distribution_json(LocalField field, std::optional<bool> include_graph_miss) const;
  nlohmann::ordered_json scatter_json(LocalField x, LocalField y, double threshold, bool include_graph_miss) const;
  nlohmann::ordered_json knowledge_json(std::size_t k) const;
  SessionReport report() const;

  std::shared_ptr<Subscriber> subscribe();

 private:
  void drive();
  void notify_loop();
  void publish_locked(bool terminal);
  void finish(SessionState final_state, const std::string& error = {});
  SessionReport report_locked() const;
  ReportDiagnostics diagnostics() const;

  std::string id_;
  SessionConfig config_;
  SourceSpec spec_;
  Pacing pacing_;
  SessionOptions options_;

  GraphFile graph_;
  std::shared_ptr<MessageQueue> queue_;
  std::unique_ptr<MessageSource> source_;
  std::optional<std::size_t> total_;

  mutable std::shared_mutex engine_mu_;
  std::unique_ptr<DiffusionEngine> engine_;
  std::unique_ptr<Ingestor> ingestor_;
  std::uint64_t processed_ = 0;

  mutable std::mutex state_mu_;
  mutable std::condition_variable state_cv_;
  SessionState state_ = SessionState::Created;
  bool stop_requested_ = false;
  std::string error_;

  std::uint64_t notice_seq_ = 0;
  std::uint64_t published_events_ = 0;
  SessionState published_state_ = SessionState::Created;
  bool terminal_sent_ = false;
  std::chrono::steady_clock::time_point last_notice_{};
  std::vector<std::weak_ptr<Subscriber>> subscribers_;
  std::optional<Notice> terminal_notice_;

  std::thread driver_;
  std::thread notifier_;
};

class SessionManager {
 public:
  explicit SessionManager(SessionOptions options = {}) : options_(std::move(options)) {}

  /// Throws ApiError (400/404/409).
  std::shared_ptr<Session> create(const nlohmann::json& body);
  /// Throws ApiError(404).
  std::shared_ptr<Session> get(const std::string& id) const;
  std::vector<std::shared_ptr<Session>> list() const;

 private:
  SessionOptions options_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// Registers every /api/v1 route on `server`.
void install_routes(httplib::Server& server, SessionManager& manager);

}  // namespace diffscope::service
