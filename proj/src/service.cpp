#include "diffscope/service.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "diffscope/errors.hpp"

namespace diffscope::service {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

int status_for(const Error& e) {
  switch (e.code()) {
    case Errc::Io: return 404;
    default: return 400;
  }
}

std::size_t count_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) ++n;
  return n;
}

const std::vector<std::string>& all_panels() {
  static const std::vector<std::string> panels = {"global", "series", "local", "knowledge"};
  return panels;
}

bool is_done(SessionState s) { return s == SessionState::Finished || s == SessionState::Failed; }

}  // namespace

std::string_view state_name(SessionState s) noexcept {
  switch (s) {
    case SessionState::Created: return "created";
    case SessionState::Running: return "running";
    case SessionState::Paused: return "paused";
    case SessionState::Finished: return "finished";
    case SessionState::Failed: return "failed";
  }
  return "";
}

SourceSpec source_from_json(const json& doc) {
  if (!doc.is_object()) throw ApiError(400, "source must be an object");
  SourceSpec s;
  const std::string type = doc.value("type", "");
  auto path_field = [&](const char* key, bool required) -> std::filesystem::path {
    auto it = doc.find(key);
    if (it == doc.end()) {
      if (required) throw ApiError(400, std::string("source.") + key + " is required");
      return {};
    }
    if (!it->is_string()) throw ApiError(400, std::string("source.") + key + " must be a string");
    return it->get<std::string>();
  };
  try {
    if (type == "replay") {
      s.type = SourceSpec::Type::Replay;
      s.log = path_field("log", true);
      s.graph = path_field("graph", true);
    } else if (type == "generator") {
      s.type = SourceSpec::Type::Generator;
      synth::GeneratorParams base;
      if (auto preset = path_field("preset", false); !preset.empty()) {
        if (!std::filesystem::is_regular_file(preset))
          throw ApiError(404, "no such preset '" + preset.string() + "'");
        base = synth::load_preset(preset).params;
      }
      s.params = synth::params_from_json(doc.value("params", json::object()), base);
    } else if (type == "live") {
      s.type = SourceSpec::Type::Live;
      s.adapter = doc.value("adapter", "push");
      s.graph = path_field("graph", false);
      s.queue_capacity = doc.value("queue_capacity", MessageQueue::kDefaultCapacity);
      if (s.queue_capacity == 0) throw ApiError(400, "queue_capacity must be positive");
    } else {
      throw ApiError(400, "source.type must be replay, generator or live");
    }
  } catch (const json::exception& e) {
    throw ApiError(400, std::string("invalid source: ") + e.what());
  } catch (const Error& e) {
    throw ApiError(400, e.what());
  }
  return s;
}

Pacing pacing_from_json(const json& doc) {
  Pacing p;
  if (doc.is_null()) return p;
  if (!doc.is_object()) throw ApiError(400, "pacing must be an object");
  try {
    const std::string mode = doc.value("mode", "fast");
    if (mode == "paced") p.paced = true;
    else if (mode != "fast") throw ApiError(400, "pacing.mode must be fast or paced");
    p.speed = doc.value("speed", 1.0);
  } catch (const json::exception& e) {
    throw ApiError(400, std::string("invalid pacing: ") + e.what());
  }
  if (!(p.speed > 0)) throw ApiError(400, "pacing.speed must be positive");
  return p;
}

ordered_json Notice::to_json() const {
  ordered_json doc;
  doc["seq"] = seq;
  doc["event_count"] = event_count;
  doc["changed"] = changed;
  doc["state"] = state_name(state);
  doc["terminal"] = terminal;
  return doc;
}

std::optional<Notice> Subscriber::next(std::chrono::milliseconds timeout) {
  std::unique_lock lk(mu_);
  if (!cv_.wait_for(lk, timeout, [&] { return !queue_.empty(); })) return std::nullopt;
  Notice n = std::move(queue_.front());
  queue_.pop_front();
  return n;
}

void Subscriber::push(const Notice& n) {
  {
    std::lock_guard lk(mu_);
    queue_.push_back(n);
  }
  cv_.notify_all();
}

Session::Session(std::string id, SessionConfig config, SourceSpec source, Pacing pacing, SessionOptions options)
    : id_(std::move(id)),
      config_(std::move(config)),
      spec_(std::move(source)),
      pacing_(pacing),
      options_(std::move(options)) {
  try {
    config_.validate();
    switch (spec_.type) {
      case SourceSpec::Type::Replay:
        for (const auto& p : {spec_.log, spec_.graph})
          if (!std::filesystem::is_regular_file(p)) throw ApiError(404, "no such file '" + p.string() + "'");
        graph_ = read_graph_file(spec_.graph);
        total_ = count_records(spec_.log);
        source_ = std::make_unique<ReplaySource>(spec_.log);
        break;
      case SourceSpec::Type::Generator: {
        graph_.users = synth::generate_graph(spec_.params);
        auto log = synth::generate_cascade(graph_.users, spec_.params);
        total_ = log.size();
        source_ = std::make_unique<VectorSource>(std::move(log));
        break;
      }
      case SourceSpec::Type::Live:
        if (spec_.adapter != "push") throw ApiError(404, "no live adapter named '" + spec_.adapter + "'");
        if (!spec_.graph.empty()) {
          if (!std::filesystem::is_regular_file(spec_.graph))
            throw ApiError(404, "no such file '" + spec_.graph.string() + "'");
          graph_ = read_graph_file(spec_.graph);
        }
        queue_ = std::make_shared<MessageQueue>(spec_.queue_capacity);
        source_ = std::make_unique<QueueSource>(queue_);
        break;
    }
    auto view = std::make_shared<GraphView>(GraphView::from_users(graph_.users));
    engine_ = std::make_unique<DiffusionEngine>(config_, std::move(view));
    ingestor_ = std::make_unique<Ingestor>(config_, *source_, *engine_);
  } catch (const Error& e) {
    throw ApiError(status_for(e), e.what());
  }
  notifier_ = std::thread([this] { notify_loop(); });
}

Session::~Session() {
  {
    std::lock_guard lk(state_mu_);
    stop_requested_ = true;
  }
  if (queue_) queue_->close();
  state_cv_.notify_all();
  if (driver_.joinable()) driver_.join();
  {
    std::lock_guard lk(state_mu_);
    terminal_sent_ = true;
  }
  state_cv_.notify_all();
  if (notifier_.joinable()) notifier_.join();
}

SessionState Session::state() const {
  std::lock_guard lk(state_mu_);
  return state_;
}

void Session::control(const std::string& action) {
  std::unique_lock lk(state_mu_);
  auto illegal = [&] {
    return ApiError(409, "cannot " + action + " a " + std::string(state_name(state_)) + " session");
  };
  if (action == "start") {
    if (state_ != SessionState::Created) throw illegal();
    state_ = SessionState::Running;
    driver_ = std::thread([this] { drive(); });
  } else if (action == "pause") {
    if (state_ != SessionState::Running) throw illegal();
    state_ = SessionState::Paused;
  } else if (action == "resume") {
    if (state_ != SessionState::Paused) throw illegal();
    state_ = SessionState::Running;
  } else if (action == "stop") {
    if (state_ != SessionState::Running && state_ != SessionState::Paused) throw illegal();
    if (stop_requested_) {
      // Another caller is already joining the driver.
      state_cv_.wait(lk, [&] { return is_done(state_); });
      return;
    }
    stop_requested_ = true;
    lk.unlock();
    state_cv_.notify_all();
    if (queue_) queue_->close();
    if (driver_.joinable()) driver_.join();
    return;
  } else {
    throw ApiError(400, "unknown action '" + action + "'");
  }
  lk.unlock();
  state_cv_.notify_all();
}

bool Session::wait_done(std::chrono::milliseconds timeout) const {
  std::unique_lock lk(state_mu_);
  return state_cv_.wait_for(lk, timeout, [&] { return is_done(state_); });
}

void Session::drive() {
  using clock = std::chrono::steady_clock;
  std::optional<Timestamp> anchor_ts;
  clock::time_point anchor_wall;
  try {
    while (true) {
      {
        std::unique_lock lk(state_mu_);
        if (state_ == SessionState::Paused) anchor_ts.reset();
        state_cv_.wait(lk, [&] { return stop_requested_ || state_ != SessionState::Paused; });
        if (stop_requested_) break;
      }
      auto ts = ingestor_->peek_ts();
      if (!ts) break;
      if (pacing_.paced) {
        if (!anchor_ts) {
          anchor_ts = ts;
          anchor_wall = clock::now();
        }
        auto offset = std::chrono::duration<double, std::milli>((*ts - *anchor_ts).count() / pacing_.speed);
        auto due = anchor_wall + std::chrono::duration_cast<clock::duration>(offset);
        std::unique_lock lk(state_mu_);
        state_cv_.wait_until(lk, due, [&] { return stop_requested_ || state_ == SessionState::Paused; });
      }
      {
        std::lock_guard lk(state_mu_);
        if (stop_requested_) break;
        if (state_ == SessionState::Paused) continue;
      }
      bool more;
      {
        std::unique_lock elk(engine_mu_);
        more = ingestor_->step();
        if (more) ++processed_;
      }
      if (!more) break;
    }
    finish(SessionState::Finished);
  } catch (const std::exception& e) {
    finish(SessionState::Failed, e.what());
  }
}

void Session::finish(SessionState final_state, const std::string& error) {
  if (final_state == SessionState::Finished && options_.persist_dir) {
    try {
      write_report_dir(*options_.persist_dir / id_, report());
    } catch (const std::exception& e) {
      final_state = SessionState::Failed;
      std::lock_guard lk(state_mu_);
      error_ = std::string("persisting report failed: ") + e.what();
    }
  }
  {
    std::lock_guard lk(state_mu_);
    state_ = final_state;
    if (!error.empty()) error_ = error;
  }
  state_cv_.notify_all();
}

void Session::publish_locked(bool terminal) {
  std::uint64_t events;
  {
    std::shared_lock elk(engine_mu_);
    events = engine_->event_count();
  }
  Notice n;
  n.seq = ++notice_seq_;
  n.event_count = events;
  if (events != published_events_) n.changed = all_panels();
  if (state_ != published_state_ || terminal) n.changed.push_back("session");
  n.state = state_;
  n.terminal = terminal;
  published_events_ = events;
  published_state_ = state_;
  last_notice_ = std::chrono::steady_clock::now();
  if (terminal) {
    terminal_sent_ = true;
    terminal_notice_ = n;
  }
  std::vector<std::weak_ptr<Subscriber>> live;
  for (auto& w : subscribers_) {
    if (auto s = w.lock()) {
      s->push(n);
      if (!terminal) live.push_back(w);
    }
  }
  subscribers_ = std::move(live);
}

void Session::notify_loop() {
  const auto interval = options_.flush_interval;
  std::unique_lock lk(state_mu_);
  while (!terminal_sent_) {
    state_cv_.wait_for(lk, interval, [&] { return terminal_sent_ || is_done(state_); });
    if (terminal_sent_) break;
    // Keep notices at least one flush interval apart.
    auto next_allowed = last_notice_ + interval;
    if (std::chrono::steady_clock::now() < next_allowed) {
      state_cv_.wait_until(lk, next_allowed, [&] { return terminal_sent_; });
      if (terminal_sent_) break;
    }
    if (is_done(state_)) {
      publish_locked(true);
      break;
    }
    std::uint64_t events;
    {
      std::shared_lock elk(engine_mu_);
      events = engine_->event_count();
    }
    if (events != published_events_ || state_ != published_state_) publish_locked(false);
  }
}

std::shared_ptr<Subscriber> Session::subscribe() {
  auto sub = std::make_shared<Subscriber>();
  std::lock_guard lk(state_mu_);
  if (terminal_notice_) sub->push(*terminal_notice_);
  else subscribers_.push_back(sub);
  return sub;
}

std::size_t Session::push_events(const std::string& body, bool close_stream) {
  if (spec_.type != SourceSpec::Type::Live) throw ApiError(409, "session '" + id_ + "' does not accept pushed events");
  if (is_done(state()) || queue_->closed()) throw ApiError(409, "session '" + id_ + "' no longer accepts events");
  std::vector<Message> batch;
  std::istringstream in(body);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      batch.push_back(parse_event_record(line, lineno));
    } catch (const Error& e) {
      throw ApiError(400, e.with_line(lineno).what());
    }
  }
  for (auto& m : batch) queue_->push(std::move(m));
  if (close_stream) queue_->close();
  return batch.size();
}

ReportDiagnostics Session::diagnostics() const {
  ReportDiagnostics d;
  d.graph_duplicate_followings = graph_.duplicates_removed;
  if (queue_) d.queue_dropped = queue_->dropped();
  return d;
}

SessionReport Session::report_locked() const {
  auto d = diagnostics();
  SessionReport r = build_report(*engine_, ingestor_->stats(), d);
  r.diagnostics.graph_duplicate_followings += d.graph_duplicate_followings;
  return r;
}

SessionReport Session::report() const {
  std::shared_lock elk(engine_mu_);
  return report_locked();
}

ordered_json Session::handle_json() const {
  ordered_json doc;
  doc["id"] = id_;
  {
    std::lock_guard lk(state_mu_);
    doc["state"] = state_name(state_);
    if (!error_.empty()) doc["error"] = error_;
  }
  ordered_json src;
  switch (spec_.type) {
    case SourceSpec::Type::Replay:
      src["type"] = "replay";
      src["log"] = spec_.log.string();
      src["graph"] = spec_.graph.string();
      break;
    case SourceSpec::Type::Generator:
      src["type"] = "generator";
      src["params"] = synth::params_to_json(spec_.params);
      break;
    case SourceSpec::Type::Live:
      src["type"] = "live";
      src["adapter"] = spec_.adapter;
      break;
  }
  doc["source"] = std::move(src);
  doc["pacing"] = {{"mode", pacing_.paced ? "paced" : "fast"}, {"speed", pacing_.speed}};
  doc["config"] = config_to_json(config_);
  std::shared_lock elk(engine_mu_);
  ordered_json progress;
  progress["processed"] = processed_;
  if (total_) progress["total"] = *total_;
  doc["progress"] = std::move(progress);
  doc["event_count"] = engine_->event_count();
  doc["filter"] = filter_json(ingestor_->stats());
  if (queue_) doc["queue"] = {{"size", queue_->size()}, {"dropped", queue_->dropped()}, {"closed", queue_->closed()}};
  return doc;
}

ordered_json Session::global_json() const {
  std::shared_lock elk(engine_mu_);
  ordered_json doc;
  doc["session"] = id_;
  doc["event_count"] = engine_->event_count();
  doc["global"] = diffscope::global_json(global_snapshot(engine_->global()));
  doc["filter"] = filter_json(ingestor_->stats());
  return doc;
}

ordered_json Session::series_json(std::optional<Duration> bucket) const {
  std::shared_lock elk(engine_mu_);
  std::vector<SeriesRow> rows;
  try {
    rows = bucket_series(engine_->global(), bucket);
  } catch (const Error& e) {
    throw ApiError(400, e.what());
  }
  ordered_json doc;
  doc["session"] = id_;
  doc["event_count"] = engine_->event_count();
  doc["bucket"] = format_duration(bucket.value_or(config_.bucket_width));
  doc["rows"] = diffscope::series_json(rows, config_.display_offset_minutes);
  return doc;
}

ordered_json Session::distribution_json(LocalField field, std::optional<bool> include_graph_miss) const {
  std::shared_lock elk(engine_mu_);
  auto h = distribution(engine_->local().records(), field, include_graph_miss);
  ordered_json doc;
  doc["session"] = id_;
  doc["event_count"] = engine_->event_count();
  doc["field"] = field_name(field);
  doc["histogram"] = histogram_json(h);
  return doc;
}

ordered_json Session::scatter_json(LocalField x, LocalField y, double threshold, bool include_graph_miss) const {
  std::shared_lock elk(engine_mu_);
  auto s = correlation_scatter(engine_->local().records(), x, y, threshold, include_graph_miss);
  ordered_json doc;
  doc["session"] = id_;
  doc["event_count"] = engine_->event_count();
  doc["summary"] = diffscope::scatter_json(summarize_scatter(s));
  ordered_json pts = ordered_json::array();
  for (const auto& p : s.points) pts.push_back(ordered_json{{"user", p.user}, {"x", p.x}, {"y", p.y}});
  doc["points"] = std::move(pts);
  return doc;
}

ordered_json Session::knowledge_json(std::size_t k) const {
  std::shared_lock elk(engine_mu_);
  ordered_json doc;
  doc["session"] = id_;
  doc["event_count"] = engine_->event_count();
  doc["knowledge"] = diffscope::knowledge_json(engine_->knowledge().snapshot(k));
  return doc;
}

std::shared_ptr<Session> SessionManager::create(const json& body) {
  if (!body.is_object()) throw ApiError(400, "request body must be a JSON object");
  static const std::regex id_pattern("[A-Za-z0-9_.-]{1,64}");

  SessionConfig config;
  try {
    config = config_from_json(body.contains("config") ? body["config"] : json::object());
  } catch (const Error& e) {
    throw ApiError(400, e.what());
  }
  SourceSpec source = source_from_json(body.contains("source") ? body["source"] : json());
  Pacing pacing = pacing_from_json(body.contains("pacing") ? body["pacing"] : json());

  std::lock_guard lk(mu_);
  std::string id;
  if (auto it = body.find("id"); it != body.end()) {
    if (!it->is_string() || !std::regex_match(it->get<std::string>(), id_pattern))
      throw ApiError(400, "id must be 1-64 characters from [A-Za-z0-9_.-]");
    id = it->get<std::string>();
    if (sessions_.count(id)) throw ApiError(409, "session '" + id + "' already exists");
  } else {
    do id = "s" + std::to_string(next_id_++);
    while (sessions_.count(id));
  }
  auto session = std::make_shared<Session>(id, std::move(config), std::move(source), pacing, options_);
  sessions_.emplace(id, session);
  return session;
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) const {
  std::lock_guard lk(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError(404, "no session '" + id + "'");
  return it->second;
}

std::vector<std::shared_ptr<Session>> SessionManager::list() const {
  std::lock_guard lk(mu_);
  std::vector<std::shared_ptr<Session>> out;
  for (const auto& [id, s] : sessions_) out.push_back(s);
  return out;
}

}  // namespace diffscope::service
