#include <gtest/gtest.h>

#include <httplib.h>

#include <sstream>
#include <thread>

#include "diffscope/event_io.hpp"
#include "diffscope/oracle.hpp"
#include "diffscope/pipeline.hpp"
#include "diffscope/report.hpp"
#include "diffscope/service.hpp"
#include "diffscope/synth.hpp"
#include "support.hpp"

using namespace diffscope;
using namespace diffscope::testing;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

class TestServer {
 public:
  explicit TestServer(service::SessionOptions options = {}) : manager_(std::move(options)) {
    service::install_routes(server_, manager_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(30, 0);
    return c;
  }
  service::SessionManager& manager() { return manager_; }

 private:
  service::SessionManager manager_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

json fixture_body(const std::string& id = "") {
  json body = {
      {"config", {{"keywords", {"HoloLens", "Holo Lens"}}}},
      {"source",
       {{"type", "replay"},
        {"log", (fixture("three_events") / "log.jsonl").string()},
        {"graph", (fixture("three_events") / "graph.jsonl").string()}}},
  };
  if (!id.empty()) body["id"] = id;
  return body;
}

httplib::Result post_json(httplib::Client& c, const std::string& path, const json& body) {
  return c.Post(path, body.dump(), "application/json");
}

json body_of(const httplib::Result& r) { return json::parse(r->body); }

void start_and_wait(service::SessionManager& m, const std::string& id) {
  auto s = m.get(id);
  s->control("start");
  ASSERT_TRUE(s->wait_done(30s));
}

// Writes a generated log and graph into `dir`.
synth::GeneratorParams write_generated(const TempDir& dir, std::size_t users, std::uint64_t seed) {
  synth::GeneratorParams p;
  p.n_users = users;
  p.n_steps = 24;
  p.seed = seed;
  p.base_spontaneous_rate = 0.05;
  auto graph = synth::generate_graph(p);
  write_graph_file(dir / "graph.jsonl", graph);
  write_event_log(dir / "log.jsonl", synth::generate_cascade(graph, p));
  return p;
}

std::vector<std::string> sse_data(const std::string& stream) {
  std::vector<std::string> out;
  std::istringstream in(stream);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("data: ", 0) == 0) out.push_back(line.substr(6));
  return out;
}

}  // namespace

TEST(Service, HealthReturnsOk) {
  TestServer srv;
  auto c = srv.client();
  auto r = c.Get("/api/v1/health");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(body_of(r)["status"], "ok");
}

TEST(Service, CreateReplayReturnsCreatedHandle) {
  TestServer srv;
  auto c = srv.client();
  auto r = post_json(c, "/api/v1/sessions", fixture_body());
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 201);
  auto h = body_of(r);
  EXPECT_EQ(h["state"], "created");
  EXPECT_EQ(h["id"], "s1");
  EXPECT_EQ(h["progress"]["processed"], 0);
  EXPECT_EQ(h["progress"]["total"], 3);
}

TEST(Service, CreateErrors) {
  TestServer srv;
  auto c = srv.client();
  auto empty = fixture_body();
  empty["config"]["keywords"] = json::array();
  EXPECT_EQ(post_json(c, "/api/v1/sessions", empty)->status, 400);

  auto missing = fixture_body();
  missing["source"]["log"] = "/nonexistent/log.jsonl";
  EXPECT_EQ(post_json(c, "/api/v1/sessions", missing)->status, 404);

  EXPECT_EQ(post_json(c, "/api/v1/sessions", fixture_body("dup"))->status, 201);
  EXPECT_EQ(post_json(c, "/api/v1/sessions", fixture_body("dup"))->status, 409);

  json live = {{"config", {{"keywords", {"x"}}}}, {"source", {{"type", "live"}, {"adapter", "firehose"}}}};
  EXPECT_EQ(post_json(c, "/api/v1/sessions", live)->status, 404);

  auto bad_type = fixture_body();
  bad_type["source"]["type"] = "ftp";
  EXPECT_EQ(post_json(c, "/api/v1/sessions", bad_type)->status, 400);

  auto bad_params = json{{"config", {{"keywords", {"x"}}}},
                         {"source", {{"type", "generator"}, {"params", {{"n_users", 0}}}}}};
  EXPECT_EQ(post_json(c, "/api/v1/sessions", bad_params)->status, 400);

  EXPECT_EQ(c.Post("/api/v1/sessions", "{not json", "application/json")->status, 400);
}

TEST(Service, ControlTransitions) {
  TestServer srv;
  auto c = srv.client();
  post_json(c, "/api/v1/sessions", fixture_body("a"));
  auto r = post_json(c, "/api/v1/sessions/a/control", {{"action", "start"}});
  EXPECT_EQ(r->status, 200);
  EXPECT_NE(body_of(r)["state"], "created");
  ASSERT_TRUE(srv.manager().get("a")->wait_done(30s));
  EXPECT_EQ(post_json(c, "/api/v1/sessions/a/control", {{"action", "pause"}})->status, 409);
  EXPECT_EQ(post_json(c, "/api/v1/sessions/a/control", {{"action", "start"}})->status, 409);
  EXPECT_EQ(post_json(c, "/api/v1/sessions/a/control", {{"action", "rewind"}})->status, 400);
  EXPECT_EQ(post_json(c, "/api/v1/sessions/nope/control", {{"action", "start"}})->status, 404);
  EXPECT_EQ(body_of(c.Get("/api/v1/sessions/a"))["state"], "finished");
}

TEST(Service, PauseResumeStopOnLiveSession) {
  service::Session s("l", config({"x"}), service::source_from_json({{"type", "live"}}), {});
  EXPECT_THROW(s.control("resume"), service::ApiError);
  s.control("start");
  s.control("pause");
  EXPECT_EQ(s.state(), service::SessionState::Paused);
  s.control("resume");
  EXPECT_EQ(s.state(), service::SessionState::Running);
  s.control("stop");
  EXPECT_EQ(s.state(), service::SessionState::Finished);
  try {
    s.control("resume");
    FAIL();
  } catch (const service::ApiError& e) {
    EXPECT_EQ(e.status(), 409);
  }
}

TEST(Service, FreshSessionGlobalIsAllZero) {
  TestServer srv;
  auto c = srv.client();
  post_json(c, "/api/v1/sessions", fixture_body("a"));
  auto g = body_of(c.Get("/api/v1/sessions/a/global"));
  EXPECT_EQ(g["event_count"], 0);
  EXPECT_EQ(g["global"]["nb_tw"], 0);
  EXPECT_EQ(g["global"]["nb_rtw"], 0);
  EXPECT_EQ(g["global"]["nb_us"], 0);
  EXPECT_FALSE(g["global"].contains("avg_tw_per_user"));
}

TEST(Service, QueryEndpoints) {
  TestServer srv;
  auto c = srv.client();
  post_json(c, "/api/v1/sessions", fixture_body("a"));
  start_and_wait(srv.manager(), "a");

  auto g = body_of(c.Get("/api/v1/sessions/a/global"));
  EXPECT_EQ(g["global"]["nb_tw"], 2);
  EXPECT_EQ(g["global"]["nb_us"], 3);

  auto series = c.Get("/api/v1/sessions/a/series?bucket=2h");
  EXPECT_EQ(series->status, 200);
  EXPECT_EQ(body_of(series)["bucket"], "2h");
  EXPECT_EQ(c.Get("/api/v1/sessions/a/series?bucket=soon")->status, 400);

  auto d = c.Get("/api/v1/sessions/a/local/distribution?field=elapsed_h");
  ASSERT_EQ(d->status, 200);
  auto h = body_of(d)["histogram"];
  std::uint64_t sum = 0;
  for (const auto& b : h["bins"]) sum += b[2].get<std::uint64_t>();
  EXPECT_EQ(sum, h["population"].get<std::uint64_t>());
  EXPECT_EQ(h["population"], 3);
  EXPECT_EQ(c.Get("/api/v1/sessions/a/local/distribution?field=karma")->status, 400);
  EXPECT_EQ(c.Get("/api/v1/sessions/a/local/distribution")->status, 400);

  auto sc = c.Get("/api/v1/sessions/a/local/scatter?x=nb_messages&y=nb_fe&threshold=1");
  ASSERT_EQ(sc->status, 200);
  EXPECT_EQ(body_of(sc)["points"].size(), body_of(sc)["summary"]["points"].get<std::size_t>());
  EXPECT_EQ(c.Get("/api/v1/sessions/a/local/scatter?threshold=high")->status, 400);

  auto k = c.Get("/api/v1/sessions/a/knowledge?k=1");
  ASSERT_EQ(k->status, 200);
  EXPECT_LE(body_of(k)["knowledge"]["top_words"].size(), 1u);
  EXPECT_EQ(c.Get("/api/v1/sessions/a/knowledge?k=0")->status, 400);

  EXPECT_EQ(c.Get("/api/v1/sessions/zzz/global")->status, 404);
  auto list = body_of(c.Get("/api/v1/sessions"));
  EXPECT_EQ(list["sessions"].size(), 1u);
}

TEST(Service, ReplayMatchesPipeline) {
  TestServer srv;
  auto c = srv.client();
  post_json(c, "/api/v1/sessions", fixture_body("a"));
  start_and_wait(srv.manager(), "a");
  auto served = c.Get("/api/v1/sessions/a/report");
  ASSERT_EQ(served->status, 200);

  ReplaySource src(fixture("three_events") / "log.jsonl");
  auto direct = run_pipeline(config(), src, read_graph_file(fixture("three_events") / "graph.jsonl"));
  EXPECT_EQ(served->body, dump_report(direct));
}

TEST(Service, ExportCsvMatchesReportDirectory) {
  TestServer srv;
  auto c = srv.client();
  post_json(c, "/api/v1/sessions", fixture_body("a"));
  start_and_wait(srv.manager(), "a");
  ReplaySource src(fixture("three_events") / "log.jsonl");
  auto direct = run_pipeline(config(), src, read_graph_file(fixture("three_events") / "graph.jsonl"));
  TempDir dir;
  write_report_dir(dir.path(), direct);
  for (std::string table : {"global", "local", "knowledge"}) {
    auto r = c.Get("/api/v1/sessions/a/export/" + table + ".csv");
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(r->get_header_value("Content-Type"), "text/csv");
    EXPECT_NE(r->get_header_value("Content-Disposition").find("attachment"), std::string::npos);
    EXPECT_EQ(r->body, read_file(dir / (table + ".csv"))) << table;
  }
}

TEST(Service, GeneratorSessionsWithSameSeedAgree) {
  TestServer srv;
  auto c = srv.client();
  json body = {{"config", {{"keywords", {"HoloLens"}}}},
               {"source", {{"type", "generator"}, {"params", {{"n_users", 300}, {"seed", 7}, {"n_steps", 24}}}}}};
  auto a = body_of(post_json(c, "/api/v1/sessions", body))["id"].get<std::string>();
  auto b = body_of(post_json(c, "/api/v1/sessions", body))["id"].get<std::string>();
  EXPECT_NE(a, b);
  start_and_wait(srv.manager(), a);
  start_and_wait(srv.manager(), b);
  EXPECT_EQ(c.Get("/api/v1/sessions/" + a + "/report")->body, c.Get("/api/v1/sessions/" + b + "/report")->body);
}

TEST(Service, StopThenReportMatchesOracleOnTruncatedLog) {
  TempDir dir;
  write_generated(dir, 400, 3);
  auto log = read_event_log(dir / "log.jsonl");
  ASSERT_GT(log.size(), 40u);
  auto span_ms = (log.back().ts - log.front().ts).count();
  // Replays the whole log in about two seconds.
  service::Pacing pacing{true, static_cast<double>(span_ms) / 2000.0};
  service::SourceSpec spec;
  spec.type = service::SourceSpec::Type::Replay;
  spec.log = dir / "log.jsonl";
  spec.graph = dir / "graph.jsonl";
  service::Session s("t", config({"HoloLens"}), spec, pacing);
  s.control("start");
  std::this_thread::sleep_for(700ms);
  s.control("stop");
  auto report = s.report();
  ASSERT_GT(report.filter.seen, 0u);
  ASSERT_LT(report.filter.seen, log.size());

  std::vector<Message> prefix(log.begin(), log.begin() + static_cast<std::ptrdiff_t>(report.filter.seen));
  auto graph = read_graph_file(dir / "graph.jsonl");
  auto expected = oracle_report(config({"HoloLens"}), prefix, graph.users, graph.duplicates_removed);
  auto d = compare_json(json::parse(dump_report(expected)), json::parse(dump_report(report)));
  EXPECT_FALSE(d) << d->path << ": " << d->expected << " vs " << d->actual;
}

TEST(Service, FinishedSessionFeedHasSingleTerminalNotice) {
  TestServer srv({10ms, std::nullopt});
  auto c = srv.client();
  post_json(c, "/api/v1/sessions", fixture_body("a"));
  start_and_wait(srv.manager(), "a");
  std::this_thread::sleep_for(100ms);
  auto r = c.Get("/api/v1/sessions/a/feed");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->get_header_value("Content-Type"), "text/event-stream");
  auto frames = sse_data(r->body);
  ASSERT_EQ(frames.size(), 1u);
  auto n = json::parse(frames[0]);
  EXPECT_TRUE(n["terminal"].get<bool>());
  EXPECT_EQ(n["event_count"], 3);
  EXPECT_EQ(n["state"], "finished");
}

TEST(Service, PacedReplayFeedEndsAtFullCount) {
  TempDir dir;
  std::vector<Message> log;
  for (int i = 0; i < 100; ++i) log.push_back(tweet("t" + std::to_string(i), i * 10.0, "u" + std::to_string(i % 7)));
  write_event_log(dir / "log.jsonl", log);
  write_file(dir / "graph.jsonl", "");

  TestServer srv({50ms, std::nullopt});
  auto c = srv.client();
  json body = {{"id", "p"},
               {"config", {{"keywords", {"HoloLens"}}}},
               {"source", {{"type", "replay"}, {"log", (dir / "log.jsonl").string()}, {"graph", (dir / "graph.jsonl").string()}}},
               {"pacing", {{"mode", "paced"}, {"speed", 1000.0}}}};
  ASSERT_EQ(post_json(c, "/api/v1/sessions", body)->status, 201);

  std::string feed_a, feed_b;
  auto read_feed = [&](std::string& sink) {
    auto cl = srv.client();
    cl.Get("/api/v1/sessions/p/feed", [&](const char* data, std::size_t len) {
      sink.append(data, len);
      return true;
    });
  };
  std::thread ta(read_feed, std::ref(feed_a));
  std::thread tb(read_feed, std::ref(feed_b));
  std::this_thread::sleep_for(200ms);
  post_json(c, "/api/v1/sessions/p/control", {{"action", "start"}});
  ta.join();
  tb.join();

  auto a = sse_data(feed_a);
  auto b = sse_data(feed_b);
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  std::uint64_t last_seq = 0;
  for (const auto& f : a) {
    auto n = json::parse(f);
    EXPECT_GT(n["seq"].get<std::uint64_t>(), last_seq);
    last_seq = n["seq"].get<std::uint64_t>();
  }
  auto final_notice = json::parse(a.back());
  EXPECT_TRUE(final_notice["terminal"].get<bool>());
  EXPECT_EQ(final_notice["event_count"], 100);
  // With 1 s of source time per ms the replay spans ~1 s, so more than one notice is expected.
  EXPECT_GT(a.size(), 1u);
}

TEST(Service, NoticesRespectFlushInterval) {
  service::SourceSpec spec = service::source_from_json({{"type", "live"}});
  service::Session s("l", config({"x"}), spec, {}, {100ms, std::nullopt});
  auto sub = s.subscribe();
  s.control("start");
  std::vector<std::chrono::steady_clock::time_point> times;
  for (int i = 0; i < 5; ++i) {
    s.push_events(serialize_event_record(tweet("m" + std::to_string(i), i, "a", "x")) + "\n", false);
    auto n = sub->next(2s);
    ASSERT_TRUE(n);
    times.push_back(std::chrono::steady_clock::now());
  }
  for (std::size_t i = 1; i < times.size(); ++i) EXPECT_GE(times[i] - times[i - 1], 90ms);
}

TEST(Service, LivePushEndpoint) {
  TestServer srv({10ms, std::nullopt});
  auto c = srv.client();
  json body = {{"id", "live"}, {"config", {{"keywords", {"HoloLens"}}}}, {"source", {{"type", "live"}}}};
  ASSERT_EQ(post_json(c, "/api/v1/sessions", body)->status, 201);
  post_json(c, "/api/v1/sessions/live/control", {{"action", "start"}});

  std::string lines;
  for (int i = 0; i < 5; ++i) lines += serialize_event_record(tweet("m" + std::to_string(i), i, "a")) + "\n";
  auto r = c.Post("/api/v1/sessions/live/events", lines, "application/x-ndjson");
  ASSERT_EQ(r->status, 202);
  EXPECT_EQ(body_of(r)["accepted"], 5);
  EXPECT_EQ(c.Post("/api/v1/sessions/live/events", "{\"id\":", "application/x-ndjson")->status, 400);
  r = c.Post("/api/v1/sessions/live/events?final=true", serialize_event_record(tweet("m9", 9, "b")),
             "application/x-ndjson");
  ASSERT_EQ(r->status, 202);
  ASSERT_TRUE(srv.manager().get("live")->wait_done(10s));
  auto g = body_of(c.Get("/api/v1/sessions/live/global"));
  EXPECT_EQ(g["global"]["nb_tw"], 6);
  EXPECT_EQ(c.Post("/api/v1/sessions/live/events", lines, "application/x-ndjson")->status, 409);

  post_json(c, "/api/v1/sessions", fixture_body("r"));
  EXPECT_EQ(c.Post("/api/v1/sessions/r/events", lines, "application/x-ndjson")->status, 409);
}

TEST(Service, MalformedReplayFailsSession) {
  TempDir dir;
  write_file(dir / "log.jsonl", serialize_event_record(tweet("a", 0, "u")) + "\n{broken\n");
  write_file(dir / "graph.jsonl", "");
  TestServer srv;
  auto c = srv.client();
  json body = {{"id", "bad"},
               {"config", {{"keywords", {"HoloLens"}}}},
               {"source", {{"type", "replay"}, {"log", (dir / "log.jsonl").string()}, {"graph", (dir / "graph.jsonl").string()}}}};
  post_json(c, "/api/v1/sessions", body);
  start_and_wait(srv.manager(), "bad");
  auto h = body_of(c.Get("/api/v1/sessions/bad"));
  EXPECT_EQ(h["state"], "failed");
  EXPECT_NE(h["error"].get<std::string>().find("line 2"), std::string::npos) << h["error"];
}

TEST(Service, PersistsReportOnFinish) {
  TempDir dir;
  TestServer srv({10ms, dir.path()});
  auto c = srv.client();
  post_json(c, "/api/v1/sessions", fixture_body("keep"));
  start_and_wait(srv.manager(), "keep");
  EXPECT_EQ(read_file(dir / "keep/report.json"), c.Get("/api/v1/sessions/keep/report")->body);
}

TEST(Service, GeneratorPresetSource) {
  TestServer srv;
  auto c = srv.client();
  auto preset = std::string(DIFFSCOPE_SOURCE_DIR) + "/presets/decay.json";
  json body = {{"config", {{"keywords", {"HoloLens"}}}},
               {"source", {{"type", "generator"}, {"preset", preset}, {"params", {{"n_users", 200}}}}}};
  auto r = post_json(c, "/api/v1/sessions", body);
  ASSERT_EQ(r->status, 201);
  auto params = body_of(r)["source"]["params"];
  EXPECT_EQ(params["n_users"], 200);
  EXPECT_EQ(params["decay"], synth::load_preset(preset).params.decay);
  body["source"]["preset"] = "/nonexistent.json";
  EXPECT_EQ(post_json(c, "/api/v1/sessions", body)->status, 404);
}
