#include <gtest/gtest.h>

#include <sstream>

#include "diffscope/errors.hpp"
#include "diffscope/event_io.hpp"
#include "diffscope/oracle.hpp"
#include "diffscope/pipeline.hpp"
#include "diffscope/report.hpp"
#include "diffscope/synth.hpp"
#include "support.hpp"

using namespace diffscope;
using namespace diffscope::testing;

namespace {

nlohmann::json expected_fixture() {
  return nlohmann::json::parse(read_file(fixture("three_events") / "expected.json"));
}

SessionReport engine_on_fixture() {
  auto cfg = config();
  ReplaySource src(fixture("three_events") / "log.jsonl");
  return run_pipeline(cfg, src, read_graph_file(fixture("three_events") / "graph.jsonl"));
}

SessionReport oracle_on_fixture() {
  auto graph = read_graph_file(fixture("three_events") / "graph.jsonl");
  auto log = read_event_log(fixture("three_events") / "log.jsonl");
  return oracle_report(config(), log, graph.users, graph.duplicates_removed);
}

nlohmann::json as_json(const SessionReport& r) { return nlohmann::json::parse(to_json(r).dump()); }

}  // namespace

TEST(Fixture, EngineMatchesHandComputation) {
  auto doc = as_json(engine_on_fixture());
  auto m = subset_mismatch(expected_fixture(), doc);
  EXPECT_FALSE(m) << *m;
  EXPECT_FALSE(doc["series"][0].contains("bkt_avg_gap_tw_s"));
  EXPECT_FALSE(doc["global"].contains("avg_gap_rtw_s"));
  EXPECT_FALSE(doc["heavy_tail"].contains("nb_fe_ccdf_slope"));
}

TEST(Fixture, OracleMatchesHandComputation) {
  auto m = subset_mismatch(expected_fixture(), as_json(oracle_on_fixture()));
  EXPECT_FALSE(m) << *m;
}

TEST(Oracle, EmptyLogIsAllZero) {
  std::vector<Message> none;
  auto r = oracle_report(config(), none, {});
  EXPECT_EQ(r.filter, FilterStats{});
  EXPECT_EQ(r.global, GlobalIndicators{});
  EXPECT_TRUE(r.series.empty());
  EXPECT_TRUE(r.users.empty());
  VectorSource src({});
  auto e = run_pipeline(config(), src, {});
  EXPECT_FALSE(compare_reports(r, e));
}

TEST(Oracle, EquivalentOnGeneratedLogs) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    synth::GeneratorParams p;
    p.n_users = 300 * seed;
    p.seed = seed;
    p.influence_rate = 0.08;
    p.retweet_fraction = 0.4;
    p.off_topic_rate = 0.1;
    p.languages = {"en", "fr"};
    auto graph = synth::generate_graph(p);
    auto log = synth::generate_cascade(graph, p);
    auto cfg = config({"HoloLens"});
    if (seed % 2) cfg.language_filter = "fr";
    cfg.bucket_width = std::chrono::minutes{30};
    VectorSource src(log);
    auto engine = run_pipeline(cfg, src, {graph, 0});
    auto oracle = oracle_report(cfg, log, graph);
    auto d = compare_reports(oracle, engine);
    EXPECT_FALSE(d) << d->path << " expected " << d->expected << " got " << d->actual;
    EXPECT_GT(engine.filter.accepted, 0u);
  }
}

TEST(CompareJson, IntegersExactRatiosTolerant) {
  auto r = as_json(engine_on_fixture());
  auto copy = r;
  EXPECT_FALSE(compare_json(r, copy));
  copy["global"]["nb_tw"] = 3;
  auto d = compare_json(r, copy);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->path, "/global/nb_tw");
  copy = r;
  copy["global"]["avg_tw_per_user"] = r["global"]["avg_tw_per_user"].get<double>() * (1 + 1e-12);
  EXPECT_FALSE(compare_json(r, copy));
  copy["global"]["avg_tw_per_user"] = r["global"]["avg_tw_per_user"].get<double>() * (1 + 1e-6);
  EXPECT_TRUE(compare_json(r, copy));
  copy = r;
  copy["global"].erase("avg_gap_tw_s");
  EXPECT_TRUE(compare_json(r, copy));
}

TEST(ReportJson, RoundTrip) {
  auto r = engine_on_fixture();
  auto text = dump_report(r);
  auto back = report_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(dump_report(back), text);
  EXPECT_THROW(report_from_json(nlohmann::json{{"schema", "other"}}), Error);
}

TEST(Csv, GlobalLocalKnowledgeLayouts) {
  auto r = engine_on_fixture();
  std::ostringstream g, l, k;
  write_global_csv(g, r);
  write_local_csv(l, r);
  write_knowledge_csv(k, r);
  EXPECT_EQ(g.str(),
            "bucket_start,nb_tw,nb_rtw,new_users,bkt_avg_gap_tw_s,bkt_avg_gap_rtw_s,cum_avg_tw_per_user,"
            "cum_avg_rtw_per_user\n"
            "2015-01-23T11:00:00+01:00,1,1,2,,,0.5,0.5\n"
            "2015-01-23T12:00:00+01:00,1,0,1,4500,,0.6666666666666666,0.3333333333333333\n");
  EXPECT_EQ(l.str(),
            "user,nb_t,nb_rt,first_post_ts,nb_fe,nb_fg_p,total_r,elapsed_h,graph_miss\n"
            "A,1,0,2015-01-23T11:00:00+01:00,10,0,0,0,0\n"
            "B,0,1,2015-01-23T11:30:00+01:00,0,0,0,0.5,0\n"
            "C,1,0,2015-01-23T12:15:00+01:00,3,2,2,1.25,0\n");
  EXPECT_EQ(k.str().substr(0, k.str().find('\n')), "category,rank,key,count,captured");
  EXPECT_NE(k.str().find("tweet,1,1,1,1"), std::string::npos);
  EXPECT_NE(k.str().find("link,1,http://x.y/1,1,"), std::string::npos);
}

TEST(Csv, ReportDirectory) {
  TempDir dir;
  write_report_dir(dir.path(), engine_on_fixture());
  for (const char* f : {"report.json", "global.csv", "local.csv", "knowledge.csv", "top_tweets.csv", "top_words.csv",
                        "top_users.csv", "top_links.csv", "dist_nb_fe.csv", "dist_elapsed_h.csv",
                        "scatter_nb_messages_nb_fe.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  EXPECT_EQ(read_file(dir / "dist_nb_fe.csv"), "bin_low,bin_high,count\n0,1,1\n3,4,1\n10,11,1\n");
  EXPECT_EQ(read_file(dir / "scatter_nb_messages_nb_fe.csv"), "user,x,y\nA,1,10\nB,1,0\nC,1,3\n");
}
