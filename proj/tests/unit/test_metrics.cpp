#include <gtest/gtest.h>

#include <random>
#include <set>

#include "diffscope/errors.hpp"
#include "diffscope/metrics_global.hpp"
#include "diffscope/metrics_local.hpp"
#include "diffscope/session.hpp"
#include "support.hpp"

using namespace diffscope;
using namespace diffscope::testing;

TEST(GlobalMetrics, SingleTweetHasNoGap) {
  GlobalState s(kT0, std::chrono::hours{1});
  apply_global(s, tweet("1", 0, "a"), true);
  auto g = global_snapshot(s);
  EXPECT_EQ(g.nb_tw, 1u);
  EXPECT_EQ(s.gaps_tw, 0u);
  EXPECT_FALSE(g.avg_gap_tw_s);
}

TEST(GlobalMetrics, TenSecondGap) {
  GlobalState s(kT0, std::chrono::hours{1});
  apply_global(s, tweet("1", 0, "a"), true);
  apply_global(s, tweet("2", 10, "b"), true);
  EXPECT_DOUBLE_EQ(*global_snapshot(s).avg_gap_tw_s, 10.0);
}

TEST(GlobalMetrics, SameKindGaps) {
  GlobalState s(kT0, std::chrono::hours{1});
  apply_global(s, tweet("1", 0, "a"), true);
  apply_global(s, retweet("2", 5, "b", "1"), true);
  apply_global(s, tweet("3", 12, "a"), false);
  auto g = global_snapshot(s);
  EXPECT_DOUBLE_EQ(*g.avg_gap_tw_s, 12.0);
  EXPECT_FALSE(g.avg_gap_rtw_s);
  EXPECT_EQ(g.nb_us, 2u);
}

TEST(GlobalMetrics, FractionalGapSeconds) {
  GlobalState s(kT0, std::chrono::hours{1});
  apply_global(s, tweet("1", 0, "a"), true);
  apply_global(s, tweet("2", 0.25, "a"), false);
  EXPECT_DOUBLE_EQ(*global_snapshot(s).avg_gap_tw_s, 0.25);
}

TEST(GlobalMetrics, PaperRatios) {
  GlobalState s;
  s.nb_tw = 46317;
  s.nb_us = 30629;
  EXPECT_NEAR(*global_snapshot(s).avg_tw_per_user, 1.5122, 5e-5);
  s.nb_tw = 168255;
  s.nb_rtw = 94780;
  s.nb_us = 74101;
  auto g = global_snapshot(s);
  EXPECT_NEAR(*g.avg_tw_per_user, 2.2706, 5e-5);
  EXPECT_NEAR(*g.avg_rtw_per_user, 1.2791, 5e-5);
}

TEST(GlobalMetrics, EmptyState) {
  auto g = global_snapshot(GlobalState{});
  EXPECT_EQ(g, GlobalIndicators{});
  EXPECT_TRUE(bucket_series(GlobalState{}).empty());
}

TEST(GlobalMetrics, OrderViolation) {
  GlobalState s(kT0, std::chrono::hours{1});
  apply_global(s, tweet("1", 10, "a"), true);
  EXPECT_THROW(apply_global(s, tweet("2", 9, "a"), false), Error);
  EXPECT_THROW(apply_global(s, tweet("3", -1, "a"), false), Error);
}

TEST(GlobalMetrics, BucketCountsThreeThenTwo) {
  GlobalState s(kT0, std::chrono::hours{1});
  for (double t : {0.0, 1200.0, 2400.0, 3600.0, 4800.0}) apply_global(s, tweet(std::to_string(t), t, "a"), t == 0);
  auto rows = bucket_series(s);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].nb_tw, 3u);
  EXPECT_EQ(rows[1].nb_tw, 2u);
  EXPECT_EQ(rows[1].bucket_start, kT0 + std::chrono::hours{1});
  EXPECT_DOUBLE_EQ(*rows[0].bkt_avg_gap_tw_s, 1200.0);
  EXPECT_DOUBLE_EQ(*rows[1].bkt_avg_gap_tw_s, 1200.0);
  EXPECT_DOUBLE_EQ(*rows[1].cum_avg_tw_per_user, 5.0);
}

TEST(GlobalMetrics, ZeroFilledAndRebucketed) {
  GlobalState s(kT0, std::chrono::hours{1});
  apply_global(s, tweet("1", 0, "a"), true);
  apply_global(s, retweet("2", 3 * 3600 + 1, "b", "1"), true);
  auto rows = bucket_series(s);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].nb_tw + rows[1].nb_rtw + rows[2].nb_tw, 0u);
  EXPECT_FALSE(rows[2].bkt_avg_gap_tw_s);
  EXPECT_EQ(rows[3].cum_nb_us, 2u);
  auto wide = bucket_series(s, std::chrono::hours{2});
  ASSERT_EQ(wide.size(), 2u);
  EXPECT_EQ(wide[1].nb_rtw, 1u);
  EXPECT_THROW(bucket_series(s, std::chrono::minutes{90}), Error);
}

TEST(GlobalMetrics, CrossMultiplicationAndConservation) {
  std::mt19937 rng(3);
  GlobalState s(kT0, std::chrono::minutes{10});
  std::set<std::string> users;
  double t = 0;
  for (int i = 0; i < 3000; ++i) {
    t += (rng() % 1000) / 10.0;
    std::string u = "u" + std::to_string(rng() % 500);
    bool fresh = users.insert(u).second;
    apply_global(s, rng() % 3 ? tweet(std::to_string(i), t, u) : retweet(std::to_string(i), t, u, "x"), fresh);
    std::uint64_t tw = 0, rtw = 0, nu = 0;
    for (const auto& [b, st] : s.buckets) {
      tw += st.tweets;
      rtw += st.retweets;
      nu += st.new_users;
    }
    ASSERT_EQ(tw, s.nb_tw);
    ASSERT_EQ(rtw, s.nb_rtw);
    ASSERT_EQ(nu, s.nb_us);
    ASSERT_EQ(s.gaps_tw, s.nb_tw ? s.nb_tw - 1 : 0);
    ASSERT_EQ(s.gaps_rtw, s.nb_rtw ? s.nb_rtw - 1 : 0);
    ASSERT_LE(s.nb_us, s.nb_tw + s.nb_rtw);
  }
  // AVG(Tw/Us) * nb_us = nb_tw, checked on the reduced fraction.
  auto g = global_snapshot(s);
  EXPECT_NEAR(*g.avg_tw_per_user * static_cast<double>(s.nb_us), static_cast<double>(s.nb_tw), 1e-9 * s.nb_tw);
}

namespace {

std::shared_ptr<GraphView> graph_of(std::vector<UserMeta> users) {
  return std::make_shared<GraphView>(GraphView::from_users(users));
}

}  // namespace

TEST(LocalMetrics, FirstEventHasEmptyNeighbourhood) {
  LocalState s(graph_of({user("1", 2, {"4", "5", "6"})}));
  EXPECT_TRUE(s.apply(tweet("a", 0, "1"), kT0));
  auto r = s.records()[0];
  EXPECT_EQ(r.nb_fg_p, 0u);
  EXPECT_EQ(r.total_r, 0u);
  EXPECT_EQ(r.elapsed_h, 0.0);
  EXPECT_EQ(r.nb_fe, 2u);
}

TEST(LocalMetrics, FollowingsWhoPostedBefore) {
  LocalState s(graph_of({user("A", 5, {"B", "C"}), user("B", 1), user("C", 0)}));
  for (int i = 0; i < 3; ++i) s.apply(tweet("b" + std::to_string(i), i, "B"), kT0);
  EXPECT_TRUE(s.apply(tweet("a", 7200, "A"), kT0));
  const auto& a = s.records().back();
  EXPECT_EQ(a.nb_fg_p, 1u);
  EXPECT_EQ(a.total_r, 3u);
  EXPECT_DOUBLE_EQ(a.elapsed_h, 2.0);
}

TEST(LocalMetrics, RetweetsByFollowingsCount) {
  LocalState s(graph_of({user("A", 5, {"B"}), user("B", 1)}));
  s.apply(retweet("b", 0, "B", "x"), kT0);
  s.apply(tweet("a", 1, "A"), kT0);
  EXPECT_EQ(s.records()[1].nb_fg_p, 1u);
}

TEST(LocalMetrics, ZeroFollowersAndGraphMiss) {
  LocalState s(graph_of({user("z", 0)}));
  s.apply(tweet("1", 0, "z"), kT0);
  s.apply(tweet("2", 1, "ghost"), kT0);
  EXPECT_EQ(s.records()[0].nb_fe, 0u);
  EXPECT_FALSE(s.records()[0].graph_miss);
  EXPECT_TRUE(s.records()[1].graph_miss);
  EXPECT_EQ(s.graph_miss(), 1u);
}

TEST(LocalMetrics, FreezeAndCounts) {
  LocalState s(graph_of({user("A", 5, {"B"}), user("B", 1, {"A"})}));
  s.apply(tweet("1", 0, "A"), kT0);
  auto frozen = s.records()[0];
  s.apply(tweet("2", 1, "B"), kT0);
  s.apply(retweet("3", 2, "A", "2"), kT0);
  s.apply(tweet("4", 3, "A"), kT0);
  auto a = s.records()[0];
  EXPECT_EQ(a.nb_fg_p, frozen.nb_fg_p);
  EXPECT_EQ(a.total_r, frozen.total_r);
  EXPECT_EQ(a.nb_t, 2u);
  EXPECT_EQ(a.nb_rt, 1u);
  EXPECT_EQ(s.records()[1].total_r, 1u);
  EXPECT_EQ(s.total_published(), 4u);
}

TEST(LocalMetrics, EmptyPopulation) {
  LocalState s(graph_of({}));
  EXPECT_TRUE(local_population(s).empty());
}

TEST(LocalMetrics, PrefixExactAgainstBruteForce) {
  std::mt19937 rng(11);
  const int n = 40;
  std::vector<UserMeta> g;
  for (int u = 0; u < n; ++u) {
    std::vector<std::string> f;
    for (int v = 0; v < n; ++v)
      if (v != u && rng() % 5 == 0) f.push_back("u" + std::to_string(v));
    g.push_back(user("u" + std::to_string(u), rng() % 50, f));
  }
  LocalState s(graph_of(g));
  std::vector<Message> log;
  for (int i = 0; i < 400; ++i) log.push_back(tweet(std::to_string(i), i, "u" + std::to_string(rng() % n)));
  for (const auto& m : log) s.apply(m, kT0);

  std::uint64_t total = 0;
  for (const auto& r : s.records()) {
    std::size_t first = 0;
    while (log[first].author != r.user) ++first;
    const auto& meta = g[std::stoi(r.user.substr(1))];
    std::uint64_t fg = 0, tot = 0;
    for (const auto& f : meta.followings) {
      std::uint64_t c = 0;
      for (std::size_t i = 0; i < first; ++i) c += log[i].author == f;
      fg += c > 0;
      tot += c;
    }
    EXPECT_EQ(r.nb_fg_p, fg);
    EXPECT_EQ(r.total_r, tot);
    EXPECT_GE(r.total_r, r.nb_fg_p);
    EXPECT_LE(r.nb_fg_p, meta.followings.size());
    total += r.nb_messages();
  }
  EXPECT_EQ(total, log.size());
  for (std::size_t i = 1; i < s.records().size(); ++i)
    EXPECT_LE(s.records()[i - 1].elapsed_h, s.records()[i].elapsed_h);
}
