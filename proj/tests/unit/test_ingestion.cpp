#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <thread>

#include "diffscope/errors.hpp"
#include "diffscope/session.hpp"
#include "diffscope/source.hpp"
#include "diffscope/text.hpp"
#include "support.hpp"

using namespace diffscope;
using namespace diffscope::testing;

namespace {

std::shared_ptr<GraphView> empty_graph() { return std::make_shared<GraphView>(); }

std::string naive_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

TEST(KeywordMatch, PaperCases) {
  std::vector<std::string> holo = {"HoloLens", "Holo Lens"};
  std::vector<std::string> greek = {"Syriza", "Tsipras"};
  EXPECT_TRUE(keyword_match("Microsoft announces HOLOLENS today", holo));
  EXPECT_FALSE(keyword_match("greek elections tonight", greek));
  EXPECT_TRUE(keyword_match("tsipras wins", greek));
  EXPECT_TRUE(keyword_match("the holo lens is here", holo));
  EXPECT_FALSE(keyword_match("holo-lens", holo));
}

TEST(KeywordMatch, UnicodeFolding) {
  EXPECT_TRUE(keyword_match("\xce\xa3\xce\xa5\xce\xa1\xce\x99\xce\x96\xce\x91 victory", std::vector<std::string>{"\xcf\x83\xcf\x85\xcf\x81\xce\xb9\xce\xb6\xce\xb1"}));
  EXPECT_TRUE(keyword_match("\xc3\x89LECTIONS", std::vector<std::string>{"\xc3\xa9lections"}));
  EXPECT_TRUE(keyword_match("\xef\xbc\xa8\xef\xbd\x8f\xef\xbd\x8c\xef\xbd\x8f", std::vector<std::string>{"\xef\xbd\x88\xef\xbd\x8f\xef\xbd\x8c\xef\xbd\x8f"}));
}

TEST(KeywordMatch, AgreesWithNaiveLowercaseOnAscii) {
  std::mt19937 rng(7);
  const std::string alphabet = "abAB sS";
  std::vector<std::string> kws = {"Ab", "sSa"};
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    for (int j = 0; j < 12; ++j) text += alphabet[rng() % alphabet.size()];
    bool naive = false;
    for (const auto& k : kws) naive = naive || naive_lower(text).find(naive_lower(k)) != std::string::npos;
    EXPECT_EQ(keyword_match(text, kws), naive) << text;
  }
}

TEST(KeywordMatch, HashtagsAlsoMatch) {
  KeywordMatcher m(std::vector<std::string>{"HoloLens"});
  Message msg = tweet("1", 0, "a", "look at this");
  EXPECT_FALSE(m.matches(msg));
  msg.hashtags = {"hololens"};
  EXPECT_TRUE(m.matches(msg));
}

TEST(RunSession, EmptySource) {
  auto cfg = config();
  DiffusionEngine engine(cfg, empty_graph());
  VectorSource src({});
  auto stats = run_session(cfg, src, engine);
  EXPECT_EQ(stats, FilterStats{});
  EXPECT_EQ(engine.event_count(), 0u);
  EXPECT_TRUE(engine.local().records().empty());
  EXPECT_FALSE(engine.session_start());
}

TEST(RunSession, KeywordFilter) {
  auto cfg = config();
  DiffusionEngine engine(cfg, empty_graph());
  VectorSource src({tweet("1", 0, "a", "HoloLens!"), tweet("2", 1, "b", "nothing here"),
                    tweet("3", 2, "c", "holo lens again")});
  auto stats = run_session(cfg, src, engine);
  EXPECT_EQ(stats.seen, 3u);
  EXPECT_EQ(stats.accepted, 2u);
  EXPECT_EQ(stats.rejected_keyword, 1u);
  EXPECT_TRUE(stats.balanced());
}

TEST(RunSession, DuplicateIdDropped) {
  auto cfg = config();
  DiffusionEngine engine(cfg, empty_graph());
  VectorSource src({tweet("1", 0, "a"), tweet("2", 1, "b"), tweet("1", 2, "a")});
  auto stats = run_session(cfg, src, engine);
  EXPECT_EQ(stats.duplicates_dropped, 1u);
  EXPECT_EQ(stats.accepted, 2u);
  EXPECT_EQ(engine.global().nb_tw, 2u);
  EXPECT_EQ(engine.local().published_by("a"), 1u);
}

TEST(RunSession, LanguageFilterPassesUntagged) {
  auto cfg = config();
  cfg.language_filter = "fr";
  DiffusionEngine engine(cfg, empty_graph());
  auto a = tweet("1", 0, "a");
  a.lang = "FR";
  auto b = tweet("2", 1, "b");
  b.lang = "en";
  auto c = tweet("3", 2, "c");
  VectorSource src({a, b, c});
  auto stats = run_session(cfg, src, engine);
  EXPECT_EQ(stats.accepted, 2u);
  EXPECT_EQ(stats.rejected_language, 1u);
}

TEST(RunSession, WindowAndDuration) {
  auto cfg = config();
  cfg.start_ts = at(10);
  cfg.duration = std::chrono::seconds{10};
  DiffusionEngine engine(cfg, empty_graph());
  VectorSource src({tweet("1", 5, "a"), tweet("2", 10, "b"), tweet("3", 19.999, "c"), tweet("4", 20, "d"),
                    tweet("5", 30, "e")});
  auto stats = run_session(cfg, src, engine);
  EXPECT_EQ(stats.seen, 3u);
  EXPECT_EQ(stats.rejected_window, 1u);
  EXPECT_EQ(stats.accepted, 2u);
  EXPECT_TRUE(stats.balanced());
  EXPECT_EQ(*engine.session_start(), at(10));
}

TEST(RunSession, DurationFromFirstAccepted) {
  auto cfg = config();
  cfg.duration = std::chrono::hours{1};
  DiffusionEngine engine(cfg, empty_graph());
  VectorSource src({tweet("0", 0, "z", "off topic"), tweet("1", 100, "a"), tweet("2", 3699, "b"),
                    tweet("3", 3700, "c")});
  auto stats = run_session(cfg, src, engine);
  EXPECT_EQ(*engine.session_start(), at(100));
  EXPECT_EQ(stats.accepted, 2u);
  EXPECT_EQ(stats.seen, 3u);
}

TEST(RunSession, SourceOrderViolation) {
  auto cfg = config();
  DiffusionEngine engine(cfg, empty_graph());
  VectorSource src({tweet("1", 5, "a"), tweet("2", 4, "b")});
  try {
    run_session(cfg, src, engine);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SourceOrderViolation);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(RunSession, TiesAreAllowed) {
  auto cfg = config();
  DiffusionEngine engine(cfg, empty_graph());
  VectorSource src({tweet("1", 5, "a"), tweet("2", 5, "b")});
  EXPECT_EQ(run_session(cfg, src, engine).accepted, 2u);
}

TEST(RunSession, ConservationAfterEveryEvent) {
  auto cfg = config();
  DiffusionEngine engine(cfg, empty_graph());
  std::vector<Message> log;
  for (int i = 0; i < 200; ++i) log.push_back(tweet(std::to_string(i % 150), i, "u" + std::to_string(i % 7),
                                                   i % 3 ? "HoloLens" : "other"));
  VectorSource src(log);
  Ingestor ing(cfg, src, engine);
  int calls = 0;
  ing.on_event = [&](const Message&, bool) {
    ++calls;
    EXPECT_TRUE(ing.stats().balanced());
  };
  while (ing.step()) {
  }
  EXPECT_EQ(calls, 200);
}

TEST(Config, Validate) {
  SessionConfig c;
  c.keywords = {"  HoloLens "};
  c.validate();
  EXPECT_EQ(c.keywords[0], "HoloLens");
  c.keywords = {};
  EXPECT_THROW(c.validate(), Error);
  c.keywords = {"ok", "   "};
  EXPECT_THROW(c.validate(), Error);
  c.keywords = {"ok"};
  c.bucket_width = Duration{0};
  EXPECT_THROW(c.validate(), Error);
}

TEST(Queue, DropsOldestWhenFull) {
  MessageQueue q(2);
  q.push(tweet("1", 0, "a"));
  q.push(tweet("2", 1, "a"));
  q.push(tweet("3", 2, "a"));
  EXPECT_EQ(q.dropped(), 1u);
  EXPECT_EQ(q.pop()->id, "2");
  EXPECT_EQ(q.pop()->id, "3");
  q.close();
  EXPECT_FALSE(q.pop());
  EXPECT_FALSE(q.push(tweet("4", 3, "a")));
}

TEST(Queue, BlockingPopAcrossThreads) {
  auto q = std::make_shared<MessageQueue>();
  QueueSource src(q);
  std::thread producer([q] {
    for (int i = 0; i < 100; ++i) q->push(tweet(std::to_string(i), i, "a"));
    q->close();
  });
  int n = 0;
  while (auto m = src.next()) {
    EXPECT_EQ(m->seq, static_cast<std::uint64_t>(++n));
  }
  producer.join();
  EXPECT_EQ(n, 100);
  EXPECT_FALSE(src.finite());
}
