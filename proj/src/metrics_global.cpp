#include "diffscope/metrics_global.hpp"

#include "diffscope/errors.hpp"

namespace diffscope {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> mean_seconds(std::int64_t sum_ms, std::uint64_t n) {
  if (n == 0) return std::nullopt;
  return static_cast<double>(sum_ms) / 1000.0 / static_cast<double>(n);
}

}  // namespace

std::int64_t GlobalState::bucket_of(Timestamp ts) const {
  return floor_div((ts - session_start).count(), bucket_width.count());
}

void apply_global(GlobalState& state, const Message& msg, bool is_new_user) {
  if (msg.ts < state.session_start)
    throw Error(Errc::OrderViolation, "message '" + msg.id + "' precedes the session start");
  if (state.last_ts && msg.ts < *state.last_ts)
    throw Error(Errc::OrderViolation, "message '" + msg.id + "' is older than the previous message");
  state.last_ts = msg.ts;

  BucketStats& bucket = state.buckets[state.bucket_of(msg.ts)];
  if (msg.is_retweet()) {
    ++state.nb_rtw;
    ++bucket.retweets;
    if (state.last_retweet_ts) {
      auto gap = (msg.ts - *state.last_retweet_ts).count();
      state.sum_gap_rtw_ms += gap;
      ++state.gaps_rtw;
      bucket.sum_gap_rtw_ms += gap;
      ++bucket.gaps_rtw;
    }
    state.last_retweet_ts = msg.ts;
  } else {
    ++state.nb_tw;
    ++bucket.tweets;
    if (state.last_tweet_ts) {
      auto gap = (msg.ts - *state.last_tweet_ts).count();
      state.sum_gap_tw_ms += gap;
      ++state.gaps_tw;
      bucket.sum_gap_tw_ms += gap;
      ++bucket.gaps_tw;
    }
    state.last_tweet_ts = msg.ts;
  }
  if (is_new_user) {
    ++state.nb_us;
    ++bucket.new_users;
  }
}

GlobalIndicators global_snapshot(const GlobalState& state) {
  GlobalIndicators g;
  g.nb_tw = state.nb_tw;
  g.nb_rtw = state.nb_rtw;
  g.nb_us = state.nb_us;
  g.avg_tw_per_user = ratio(state.nb_tw, state.nb_us);
  g.avg_rtw_per_user = ratio(state.nb_rtw, state.nb_us);
  g.avg_gap_tw_s = mean_seconds(state.sum_gap_tw_ms, state.gaps_tw);
  g.avg_gap_rtw_s = mean_seconds(state.sum_gap_rtw_ms, state.gaps_rtw);
  return g;
}

std::vector<SeriesRow> bucket_series(const GlobalState& state, std::optional<Duration> width) {
  std::int64_t factor = 1;
  if (width) {
    if (width->count() <= 0 || width->count() % state.bucket_width.count() != 0)
      throw Error(Errc::InvalidConfig, "series bucket must be a positive multiple of the session bucket width");
    factor = width->count() / state.bucket_width.count();
  }

  std::vector<SeriesRow> rows;
  if (state.buckets.empty()) return rows;
  const std::int64_t last = floor_div(state.buckets.rbegin()->first, factor);
  rows.reserve(static_cast<std::size_t>(last + 1));

  auto it = state.buckets.begin();
  BucketStats cum;
  for (std::int64_t b = 0; b <= last; ++b) {
    BucketStats cur;
    while (it != state.buckets.end() && floor_div(it->first, factor) == b) {
      const BucketStats& s = it->second;
      cur.tweets += s.tweets;
      cur.retweets += s.retweets;
      cur.new_users += s.new_users;
      cur.sum_gap_tw_ms += s.sum_gap_tw_ms;
      cur.gaps_tw += s.gaps_tw;
      cur.sum_gap_rtw_ms += s.sum_gap_rtw_ms;
      cur.gaps_rtw += s.gaps_rtw;
      ++it;
    }
    cum.tweets += cur.tweets;
    cum.retweets += cur.retweets;
    cum.new_users += cur.new_users;
    cum.sum_gap_tw_ms += cur.sum_gap_tw_ms;
    cum.gaps_tw += cur.gaps_tw;
    cum.sum_gap_rtw_ms += cur.sum_gap_rtw_ms;
    cum.gaps_rtw += cur.gaps_rtw;

    SeriesRow row;
    row.bucket = b;
    row.bucket_start = state.session_start + state.bucket_width * (b * factor);
    row.nb_tw = cur.tweets;
    row.nb_rtw = cur.retweets;
    row.new_users = cur.new_users;
    row.bkt_avg_gap_tw_s = mean_seconds(cur.sum_gap_tw_ms, cur.gaps_tw);
    row.bkt_avg_gap_rtw_s = mean_seconds(cur.sum_gap_rtw_ms, cur.gaps_rtw);
    row.cum_nb_tw = cum.tweets;
    row.cum_nb_rtw = cum.retweets;
    row.cum_nb_us = cum.new_users;
    row.cum_avg_tw_per_user = ratio(cum.tweets, cum.new_users);
    row.cum_avg_rtw_per_user = ratio(cum.retweets, cum.new_users);
    row.cum_avg_gap_tw_s = mean_seconds(cum.sum_gap_tw_ms, cum.gaps_tw);
    row.cum_avg_gap_rtw_s = mean_seconds(cum.sum_gap_rtw_ms, cum.gaps_rtw);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace diffscope
