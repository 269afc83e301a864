#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "diffscope/message.hpp"
#include "diffscope/time.hpp"

namespace diffscope {

/// Per-bucket accumulators. A gap belongs to the bucket of the later message.
struct BucketStats {
  std::uint64_t tweets = 0;
  std::uint64_t retweets = 0;
  std::uint64_t new_users = 0;
  std::int64_t sum_gap_tw_ms = 0;
  std::uint64_t gaps_tw = 0;
  std::int64_t sum_gap_rtw_ms = 0;
  std::uint64_t gaps_rtw = 0;

  bool operator==(const BucketStats&) const = default;
};

/// Running state behind the seven global indicators. Gaps are accumulated in
/// integer milliseconds so that totals are exact.
struct GlobalState {
  Timestamp session_start{};
  Duration bucket_width = std::chrono::hours{1};

  std::uint64_t nb_tw = 0;
  std::uint64_t nb_rtw = 0;
  std::uint64_t nb_us = 0;
  std::optional<Timestamp> last_tweet_ts;
  std::optional<Timestamp> last_retweet_ts;
  std::optional<Timestamp> last_ts;
  std::int64_t sum_gap_tw_ms = 0;
  std::int64_t sum_gap_rtw_ms = 0;
  std::uint64_t gaps_tw = 0;
  std::uint64_t gaps_rtw = 0;
  std::map<std::int64_t, BucketStats> buckets;

  GlobalState() = default;
  GlobalState(Timestamp start, Duration width) : session_start(start), bucket_width(width) {}

  std::int64_t bucket_of(Timestamp ts) const;
};

/// Throws Error{OrderViolation} when `msg` precedes the last applied message
/// or the session start.
void apply_global(GlobalState& state, const Message& msg, bool is_new_user);

struct GlobalIndicators {
  std::uint64_t nb_tw = 0;
  std::uint64_t nb_rtw = 0;
  std::uint64_t nb_us = 0;
  std::optional<double> avg_tw_per_user;
  std::optional<double> avg_rtw_per_user;
  std::optional<double> avg_gap_tw_s;
  std::optional<double> avg_gap_rtw_s;

  bool operator==(const GlobalIndicators&) const = default;
};

GlobalIndicators global_snapshot(const GlobalState& state);

struct SeriesRow {
  std::int64_t bucket = 0;
  Timestamp bucket_start{};
  std::uint64_t nb_tw = 0;
  std::uint64_t nb_rtw = 0;
  std::uint64_t new_users = 0;
  std::optional<double> bkt_avg_gap_tw_s;
  std::optional<double> bkt_avg_gap_rtw_s;
  std::uint64_t cum_nb_tw = 0;
  std::uint64_t cum_nb_rtw = 0;
  std::uint64_t cum_nb_us = 0;
  std::optional<double> cum_avg_tw_per_user;
  std::optional<double> cum_avg_rtw_per_user;
  std::optional<double> cum_avg_gap_tw_s;
  std::optional<double> cum_avg_gap_rtw_s;

  bool operator==(const SeriesRow&) const = default;
};

/// One row per bucket from the session start to the last event, zero-filled.
/// `width`, when given, must be a positive multiple of the state's bucket
/// width; consecutive buckets are merged. Throws Error{InvalidConfig}.
std::vector<SeriesRow> bucket_series(const GlobalState& state, std::optional<Duration> width = std::nullopt);

}  // namespace diffscope
