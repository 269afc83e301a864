#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diffscope/time.hpp"

namespace diffscope {

enum class MessageKind { Tweet, Retweet };

std::string_view kind_name(MessageKind kind) noexcept;

/// One captured event. `seq` is the position assigned when the event was read
/// and gives the total order used for "before" comparisons when timestamps tie.
struct Message {
  std::string id;
  Timestamp ts{};
  std::string author;
  MessageKind kind = MessageKind::Tweet;
  std::optional<std::string> retweet_of;
  std::string text;
  std::vector<std::string> links;
  std::vector<std::string> hashtags;
  std::optional<std::string> lang;
  std::uint64_t seq = 0;

  bool is_retweet() const noexcept { return kind == MessageKind::Retweet; }
  bool operator==(const Message&) const = default;
};

/// One user of the follower graph snapshot. `followers_count` is the count the
/// platform reported, not the in-degree of the snapshot.
struct UserMeta {
  std::string user_id;
  std::uint64_t followers_count = 0;
  std::vector<std::string> followings;

  bool operator==(const UserMeta&) const = default;
};

struct SessionConfig {
  std::vector<std::string> keywords;
  std::optional<std::string> language_filter;
  // Defaults to the timestamp of the first accepted message.
  std::optional<Timestamp> start_ts;
  std::optional<Duration> duration;
  Duration bucket_width = std::chrono::hours{1};
  int display_offset_minutes = 60;
  std::size_t top_k = 10;
  // Replaces the shipped stopword lists when set.
  std::optional<std::vector<std::string>> stopwords;

  /// Trims keywords in place and checks every invariant.
  /// Throws Error{InvalidConfig}.
  void validate();
};

std::string trim(std::string_view s);

}  // namespace diffscope
