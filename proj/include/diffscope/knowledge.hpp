#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "diffscope/message.hpp"

namespace diffscope {

/// Shipped stopwords: a short English list followed by a short French list.
std::span<const std::string_view> default_stopwords() noexcept;

/// Splits text into case-folded words. Whitespace-delimited chunks that are
/// URLs, @-mentions or #hashtags are dropped whole; the rest is split on
/// non-alphanumeric boundaries. Words under three code points, stopwords and
/// any word of a session keyword are discarded.
class Tokenizer {
 public:
  Tokenizer(std::span<const std::string> keywords, std::span<const std::string> stopwords);
  /// Uses default_stopwords().
  explicit Tokenizer(std::span<const std::string> keywords);

  std::vector<std::string> operator()(std::string_view text) const;

 private:
  std::unordered_set<std::string> dropped_;
};

struct RankedTweet {
  std::string id;
  std::uint64_t retweets = 0;
  bool captured = false;

  bool operator==(const RankedTweet&) const = default;
};

struct RankedItem {
  std::string key;
  std::uint64_t count = 0;

  bool operator==(const RankedItem&) const = default;
};

struct KnowledgeSummary {
  std::size_t k = 0;
  std::vector<RankedTweet> top_tweets;
  std::vector<RankedItem> top_words;
  std::vector<RankedItem> top_users;
  std::vector<RankedItem> top_links;

  bool operator==(const KnowledgeSummary&) const = default;
};

/// Exact counts with first-seen order kept for tie-breaking.
class Tally {
 public:
  void add(const std::string& key, std::uint64_t n = 1);
  std::uint64_t count(const std::string& key) const;
  std::size_t size() const noexcept { return entries_.size(); }
  std::uint64_t total() const noexcept { return total_; }

  /// Descending count, ties by first-seen order.
  std::vector<RankedItem> top(std::size_t k) const;

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<RankedItem> entries_;
  std::uint64_t total_ = 0;
};

class KnowledgeState {
 public:
  explicit KnowledgeState(Tokenizer tokenizer);

  void update(const Message& msg);
  KnowledgeSummary snapshot(std::size_t k) const;

  const Tally& retweets() const noexcept { return retweets_; }
  const Tally& words() const noexcept { return words_; }
  const Tally& users() const noexcept { return users_; }
  const Tally& links() const noexcept { return links_; }

 private:
  Tokenizer tokenizer_;
  Tally retweets_;
  Tally words_;
  Tally users_;
  Tally links_;
  std::unordered_set<std::string> captured_;
};

}  // namespace diffscope
