#include "diffscope/knowledge.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "diffscope/errors.hpp"
#include "diffscope/text.hpp"

namespace diffscope {

namespace {

constexpr std::string_view kStopwords[] = {
    // English
    "the", "and", "for", "are", "but", "not", "you", "all", "any", "can", "had", "her", "was", "one", "our",
    "out", "has", "have", "his", "how", "its", "may", "new", "now", "old", "see", "two", "who", "did", "get",
    "him", "let", "say", "she", "too", "use", "that", "this", "with", "from", "they", "will", "would", "there",
    "their", "what", "about", "which", "when", "your", "just", "than", "then", "them", "been", "were", "into",
    "more", "some", "also", "very", "here",
    // French
    "les", "des", "une", "est", "pas", "que", "qui", "sur", "par", "pour", "dans", "avec", "mais", "plus",
    "son", "ses", "aux", "ont", "cette", "sont", "tout", "nous", "vous", "elle", "ils", "leur", "été", "comme",
    "fait", "entre"};

std::vector<std::u32string> split_words(std::u32string_view folded) {
  std::vector<std::u32string> out;
  std::u32string cur;
  for (char32_t c : folded) {
    if (is_word_char(c)) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool is_dropped_chunk(std::string_view chunk) {
  if (chunk.empty()) return true;
  if (chunk.front() == '@' || chunk.front() == '#') return true;
  auto lower_prefix = [&](std::string_view p) {
    if (chunk.size() < p.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
      char c = chunk[i];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
      if (c != p[i]) return false;
    }
    return true;
  };
  return lower_prefix("http://") || lower_prefix("https://") || lower_prefix("www.");
}

}  // namespace

std::span<const std::string_view> default_stopwords() noexcept { return kStopwords; }

Tokenizer::Tokenizer(std::span<const std::string> keywords, std::span<const std::string> stopwords) {
  for (const auto& s : stopwords) dropped_.insert(encode_utf8(casefold(s)));
  for (const auto& k : keywords) {
    auto folded = casefold(k);
    for (const auto& w : split_words(folded)) dropped_.insert(encode_utf8(w));
    // "Holo Lens" should also drop "hololens".
    std::u32string joined;
    for (char32_t c : folded)
      if (is_word_char(c)) joined.push_back(c);
    if (!joined.empty()) dropped_.insert(encode_utf8(joined));
  }
}

Tokenizer::Tokenizer(std::span<const std::string> keywords)
    : Tokenizer(keywords, std::vector<std::string>(std::begin(kStopwords), std::end(kStopwords))) {}

std::vector<std::string> Tokenizer::operator()(std::string_view text) const {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    auto chunk = text.substr(i, j - i);
    i = j;
    if (is_dropped_chunk(chunk)) continue;
    for (const auto& w : split_words(casefold(chunk))) {
      if (w.size() < 3) continue;
      auto word = encode_utf8(w);
      if (dropped_.count(word) != 0) continue;
      out.push_back(std::move(word));
    }
  }
  return out;
}

void Tally::add(const std::string& key, std::uint64_t n) {
  auto [it, inserted] = index_.try_emplace(key, entries_.size());
  if (inserted) entries_.push_back({key, 0});
  entries_[it->second].count += n;
  total_ += n;
}

std::uint64_t Tally::count(const std::string& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? 0 : entries_[it->second].count;
}

std::vector<RankedItem> Tally::top(std::size_t k) const {
  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t n = std::min(k, order.size());
  auto before = [this](std::size_t a, std::size_t b) {
    if (entries_[a].count != entries_[b].count) return entries_[a].count > entries_[b].count;
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(), before);
  std::vector<RankedItem> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(entries_[order[i]]);
  return out;
}

KnowledgeState::KnowledgeState(Tokenizer tokenizer) : tokenizer_(std::move(tokenizer)) {}

void KnowledgeState::update(const Message& msg) {
  captured_.insert(msg.id);
  users_.add(msg.author);
  for (const auto& l : msg.links) links_.add(l);
  if (msg.is_retweet()) {
    retweets_.add(*msg.retweet_of);
  } else {
    for (const auto& w : tokenizer_(msg.text)) words_.add(w);
  }
}

KnowledgeSummary KnowledgeState::snapshot(std::size_t k) const {
  if (k == 0) throw Error(Errc::InvalidConfig, "k must be at least 1");
  KnowledgeSummary s;
  s.k = k;
  for (auto& item : retweets_.top(k))
    s.top_tweets.push_back({item.key, item.count, captured_.count(item.key) != 0});
  s.top_words = words_.top(k);
  s.top_users = users_.top(k);
  s.top_links = links_.top(k);
  return s;
}

}  // namespace diffscope
