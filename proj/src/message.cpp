#include "diffscope/message.hpp"

#include "diffscope/errors.hpp"

namespace diffscope {

std::string_view kind_name(MessageKind kind) noexcept {
  return kind == MessageKind::Tweet ? "tweet" : "retweet";
}

std::string trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

void SessionConfig::validate() {
  if (keywords.empty()) throw Error(Errc::InvalidConfig, "at least one keyword is required");
  for (auto& k : keywords) {
    k = trim(k);
    if (k.empty()) throw Error(Errc::InvalidConfig, "keywords must be non-empty after trimming");
  }
  if (bucket_width.count() <= 0) throw Error(Errc::InvalidConfig, "bucket width must be positive");
  if (duration && duration->count() <= 0) throw Error(Errc::InvalidConfig, "duration must be positive");
  if (top_k == 0) throw Error(Errc::InvalidConfig, "k must be at least 1");
  if (language_filter) {
    *language_filter = trim(*language_filter);
    if (language_filter->empty()) language_filter.reset();
  }
}

}  // namespace diffscope
