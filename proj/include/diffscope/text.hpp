#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diffscope/message.hpp"

namespace diffscope {

/// Decodes UTF-8; malformed sequences become U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
std::size_t codepoint_count(std::string_view s);

/// Unicode simple case folding (status C and S) for Latin, Greek, Cyrillic,
/// Armenian and fullwidth Latin. Other code points map to themselves.
char32_t simple_fold(char32_t c) noexcept;
std::u32string casefold(std::string_view s);

/// Letters and digits for tokenization purposes.
bool is_word_char(char32_t c) noexcept;

/// Case-insensitive substring test, OR over keywords.
bool keyword_match(std::string_view text, std::span<const std::string> keywords);

/// Pre-folded form of keyword_match for the per-event path. A message matches
/// when its text or any of its hashtags contains a keyword.
class KeywordMatcher {
 public:
  explicit KeywordMatcher(std::span<const std::string> keywords);

  bool matches(std::string_view text) const;
  bool matches(const Message& msg) const;

  const std::vector<std::u32string>& folded() const noexcept { return folded_; }

 private:
  std::vector<std::u32string> folded_;
};

}  // namespace diffscope
