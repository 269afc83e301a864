#include "diffscope/text.hpp"

#include <algorithm>
#include <functional>

namespace diffscope {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    std::size_t len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > n) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range values.
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::size_t codepoint_count(std::string_view s) { return decode_utf8(s).size(); }

char32_t simple_fold(char32_t c) noexcept {
  auto even_pair = [c](char32_t lo, char32_t hi) { return c >= lo && c <= hi && (c - lo) % 2 == 0; };

  if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
  if (c == 0xB5) return 0x3BC;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c < 0x100) return c;

  // Latin Extended-A
  if (even_pair(0x100, 0x12E) || even_pair(0x132, 0x136) || even_pair(0x14A, 0x176)) return c + 1;
  if ((c >= 0x139 && c <= 0x147 && (c - 0x139) % 2 == 0) || (c >= 0x179 && c <= 0x17D && (c - 0x179) % 2 == 0))
    return c + 1;
  if (c == 0x178) return 0xFF;
  if (c == 0x17F) return 's';

  // Greek
  if (c == 0x386) return 0x3AC;
  if (c >= 0x388 && c <= 0x38A) return c + 37;
  if (c == 0x38C) return 0x3CC;
  if (c == 0x38E || c == 0x38F) return c + 63;
  if ((c >= 0x391 && c <= 0x3A1) || (c >= 0x3A3 && c <= 0x3AB)) return c + 32;
  switch (c) {
    case 0x3C2: return 0x3C3;
    case 0x3D0: return 0x3B2;
    case 0x3D1: return 0x3B8;
    case 0x3D5: return 0x3C6;
    case 0x3D6: return 0x3C0;
    case 0x3F0: return 0x3BA;
    case 0x3F1: return 0x3C1;
    case 0x3F5: return 0x3B5;
    default: break;
  }

  // Cyrillic
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (even_pair(0x460, 0x480) || even_pair(0x48A, 0x4BE) || even_pair(0x4D0, 0x52E)) return c + 1;
  if (c == 0x4C0) return 0x4CF;
  if (c >= 0x4C1 && c <= 0x4CD && (c - 0x4C1) % 2 == 0) return c + 1;

  // Armenian
  if (c >= 0x531 && c <= 0x556) return c + 48;

  // Latin Extended Additional
  if (even_pair(0x1E00, 0x1E94) || even_pair(0x1EA0, 0x1EFE)) return c + 1;
  if (c == 0x1E9E) return 0xDF;

  // Fullwidth Latin
  if (c >= 0xFF21 && c <= 0xFF3A) return c + 32;
  return c;
}

std::u32string casefold(std::string_view s) {
  std::u32string out = decode_utf8(s);
  for (char32_t& c : out) c = simple_fold(c);
  return out;
}

bool is_word_char(char32_t c) noexcept {
  if (c < 0x80) return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  if (c < 0xC0) return c == 0xAA || c == 0xB5 || c == 0xBA;
  if (c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;  // punctuation, symbols, arrows, shapes
  if (c >= 0x3000 && c <= 0x303F) return false;  // CJK punctuation
  if (c >= 0xD800 && c <= 0xF8FF) return false;  // surrogates, private use
  if (c >= 0xFE00 && c <= 0xFE0F) return false;  // variation selectors
  if (c >= 0xFF00 && c <= 0xFF0F) return false;
  if (c == 0xFFFD) return false;
  if (c >= 0x1F000) return false;                 // emoji and pictographs
  return true;
}

namespace {

bool contains(const std::u32string& haystack, const std::u32string& needle) {
  if (needle.empty()) return false;
  if (needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(),
                     std::boyer_moore_horspool_searcher(needle.begin(), needle.end())) != haystack.end();
}

}  // namespace

bool keyword_match(std::string_view text, std::span<const std::string> keywords) {
  return KeywordMatcher(keywords).matches(text);
}

KeywordMatcher::KeywordMatcher(std::span<const std::string> keywords) {
  folded_.reserve(keywords.size());
  for (const auto& k : keywords) {
    auto f = casefold(k);
    if (!f.empty()) folded_.push_back(std::move(f));
  }
}

bool KeywordMatcher::matches(std::string_view text) const {
  auto folded = casefold(text);
  return std::any_of(folded_.begin(), folded_.end(), [&](const std::u32string& k) { return contains(folded, k); });
}

bool KeywordMatcher::matches(const Message& msg) const {
  if (matches(msg.text)) return true;
  return std::any_of(msg.hashtags.begin(), msg.hashtags.end(), [&](const std::string& t) { return matches(t); });
}

}  // namespace diffscope
