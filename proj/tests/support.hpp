#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "diffscope/message.hpp"
#include "diffscope/time.hpp"

namespace diffscope::testing {

inline const Timestamp kT0 = parse_rfc3339("2015-01-23T10:00:00Z");

inline Timestamp at(double seconds) {
  return kT0 + Duration{static_cast<std::int64_t>(seconds * 1000.0)};
}

inline Message tweet(std::string id, double t, std::string author, std::string text = "HoloLens demo") {
  Message m;
  m.id = std::move(id);
  m.ts = at(t);
  m.author = std::move(author);
  m.text = std::move(text);
  return m;
}

inline Message retweet(std::string id, double t, std::string author, std::string of,
                       std::string text = "RT HoloLens demo") {
  Message m = tweet(std::move(id), t, std::move(author), std::move(text));
  m.kind = MessageKind::Retweet;
  m.retweet_of = std::move(of);
  return m;
}

inline UserMeta user(std::string id, std::uint64_t followers, std::vector<std::string> followings = {}) {
  return {std::move(id), followers, std::move(followings)};
}

inline SessionConfig config(std::vector<std::string> keywords = {"HoloLens", "Holo Lens"}) {
  SessionConfig c;
  c.keywords = std::move(keywords);
  return c;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);

}  // namespace diffscope::testing

#include <optional>

#include <json.hpp>

namespace diffscope::testing {

/// Every key of `expected` must exist in `actual` with an equal value; arrays
/// must have equal length and match element-wise. Returns the first mismatch.
std::optional<std::string> subset_mismatch(const nlohmann::json& expected, const nlohmann::json& actual,
                                           const std::string& path = "$");

std::filesystem::path fixture(const std::string& name);

}  // namespace diffscope::testing
