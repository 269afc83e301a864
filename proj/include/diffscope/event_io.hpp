#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diffscope/message.hpp"

namespace diffscope {

struct ParseOptions {
  // Rejects texts longer than 140 code points.
  bool legacy_140 = false;
};

/// Parses one event-log line:
///   {"id":..,"ts":..,"user":..,"kind":"tweet"|"retweet","rt_of":..,"text":..,
///    "links":[..],"tags":[..],"lang":..}
/// `lang` and `geo` are optional; `geo` is accepted and ignored.
/// Throws Error{MalformedRecord | InvalidKind | BadTimestamp | TextTooLong}.
Message parse_event_record(std::string_view line, std::uint64_t seq = 0, const ParseOptions& options = {});

/// Canonical single-line form; `ts` is always written in UTC.
std::string serialize_event_record(const Message& msg);

struct GraphRecord {
  UserMeta meta;
  std::size_t duplicates_removed = 0;
};

/// Parses {"user":..,"followers":N,"followings":[..]}. Ids may be strings or
/// non-negative integers. Duplicate followings are removed and counted.
/// Throws Error{MalformedRecord | SelfFollowing}.
GraphRecord parse_graph_record(std::string_view line);

std::string serialize_graph_record(const UserMeta& user);

/// Streams an event log line by line. Blank lines are skipped; `seq` is the
/// 1-based line number so that errors and ties refer back to the file.
class EventLogReader {
 public:
  explicit EventLogReader(const std::filesystem::path& path, ParseOptions options = {});

  std::optional<Message> next();
  std::size_t line() const noexcept { return line_; }

 private:
  std::ifstream in_;
  ParseOptions options_;
  std::size_t line_ = 0;
  std::string buffer_;
};

std::vector<Message> read_event_log(const std::filesystem::path& path, const ParseOptions& options = {});

struct GraphFile {
  std::vector<UserMeta> users;
  std::size_t duplicates_removed = 0;
};

GraphFile read_graph_file(const std::filesystem::path& path);

void write_event_log(const std::filesystem::path& path, const std::vector<Message>& log);
void write_graph_file(const std::filesystem::path& path, const std::vector<UserMeta>& users);

}  // namespace diffscope
