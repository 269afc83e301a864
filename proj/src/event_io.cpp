#include "diffscope/event_io.hpp"

#include <algorithm>
#include <unordered_set>

#include <json.hpp>

#include "diffscope/errors.hpp"
#include "diffscope/text.hpp"

namespace diffscope {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void malformed(const std::string& why) { throw Error(Errc::MalformedRecord, why); }

json parse_object(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) malformed("record is not a JSON object");
  return doc;
}

// Ids are strings in the canonical form but integer ids are common in crawls.
std::string id_value(const json& v, const char* field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return std::to_string(v.get<std::int64_t>());
  malformed(std::string("field '") + field + "' must be a string or non-negative integer");
}

const json& required(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end() || it->is_null()) malformed(std::string("missing field '") + field + "'");
  return *it;
}

std::vector<std::string> string_list(const json& doc, const char* field) {
  std::vector<std::string> out;
  auto it = doc.find(field);
  if (it == doc.end() || it->is_null()) return out;
  if (!it->is_array()) malformed(std::string("field '") + field + "' must be an array");
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_string()) malformed(std::string("entries of '") + field + "' must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

Message parse_event_record(std::string_view line, std::uint64_t seq, const ParseOptions& options) {
  json doc = parse_object(line);
  Message msg;
  msg.seq = seq;
  msg.id = id_value(required(doc, "id"), "id");
  if (msg.id.empty()) malformed("field 'id' must be non-empty");

  const json& ts = required(doc, "ts");
  if (!ts.is_string()) throw Error(Errc::BadTimestamp, "field 'ts' must be an RFC 3339 string");
  msg.ts = parse_rfc3339(ts.get<std::string>());

  msg.author = id_value(required(doc, "user"), "user");
  if (msg.author.empty()) malformed("field 'user' must be non-empty");

  const json& kind = required(doc, "kind");
  if (!kind.is_string()) malformed("field 'kind' must be a string");
  const auto& k = kind.get_ref<const std::string&>();
  if (k == "tweet") msg.kind = MessageKind::Tweet;
  else if (k == "retweet") msg.kind = MessageKind::Retweet;
  else throw Error(Errc::InvalidKind, "unknown kind '" + k + "'");

  if (auto it = doc.find("rt_of"); it != doc.end() && !it->is_null()) msg.retweet_of = id_value(*it, "rt_of");
  if (msg.is_retweet() && !msg.retweet_of) throw Error(Errc::InvalidKind, "retweet without rt_of");
  if (!msg.is_retweet() && msg.retweet_of) throw Error(Errc::InvalidKind, "tweet with rt_of");
  if (msg.retweet_of && msg.retweet_of->empty()) throw Error(Errc::InvalidKind, "empty rt_of");

  if (auto it = doc.find("text"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) malformed("field 'text' must be a string");
    msg.text = it->get<std::string>();
  }
  if (options.legacy_140 && codepoint_count(msg.text) > 140)
    throw Error(Errc::TextTooLong, "text exceeds 140 characters");

  msg.links = string_list(doc, "links");
  msg.hashtags = string_list(doc, "tags");

  if (auto it = doc.find("lang"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) malformed("field 'lang' must be a string");
    msg.lang = it->get<std::string>();
  }
  return msg;
}

std::string serialize_event_record(const Message& msg) {
  ordered_json doc;
  doc["id"] = msg.id;
  doc["ts"] = format_rfc3339(msg.ts);
  doc["user"] = msg.author;
  doc["kind"] = kind_name(msg.kind);
  if (msg.retweet_of) doc["rt_of"] = *msg.retweet_of;
  doc["text"] = msg.text;
  doc["links"] = msg.links;
  doc["tags"] = msg.hashtags;
  if (msg.lang) doc["lang"] = *msg.lang;
  return doc.dump(-1, ' ', false, json::error_handler_t::replace);
}

GraphRecord parse_graph_record(std::string_view line) {
  json doc = parse_object(line);
  GraphRecord rec;
  rec.meta.user_id = id_value(required(doc, "user"), "user");
  if (rec.meta.user_id.empty()) malformed("field 'user' must be non-empty");

  if (auto it = doc.find("followers"); it != doc.end() && !it->is_null()) {
    if (it->is_number_unsigned()) rec.meta.followers_count = it->get<std::uint64_t>();
    else if (it->is_number_integer() && it->get<std::int64_t>() >= 0)
      rec.meta.followers_count = static_cast<std::uint64_t>(it->get<std::int64_t>());
    else malformed("field 'followers' must be a non-negative integer");
  }

  if (auto it = doc.find("followings"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) malformed("field 'followings' must be an array");
    std::unordered_set<std::string> seen;
    for (const auto& v : *it) {
      auto f = id_value(v, "followings");
      if (f == rec.meta.user_id) throw Error(Errc::SelfFollowing, "user '" + f + "' follows itself");
      if (!seen.insert(f).second) {
        ++rec.duplicates_removed;
        continue;
      }
      rec.meta.followings.push_back(std::move(f));
    }
  }
  return rec;
}

std::string serialize_graph_record(const UserMeta& user) {
  ordered_json doc;
  doc["user"] = user.user_id;
  doc["followers"] = user.followers_count;
  doc["followings"] = user.followings;
  return doc.dump(-1, ' ', false, json::error_handler_t::replace);
}

EventLogReader::EventLogReader(const std::filesystem::path& path, ParseOptions options)
    : in_(path), options_(options) {
  if (!in_) throw Error(Errc::Io, "cannot open event log '" + path.string() + "'");
}

std::optional<Message> EventLogReader::next() {
  while (std::getline(in_, buffer_)) {
    ++line_;
    if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
    if (buffer_.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      return parse_event_record(buffer_, line_, options_);
    } catch (const Error& e) {
      throw e.with_line(line_);
    }
  }
  return std::nullopt;
}

std::vector<Message> read_event_log(const std::filesystem::path& path, const ParseOptions& options) {
  EventLogReader reader(path, options);
  std::vector<Message> out;
  while (auto m = reader.next()) out.push_back(std::move(*m));
  return out;
}

GraphFile read_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open graph snapshot '" + path.string() + "'");
  GraphFile out;
  std::unordered_set<std::string> users;
  std::string buf;
  std::size_t line = 0;
  while (std::getline(in, buf)) {
    ++line;
    if (!buf.empty() && buf.back() == '\r') buf.pop_back();
    if (buf.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      auto rec = parse_graph_record(buf);
      if (!users.insert(rec.meta.user_id).second)
        throw Error(Errc::DuplicateUser, "user '" + rec.meta.user_id + "' appears twice");
      out.duplicates_removed += rec.duplicates_removed;
      out.users.push_back(std::move(rec.meta));
    } catch (const Error& e) {
      throw e.with_line(line);
    }
  }
  return out;
}

void write_event_log(const std::filesystem::path& path, const std::vector<Message>& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write '" + path.string() + "'");
  for (const auto& m : log) out << serialize_event_record(m) << '\n';
}

void write_graph_file(const std::filesystem::path& path, const std::vector<UserMeta>& users) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write '" + path.string() + "'");
  for (const auto& u : users) out << serialize_graph_record(u) << '\n';
}

}  // namespace diffscope
