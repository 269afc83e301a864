#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "diffscope/graph_view.hpp"
#include "diffscope/message.hpp"

namespace diffscope {

/// Activity counts plus the neighbourhood snapshot frozen at first post.
struct UserLocalRecord {
  std::string user;
  std::uint64_t nb_t = 0;
  std::uint64_t nb_rt = 0;
  Timestamp first_post_ts{};
  std::uint64_t nb_fe = 0;
  std::uint64_t nb_fg_p = 0;
  std::uint64_t total_r = 0;
  double elapsed_h = 0.0;
  bool graph_miss = false;

  std::uint64_t nb_messages() const noexcept { return nb_t + nb_rt; }
  bool operator==(const UserLocalRecord&) const = default;
};

/// Publisher index and per-user records. Records are kept in first-post order.
class LocalState {
 public:
  explicit LocalState(std::shared_ptr<const GraphView> graph);

  /// Snapshots the author's neighbourhood if this is their first message,
  /// then counts the message. Returns true for a first message.
  bool apply(const Message& msg, Timestamp session_start);

  std::span<const UserLocalRecord> records() const noexcept { return records_; }
  std::uint64_t published_by(std::string_view user) const;
  std::uint64_t total_published() const noexcept { return total_published_; }
  std::size_t graph_miss() const noexcept { return graph_miss_; }
  const GraphView& graph() const noexcept { return *graph_; }

 private:
  UserId resolve(const std::string& author);

  std::shared_ptr<const GraphView> graph_;
  std::unordered_map<std::string, UserId> extra_ids_;
  std::vector<std::uint64_t> published_;
  std::vector<std::int64_t> record_of_;
  std::vector<UserLocalRecord> records_;
  std::uint64_t total_published_ = 0;
  std::size_t graph_miss_ = 0;
};

std::vector<UserLocalRecord> local_population(const LocalState& state);

}  // namespace diffscope
