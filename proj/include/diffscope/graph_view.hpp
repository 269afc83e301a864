#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "diffscope/message.hpp"

namespace diffscope {

using UserId = std::uint32_t;

/// Static follower-graph snapshot with dense user ids. Every id mentioned by
/// the snapshot is interned, including followings that have no record of their
/// own (partial crawls); `has_record` tells the two apart.
class GraphView {
 public:
  GraphView() = default;

  static GraphView from_users(const std::vector<UserMeta>& users);
  static GraphView load(const std::filesystem::path& path);

  std::optional<UserId> find(std::string_view user) const;
  std::optional<UserMeta> lookup(std::string_view user) const;

  std::size_t id_count() const noexcept { return names_.size(); }
  std::size_t record_count() const noexcept { return record_count_; }
  std::size_t duplicate_followings() const noexcept { return duplicates_; }

  bool has_record(UserId id) const noexcept { return has_record_[id]; }
  std::uint64_t followers(UserId id) const noexcept { return followers_[id]; }
  std::span<const UserId> followings(UserId id) const noexcept {
    return {edges_.data() + offsets_[id], edges_.data() + offsets_[id + 1]};
  }
  const std::string& name(UserId id) const noexcept { return names_[id]; }

 private:
  UserId intern(const std::string& user);

  std::unordered_map<std::string, UserId> index_;
  std::vector<std::string> names_;
  std::vector<bool> has_record_;
  std::vector<std::uint64_t> followers_;
  std::vector<std::size_t> offsets_{0};
  std::vector<UserId> edges_;
  std::size_t record_count_ = 0;
  std::size_t duplicates_ = 0;
};

}  // namespace diffscope
