#include "diffscope/graph_view.hpp"

#include <unordered_set>

#include "diffscope/errors.hpp"
#include "diffscope/event_io.hpp"

namespace diffscope {

UserId GraphView::intern(const std::string& user) {
  auto [it, inserted] = index_.try_emplace(user, static_cast<UserId>(names_.size()));
  if (inserted) {
    names_.push_back(user);
    has_record_.push_back(false);
    followers_.push_back(0);
  }
  return it->second;
}

GraphView GraphView::from_users(const std::vector<UserMeta>& users) {
  GraphView g;
  for (const auto& u : users) {
    UserId id = g.intern(u.user_id);
    if (g.has_record_[id]) throw Error(Errc::DuplicateUser, "user '" + u.user_id + "' appears twice");
    g.has_record_[id] = true;
    g.followers_[id] = u.followers_count;
    ++g.record_count_;
  }
  for (const auto& u : users) {
    for (const auto& f : u.followings) {
      if (f == u.user_id) throw Error(Errc::SelfFollowing, "user '" + f + "' follows itself");
      g.intern(f);
    }
  }

  // CSR adjacency indexed by dense id; ids without a record get no edges.
  std::vector<const UserMeta*> by_id(g.names_.size(), nullptr);
  for (const auto& u : users) by_id[g.index_.at(u.user_id)] = &u;
  g.offsets_.assign(1, 0);
  g.offsets_.reserve(by_id.size() + 1);
  for (const UserMeta* u : by_id) {
    if (u != nullptr) {
      std::unordered_set<UserId> seen;
      for (const auto& f : u->followings) {
        UserId fid = g.index_.at(f);
        if (seen.insert(fid).second) g.edges_.push_back(fid);
        else ++g.duplicates_;
      }
    }
    g.offsets_.push_back(g.edges_.size());
  }
  return g;
}

GraphView GraphView::load(const std::filesystem::path& path) {
  auto file = read_graph_file(path);
  GraphView g = from_users(file.users);
  g.duplicates_ += file.duplicates_removed;
  return g;
}

std::optional<UserId> GraphView::find(std::string_view user) const {
  auto it = index_.find(std::string(user));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<UserMeta> GraphView::lookup(std::string_view user) const {
  auto id = find(user);
  if (!id || !has_record(*id)) return std::nullopt;
  UserMeta meta;
  meta.user_id = names_[*id];
  meta.followers_count = followers_[*id];
  for (UserId f : followings(*id)) meta.followings.push_back(names_[f]);
  return meta;
}

}  // namespace diffscope
