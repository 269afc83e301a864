#include "diffscope/metrics_local.hpp"

namespace diffscope {

LocalState::LocalState(std::shared_ptr<const GraphView> graph)
    : graph_(graph ? std::move(graph) : std::make_shared<const GraphView>()),
      published_(graph_->id_count(), 0),
      record_of_(graph_->id_count(), -1) {}

UserId LocalState::resolve(const std::string& author) {
  if (auto id = graph_->find(author)) return *id;
  auto [it, inserted] = extra_ids_.try_emplace(author, static_cast<UserId>(published_.size()));
  if (inserted) {
    published_.push_back(0);
    record_of_.push_back(-1);
  }
  return it->second;
}

bool LocalState::apply(const Message& msg, Timestamp session_start) {
  const UserId id = resolve(msg.author);
  bool is_new = record_of_[id] < 0;
  if (is_new) {
    UserLocalRecord rec;
    rec.user = msg.author;
    rec.first_post_ts = msg.ts;
    rec.elapsed_h = static_cast<double>((msg.ts - session_start).count()) / 3'600'000.0;
    if (id < graph_->id_count() && graph_->has_record(id)) {
      rec.nb_fe = graph_->followers(id);
      // The index does not yet contain msg, so this counts the strict prefix.
      for (UserId f : graph_->followings(id)) {
        std::uint64_t n = published_[f];
        if (n > 0) {
          ++rec.nb_fg_p;
          rec.total_r += n;
        }
      }
    } else {
      rec.graph_miss = true;
      ++graph_miss_;
    }
    record_of_[id] = static_cast<std::int64_t>(records_.size());
    records_.push_back(std::move(rec));
  }

  UserLocalRecord& rec = records_[static_cast<std::size_t>(record_of_[id])];
  if (msg.is_retweet()) ++rec.nb_rt;
  else ++rec.nb_t;
  ++published_[id];
  ++total_published_;
  return is_new;
}

std::uint64_t LocalState::published_by(std::string_view user) const {
  std::string key(user);
  if (auto id = graph_->find(key)) return published_[*id];
  auto it = extra_ids_.find(key);
  return it == extra_ids_.end() ? 0 : published_[it->second];
}

std::vector<UserLocalRecord> local_population(const LocalState& state) {
  return {state.records().begin(), state.records().end()};
}

}  // namespace diffscope
