#include "diffscope/source.hpp"

namespace diffscope {

ReplaySource::ReplaySource(const std::filesystem::path& log, ParseOptions options) : reader_(log, options) {}

VectorSource::VectorSource(std::vector<Message> log) : log_(std::move(log)) {
  for (std::size_t i = 0; i < log_.size(); ++i) log_[i].seq = i + 1;
}

std::optional<Message> VectorSource::next() {
  if (pos_ >= log_.size()) return std::nullopt;
  return log_[pos_++];
}

MessageQueue::MessageQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

bool MessageQueue::push(Message msg) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return false;
    if (items_.size() >= capacity_) {
      items_.pop_front();
      ++dropped_;
    }
    items_.push_back(std::move(msg));
  }
  cv_.notify_one();
  return true;
}

std::optional<Message> MessageQueue::pop() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return !items_.empty() || closed_; });
  if (items_.empty()) return std::nullopt;
  Message m = std::move(items_.front());
  items_.pop_front();
  return m;
}

void MessageQueue::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

std::size_t MessageQueue::dropped() const {
  std::lock_guard lock(mu_);
  return dropped_;
}

std::size_t MessageQueue::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

bool MessageQueue::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::optional<Message> QueueSource::next() {
  auto m = queue_->pop();
  if (m) m->seq = ++seq_;
  return m;
}

}  // namespace diffscope
