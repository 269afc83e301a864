#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "diffscope/event_io.hpp"
#include "diffscope/message.hpp"

namespace diffscope {

/// Pull-based stream of messages in non-decreasing timestamp order.
class MessageSource {
 public:
  virtual ~MessageSource() = default;

  virtual std::optional<Message> next() = 0;
  virtual bool finite() const = 0;
  virtual std::optional<std::size_t> size_hint() const { return std::nullopt; }
};

class ReplaySource final : public MessageSource {
 public:
  explicit ReplaySource(const std::filesystem::path& log, ParseOptions options = {});

  std::optional<Message> next() override { return reader_.next(); }
  bool finite() const override { return true; }

 private:
  EventLogReader reader_;
};

/// In-memory log; `seq` is rewritten to the 1-based position.
class VectorSource final : public MessageSource {
 public:
  explicit VectorSource(std::vector<Message> log);

  std::optional<Message> next() override;
  bool finite() const override { return true; }
  std::optional<std::size_t> size_hint() const override { return log_.size(); }

 private:
  std::vector<Message> log_;
  std::size_t pos_ = 0;
};

/// Bounded multi-producer queue that drops its oldest entry when full.
class MessageQueue {
 public:
  static constexpr std::size_t kDefaultCapacity = 65'536;

  explicit MessageQueue(std::size_t capacity = kDefaultCapacity);

  /// Returns false if the queue is closed.
  bool push(Message msg);
  /// Blocks until a message is available or the queue is closed and drained.
  std::optional<Message> pop();
  void close();

  std::size_t dropped() const;
  std::size_t size() const;
  bool closed() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Message> items_;
  std::size_t capacity_;
  std::size_t dropped_ = 0;
  bool closed_ = false;
};

/// Unbounded source fed by a live adapter through a MessageQueue.
class QueueSource final : public MessageSource {
 public:
  explicit QueueSource(std::shared_ptr<MessageQueue> queue) : queue_(std::move(queue)) {}

  std::optional<Message> next() override;
  bool finite() const override { return false; }

  MessageQueue& queue() { return *queue_; }

 private:
  std::shared_ptr<MessageQueue> queue_;
  std::uint64_t seq_ = 0;
};

}  // namespace diffscope
