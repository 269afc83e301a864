#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>

#include "diffscope/graph_view.hpp"
#include "diffscope/knowledge.hpp"
#include "diffscope/message.hpp"
#include "diffscope/metrics_global.hpp"
#include "diffscope/metrics_local.hpp"
#include "diffscope/source.hpp"
#include "diffscope/text.hpp"

namespace diffscope {

/// seen = accepted + rejected_keyword + rejected_language + rejected_window
///        + duplicates_dropped
struct FilterStats {
  std::uint64_t seen = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected_keyword = 0;
  std::uint64_t rejected_language = 0;
  // Messages timestamped before an explicit session start.
  std::uint64_t rejected_window = 0;
  std::uint64_t duplicates_dropped = 0;

  bool balanced() const noexcept {
    return seen == accepted + rejected_keyword + rejected_language + rejected_window + duplicates_dropped;
  }
  bool operator==(const FilterStats&) const = default;
};

/// The three incremental engines fed in lockstep. The session start is fixed
/// by the config or by the first applied message.
class DiffusionEngine {
 public:
  DiffusionEngine(const SessionConfig& config, std::shared_ptr<const GraphView> graph);

  void apply(const Message& msg);

  const SessionConfig& config() const noexcept { return config_; }
  std::optional<Timestamp> session_start() const noexcept { return start_; }
  const GlobalState& global() const noexcept { return global_; }
  const LocalState& local() const noexcept { return local_; }
  const KnowledgeState& knowledge() const noexcept { return knowledge_; }
  std::uint64_t event_count() const noexcept { return events_; }

 private:
  SessionConfig config_;
  std::optional<Timestamp> start_;
  GlobalState global_;
  LocalState local_;
  KnowledgeState knowledge_;
  std::uint64_t events_ = 0;
};

Tokenizer make_tokenizer(const SessionConfig& config);

/// Drives one session: pulls from the source, filters, and applies accepted
/// messages to the engine one at a time.
class Ingestor {
 public:
  Ingestor(const SessionConfig& config, MessageSource& source, DiffusionEngine& engine);

  /// Timestamp of the next message, pulled ahead and buffered.
  /// Returns nullopt at the end of the stream.
  std::optional<Timestamp> peek_ts();

  /// Processes one source message. Returns false at end of stream, or once the
  /// configured duration has elapsed.
  bool step();

  const FilterStats& stats() const noexcept { return stats_; }
  bool finished() const noexcept { return finished_; }

  /// Called after every processed message (accepted or not).
  std::function<void(const Message&, bool accepted)> on_event;

 private:
  bool fill();

  SessionConfig config_;
  MessageSource& source_;
  DiffusionEngine& engine_;
  KeywordMatcher matcher_;
  std::optional<std::u32string> language_;
  std::unordered_set<std::string> ids_;
  std::optional<Message> pending_;
  std::optional<Timestamp> last_ts_;
  FilterStats stats_;
  bool finished_ = false;
};

FilterStats run_session(const SessionConfig& config, MessageSource& source, DiffusionEngine& engine,
                        const std::function<void(const Message&, bool accepted)>& on_event = {});

}  // namespace diffscope
