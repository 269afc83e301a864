#include "diffscope/session.hpp"

#include "diffscope/errors.hpp"

namespace diffscope {

Tokenizer make_tokenizer(const SessionConfig& config) {
  if (config.stopwords) return Tokenizer(config.keywords, *config.stopwords);
  return Tokenizer(config.keywords);
}

DiffusionEngine::DiffusionEngine(const SessionConfig& config, std::shared_ptr<const GraphView> graph)
    : config_(config),
      start_(config.start_ts),
      global_(config.start_ts.value_or(Timestamp{}), config.bucket_width),
      local_(std::move(graph)),
      knowledge_(make_tokenizer(config)) {}

void DiffusionEngine::apply(const Message& msg) {
  if (!start_) {
    start_ = msg.ts;
    global_ = GlobalState(msg.ts, config_.bucket_width);
  }
  // Validate ordering before any engine is touched.
  if (msg.ts < *start_ || (global_.last_ts && msg.ts < *global_.last_ts))
    throw Error(Errc::OrderViolation, "message '" + msg.id + "' is out of order");
  const bool is_new = local_.apply(msg, *start_);
  apply_global(global_, msg, is_new);
  knowledge_.update(msg);
  ++events_;
}

Ingestor::Ingestor(const SessionConfig& config, MessageSource& source, DiffusionEngine& engine)
    : config_(config), source_(source), engine_(engine), matcher_(config.keywords) {
  if (config.language_filter) language_ = casefold(*config.language_filter);
}

bool Ingestor::fill() {
  if (pending_) return true;
  if (finished_) return false;
  pending_ = source_.next();
  if (!pending_) {
    finished_ = true;
    return false;
  }
  return true;
}

std::optional<Timestamp> Ingestor::peek_ts() {
  if (!fill()) return std::nullopt;
  return pending_->ts;
}

bool Ingestor::step() {
  if (!fill()) return false;
  Message msg = std::move(*pending_);
  pending_.reset();

  if (last_ts_ && msg.ts < *last_ts_) {
    throw Error(Errc::SourceOrderViolation,
                "message '" + msg.id + "' at " + format_rfc3339(msg.ts) + " precedes " + format_rfc3339(*last_ts_),
                static_cast<std::size_t>(msg.seq));
  }
  last_ts_ = msg.ts;

  auto start = engine_.session_start();
  if (start && config_.duration && msg.ts >= *start + *config_.duration) {
    finished_ = true;
    return false;
  }

  ++stats_.seen;
  bool accepted = false;
  if (!ids_.insert(msg.id).second) {
    ++stats_.duplicates_dropped;
  } else if (start && msg.ts < *start) {
    ++stats_.rejected_window;
  } else if (language_ && msg.lang && casefold(*msg.lang) != *language_) {
    ++stats_.rejected_language;
  } else if (!matcher_.matches(msg)) {
    ++stats_.rejected_keyword;
  } else {
    engine_.apply(msg);
    ++stats_.accepted;
    accepted = true;
  }
  if (on_event) on_event(msg, accepted);
  return true;
}

FilterStats run_session(const SessionConfig& config, MessageSource& source, DiffusionEngine& engine,
                        const std::function<void(const Message&, bool accepted)>& on_event) {
  Ingestor ingestor(config, source, engine);
  ingestor.on_event = on_event;
  while (ingestor.step()) {
  }
  return ingestor.stats();
}

}  // namespace diffscope
