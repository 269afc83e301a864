#include "diffscope/pipeline.hpp"

namespace diffscope {

SessionReport run_pipeline(const SessionConfig& config, MessageSource& source, const GraphFile& graph) {
  auto view = std::make_shared<GraphView>(GraphView::from_users(graph.users));
  DiffusionEngine engine(config, view);
  FilterStats stats = run_session(config, source, engine);
  SessionReport r = build_report(engine, stats);
  r.diagnostics.graph_duplicate_followings += graph.duplicates_removed;
  return r;
}

}  // namespace diffscope
