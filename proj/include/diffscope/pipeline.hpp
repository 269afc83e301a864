#pragma once

#include "diffscope/event_io.hpp"
#include "diffscope/report.hpp"
#include "diffscope/source.hpp"

namespace diffscope {

/// Full session over `source` using the incremental engine.
SessionReport run_pipeline(const SessionConfig& config, MessageSource& source, const GraphFile& graph);

}  // namespace diffscope
