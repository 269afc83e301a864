#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "diffscope/message.hpp"
#include "diffscope/report.hpp"

namespace diffscope {

/// Batch recomputation of a whole session from the raw source and graph,
/// written independently of the incremental engines. `duplicate_followings`
/// is the count already removed while reading the graph file.
SessionReport oracle_report(const SessionConfig& config, std::span<const Message> source,
                            const std::vector<UserMeta>& graph, std::uint64_t duplicate_followings = 0);

}  // namespace diffscope
