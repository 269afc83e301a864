#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace diffscope::kernels {

/// (bin index, count) pairs sorted by index, where bin = floor(value / width).
using BinTally = std::vector<std::pair<std::int64_t, std::uint64_t>>;

/// Reference implementation.
BinTally tally_bins_serial(std::span<const double> values, double width);

/// OpenMP version; returns exactly what the serial one returns.
BinTally tally_bins_parallel(std::span<const double> values, double width);

/// Below this size the parallel kernel just calls the serial one.
inline constexpr std::size_t kParallelTallyThreshold = 1 << 14;

}  // namespace diffscope::kernels
