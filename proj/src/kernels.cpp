#include "diffscope/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <omp.h>

namespace diffscope::kernels {

namespace {

std::int64_t bin_of(double v, double width) { return static_cast<std::int64_t>(std::floor(v / width)); }

}  // namespace

BinTally tally_bins_serial(std::span<const double> values, double width) {
  std::map<std::int64_t, std::uint64_t> counts;
  for (double v : values) ++counts[bin_of(v, width)];
  return {counts.begin(), counts.end()};
}

BinTally tally_bins_parallel(std::span<const double> values, double width) {
  if (values.size() < kParallelTallyThreshold) return tally_bins_serial(values, width);

  const int threads = omp_get_max_threads();
  std::vector<std::unordered_map<std::int64_t, std::uint64_t>> partial(static_cast<std::size_t>(threads));
  const auto n = static_cast<std::int64_t>(values.size());

#pragma omp parallel num_threads(threads)
  {
    auto& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) ++local[bin_of(values[static_cast<std::size_t>(i)], width)];
  }

  std::unordered_map<std::int64_t, std::uint64_t> merged;
  for (const auto& p : partial)
    for (const auto& [bin, c] : p) merged[bin] += c;
  BinTally out(merged.begin(), merged.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace diffscope::kernels
