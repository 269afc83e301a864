#include "diffscope/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "diffscope/errors.hpp"
#include "diffscope/kernels.hpp"

namespace diffscope {

namespace {

constexpr std::int64_t kElapsedWindowHours = 72;

std::vector<const UserLocalRecord*> included(std::span<const UserLocalRecord> records, bool include_graph_miss) {
  std::vector<const UserLocalRecord*> out;
  out.reserve(records.size());
  for (const auto& r : records)
    if (include_graph_miss || !r.graph_miss) out.push_back(&r);
  return out;
}

GroupSummary summarize(const std::vector<double>& ys) {
  GroupSummary g;
  g.count = ys.size();
  if (ys.empty()) return g;
  auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
  g.y_min = *mn;
  g.y_max = *mx;
  double sum = 0;
  for (double y : ys) sum += y;
  const double mean = sum / static_cast<double>(ys.size());
  g.y_mean = mean;
  double ss = 0;
  for (double y : ys) ss += (y - mean) * (y - mean);
  if (mean != 0) g.y_cv = std::sqrt(ss / static_cast<double>(ys.size())) / std::fabs(mean);
  return g;
}

}  // namespace

LocalField parse_local_field(std::string_view name) {
  if (name == "nb_messages") return LocalField::NbMessages;
  if (name == "nb_t") return LocalField::NbT;
  if (name == "nb_rt") return LocalField::NbRt;
  if (name == "nb_fe") return LocalField::NbFe;
  if (name == "nb_fg_p") return LocalField::NbFgP;
  if (name == "total_r") return LocalField::TotalR;
  if (name == "elapsed_h") return LocalField::ElapsedH;
  throw Error(Errc::UnknownField, "unknown local field '" + std::string(name) + "'");
}

std::string_view field_name(LocalField field) noexcept {
  switch (field) {
    case LocalField::NbMessages: return "nb_messages";
    case LocalField::NbT: return "nb_t";
    case LocalField::NbRt: return "nb_rt";
    case LocalField::NbFe: return "nb_fe";
    case LocalField::NbFgP: return "nb_fg_p";
    case LocalField::TotalR: return "total_r";
    case LocalField::ElapsedH: return "elapsed_h";
  }
  return "";
}

double field_value(const UserLocalRecord& rec, LocalField field) noexcept {
  switch (field) {
    case LocalField::NbMessages: return static_cast<double>(rec.nb_messages());
    case LocalField::NbT: return static_cast<double>(rec.nb_t);
    case LocalField::NbRt: return static_cast<double>(rec.nb_rt);
    case LocalField::NbFe: return static_cast<double>(rec.nb_fe);
    case LocalField::NbFgP: return static_cast<double>(rec.nb_fg_p);
    case LocalField::TotalR: return static_cast<double>(rec.total_r);
    case LocalField::ElapsedH: return rec.elapsed_h;
  }
  return 0;
}

bool excludes_graph_miss_by_default(LocalField field) noexcept {
  return field == LocalField::NbFe || field == LocalField::NbFgP || field == LocalField::TotalR;
}

Histogram distribution(std::span<const UserLocalRecord> records, LocalField field,
                       std::optional<bool> include_graph_miss) {
  const bool with_miss = include_graph_miss.value_or(!excludes_graph_miss_by_default(field));
  auto pop = included(records, with_miss);

  std::vector<double> values;
  values.reserve(pop.size());
  for (const auto* r : pop) values.push_back(field_value(*r, field));

  Histogram h;
  h.field = field;
  h.population = values.size();
  if (values.empty()) return h;

  auto tally = kernels::tally_bins_parallel(values, 1.0);
  if (field == LocalField::ElapsedH) {
    std::int64_t last = std::max<std::int64_t>(kElapsedWindowHours - 1, tally.back().first);
    std::size_t j = 0;
    for (std::int64_t b = 0; b <= last; ++b) {
      std::uint64_t c = 0;
      if (j < tally.size() && tally[j].first == b) c = tally[j++].second;
      h.bins.push_back({static_cast<double>(b), static_cast<double>(b + 1), c});
    }
  } else {
    for (const auto& [b, c] : tally) h.bins.push_back({static_cast<double>(b), static_cast<double>(b + 1), c});
  }

  std::uint64_t zeros = 0;
  std::uint64_t ones = 0;
  for (double v : values) {
    zeros += v == 0.0;
    ones += v == 1.0;
  }
  h.share_at_zero = static_cast<double>(zeros) / static_cast<double>(h.population);
  h.share_at_one = static_cast<double>(ones) / static_cast<double>(h.population);
  return h;
}

std::vector<CcdfPoint> ccdf(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptyPopulation, "ccdf of an empty population");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<CcdfPoint> out;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    out.push_back({sorted[i], static_cast<double>(sorted.size() - i) / n});
    i = j;
  }
  return out;
}

double loglog_slope(std::span<const CcdfPoint> points, double min_value) {
  const double floor_value = std::max(min_value, 1.0);
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : points)
    if (p.value >= floor_value && p.fraction > 0) xy.emplace_back(std::log10(p.value), std::log10(p.fraction));
  if (xy.size() < 3) throw Error(Errc::InsufficientPoints, "need at least 3 ccdf points above the threshold");

  double mx = 0;
  double my = 0;
  for (auto [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(xy.size());
  my /= static_cast<double>(xy.size());
  double sxy = 0;
  double sxx = 0;
  for (auto [x, y] : xy) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  if (sxx == 0) throw Error(Errc::InsufficientPoints, "ccdf points share a single value");
  return sxy / sxx;
}

ScatterSeries correlation_scatter(std::span<const UserLocalRecord> records, LocalField x, LocalField y,
                                  double threshold, bool include_graph_miss) {
  ScatterSeries s;
  s.x_field = x;
  s.y_field = y;
  s.threshold = threshold;
  std::vector<double> low;
  std::vector<double> high;
  for (const auto* r : included(records, include_graph_miss)) {
    ScatterPoint p{r->user, field_value(*r, x), field_value(*r, y)};
    (p.x > threshold ? high : low).push_back(p.y);
    s.points.push_back(std::move(p));
  }
  s.low = summarize(low);
  s.high = summarize(high);
  return s;
}

ElapsedSummary elapsed_summary(std::span<const UserLocalRecord> records) {
  if (records.empty()) throw Error(Errc::EmptyPopulation, "elapsed summary of an empty population");
  std::uint64_t d1 = 0;
  std::uint64_t d2 = 0;
  std::uint64_t d3 = 0;
  std::uint64_t last = 0;
  for (const auto& r : records) {
    d1 += r.elapsed_h < 24.0;
    d2 += r.elapsed_h < 48.0;
    d3 += r.elapsed_h < 72.0;
    last += r.elapsed_h >= 48.0 && r.elapsed_h < 72.0;
  }
  const double n = static_cast<double>(records.size());
  return {records.size(), d1 / n, d2 / n, d3 / n, last / n};
}

}  // namespace diffscope
