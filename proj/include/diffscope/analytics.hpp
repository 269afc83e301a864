#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diffscope/metrics_local.hpp"

namespace diffscope {

enum class LocalField { NbMessages, NbT, NbRt, NbFe, NbFgP, TotalR, ElapsedH };

/// Accepts nb_messages, nb_t, nb_rt, nb_fe, nb_fg_p, total_r, elapsed_h.
/// Throws Error{UnknownField}.
LocalField parse_local_field(std::string_view name);
std::string_view field_name(LocalField field) noexcept;
double field_value(const UserLocalRecord& rec, LocalField field) noexcept;

/// Graph-derived fields exclude graph_miss users unless told otherwise.
bool excludes_graph_miss_by_default(LocalField field) noexcept;

/// The five fields reported per session, in display order.
inline constexpr LocalField kReportedFields[] = {LocalField::NbMessages, LocalField::NbFe, LocalField::NbFgP,
                                                 LocalField::TotalR, LocalField::ElapsedH};

struct Bin {
  double low = 0;
  double high = 0;
  std::uint64_t count = 0;

  bool operator==(const Bin&) const = default;
};

struct Histogram {
  LocalField field = LocalField::NbMessages;
  std::vector<Bin> bins;
  std::uint64_t population = 0;
  std::optional<double> share_at_zero;
  std::optional<double> share_at_one;

  bool operator==(const Histogram&) const = default;
};

/// Integer fields get unit bins at every observed value. elapsed_h gets
/// 1-hour bins covering [0, 72) and beyond if any value lies past 72 h.
Histogram distribution(std::span<const UserLocalRecord> records, LocalField field,
                       std::optional<bool> include_graph_miss = std::nullopt);

struct CcdfPoint {
  double value = 0;
  double fraction = 0;

  bool operator==(const CcdfPoint&) const = default;
};

/// Fraction of values >= v at every distinct v, ascending. Throws
/// Error{EmptyPopulation}.
std::vector<CcdfPoint> ccdf(std::span<const double> values);

/// Least-squares slope of log10(fraction) against log10(value) over points
/// with value >= max(min_value, 1). Throws Error{InsufficientPoints} below
/// three points.
double loglog_slope(std::span<const CcdfPoint> points, double min_value = 1.0);

struct ScatterPoint {
  std::string user;
  double x = 0;
  double y = 0;

  bool operator==(const ScatterPoint&) const = default;
};

struct GroupSummary {
  std::uint64_t count = 0;
  std::optional<double> y_min;
  std::optional<double> y_max;
  std::optional<double> y_mean;
  std::optional<double> y_cv;

  bool operator==(const GroupSummary&) const = default;
};

inline constexpr double kDefaultActivityThreshold = 20.0;

struct ScatterSeries {
  LocalField x_field = LocalField::NbMessages;
  LocalField y_field = LocalField::NbFe;
  double threshold = kDefaultActivityThreshold;
  std::vector<ScatterPoint> points;
  GroupSummary low;   // x <= threshold
  GroupSummary high;  // x > threshold

  bool operator==(const ScatterSeries&) const = default;
};

ScatterSeries correlation_scatter(std::span<const UserLocalRecord> records, LocalField x, LocalField y,
                                  double threshold = kDefaultActivityThreshold, bool include_graph_miss = false);

struct ElapsedSummary {
  std::uint64_t population = 0;
  double within_24h = 0;
  double within_48h = 0;
  double within_72h = 0;
  double final_24h = 0;  // [48 h, 72 h)

  bool operator==(const ElapsedSummary&) const = default;
};

/// Throws Error{EmptyPopulation}.
ElapsedSummary elapsed_summary(std::span<const UserLocalRecord> records);

}  // namespace diffscope
