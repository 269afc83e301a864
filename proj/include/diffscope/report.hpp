#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "diffscope/analytics.hpp"
#include "diffscope/knowledge.hpp"
#include "diffscope/message.hpp"
#include "diffscope/metrics_global.hpp"
#include "diffscope/metrics_local.hpp"
#include "diffscope/session.hpp"

namespace diffscope {

struct ReportDiagnostics {
  std::uint64_t graph_miss = 0;
  std::uint64_t graph_records = 0;
  std::uint64_t graph_duplicate_followings = 0;
  std::uint64_t queue_dropped = 0;

  bool operator==(const ReportDiagnostics&) const = default;
};

struct ScatterSummary {
  LocalField x_field = LocalField::NbMessages;
  LocalField y_field = LocalField::NbFe;
  double threshold = kDefaultActivityThreshold;
  std::uint64_t points = 0;
  GroupSummary low;
  GroupSummary high;

  bool operator==(const ScatterSummary&) const = default;
};

ScatterSummary summarize_scatter(const ScatterSeries& s);

/// The two activity correlations reported per session.
inline constexpr std::pair<LocalField, LocalField> kReportedScatters[] = {
    {LocalField::NbMessages, LocalField::NbFe}, {LocalField::NbMessages, LocalField::TotalR}};

/// Everything a session produces. Both the incremental engine and the batch
/// oracle emit this type, so reports can be compared field by field.
struct SessionReport {
  SessionConfig config;
  std::optional<Timestamp> session_start;
  FilterStats filter;
  GlobalIndicators global;
  std::vector<SeriesRow> series;
  std::vector<UserLocalRecord> users;  // first-post order
  std::vector<Histogram> distributions;  // kReportedFields order
  std::optional<ElapsedSummary> elapsed;
  std::vector<ScatterSummary> scatters;
  std::optional<double> nb_fe_ccdf_slope;
  KnowledgeSummary knowledge;
  ReportDiagnostics diagnostics;
};

inline constexpr const char* kReportSchema = "diffscope.report/1";

SessionReport build_report(const DiffusionEngine& engine, const FilterStats& filter,
                           const ReportDiagnostics& extra = {});

nlohmann::ordered_json to_json(const SessionReport& report);

// Report sections, also served individually.
nlohmann::ordered_json config_to_json(const SessionConfig& config);
/// Every field but `keywords` is optional. Throws Error{InvalidConfig}.
SessionConfig config_from_json(const nlohmann::json& doc);
nlohmann::ordered_json global_json(const GlobalIndicators& g);
nlohmann::ordered_json filter_json(const FilterStats& f);
nlohmann::ordered_json series_json(const std::vector<SeriesRow>& rows, int offset_minutes);
nlohmann::ordered_json histogram_json(const Histogram& h);
nlohmann::ordered_json scatter_json(const ScatterSummary& s);
nlohmann::ordered_json knowledge_json(const KnowledgeSummary& k);
/// Throws Error{MalformedRecord} on schema mismatch.
SessionReport report_from_json(const nlohmann::json& doc);

/// Pretty-printed report.json contents, newline-terminated.
std::string dump_report(const SessionReport& report);
SessionReport load_report(const std::filesystem::path& path);

struct Divergence {
  std::string path;
  std::string expected;
  std::string actual;
};

/// Integers must match exactly; other numbers within `rel_tol` relative.
std::optional<Divergence> compare_json(const nlohmann::json& expected, const nlohmann::json& actual,
                                       double rel_tol = 1e-9);
std::optional<Divergence> compare_reports(const SessionReport& expected, const SessionReport& actual,
                                          double rel_tol = 1e-9);

// CSV exports. Timestamps use the report's display offset; absent values are
// written as empty cells.
void write_global_csv(std::ostream& out, const SessionReport& report);
void write_local_csv(std::ostream& out, const SessionReport& report);
void write_knowledge_csv(std::ostream& out, const SessionReport& report);
void write_top_tweets_csv(std::ostream& out, const KnowledgeSummary& k);
void write_ranked_csv(std::ostream& out, const std::vector<RankedItem>& items, const char* key_column);
void write_histogram_csv(std::ostream& out, const Histogram& h);
void write_scatter_csv(std::ostream& out, const ScatterSeries& s);

std::string format_number(double v);

/// report.json plus every CSV export.
void write_report_dir(const std::filesystem::path& dir, const SessionReport& report);

}  // namespace diffscope
