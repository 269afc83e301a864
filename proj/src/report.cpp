#include "diffscope/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "diffscope/errors.hpp"

namespace diffscope {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string offset_string(int minutes) {
  if (minutes == 0) return "+00:00";
  char buf[16];
  int a = std::abs(minutes);
  std::snprintf(buf, sizeof buf, "%c%02d:%02d", minutes < 0 ? '-' : '+', a / 60, a % 60);
  return buf;
}

template <class T>
void put_opt(ordered_json& doc, const char* key, const std::optional<T>& v) {
  if (v) doc[key] = *v;
}

template <class T>
std::optional<T> get_opt(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

const json& at(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw Error(Errc::MalformedRecord, std::string("report is missing '") + key + "'");
  return *it;
}

ordered_json group_json(const GroupSummary& g) {
  ordered_json doc;
  doc["count"] = g.count;
  put_opt(doc, "y_min", g.y_min);
  put_opt(doc, "y_max", g.y_max);
  put_opt(doc, "y_mean", g.y_mean);
  put_opt(doc, "y_cv", g.y_cv);
  return doc;
}

GroupSummary group_from(const json& doc) {
  GroupSummary g;
  g.count = at(doc, "count").get<std::uint64_t>();
  g.y_min = get_opt<double>(doc, "y_min");
  g.y_max = get_opt<double>(doc, "y_max");
  g.y_mean = get_opt<double>(doc, "y_mean");
  g.y_cv = get_opt<double>(doc, "y_cv");
  return g;
}

std::string csv_cell(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string opt_cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

ScatterSummary summarize_scatter(const ScatterSeries& s) {
  return {s.x_field, s.y_field, s.threshold, s.points.size(), s.low, s.high};
}

SessionReport build_report(const DiffusionEngine& engine, const FilterStats& filter, const ReportDiagnostics& extra) {
  SessionReport r;
  r.config = engine.config();
  r.session_start = engine.session_start();
  r.filter = filter;
  r.global = global_snapshot(engine.global());
  r.series = bucket_series(engine.global());
  r.users = local_population(engine.local());

  for (LocalField f : kReportedFields) r.distributions.push_back(distribution(r.users, f));
  if (!r.users.empty()) r.elapsed = elapsed_summary(r.users);
  for (auto [x, y] : kReportedScatters) r.scatters.push_back(summarize_scatter(correlation_scatter(r.users, x, y)));

  std::vector<double> fe;
  for (const auto& u : r.users)
    if (!u.graph_miss) fe.push_back(static_cast<double>(u.nb_fe));
  if (!fe.empty()) {
    try {
      r.nb_fe_ccdf_slope = loglog_slope(ccdf(fe));
    } catch (const Error&) {
      r.nb_fe_ccdf_slope.reset();
    }
  }

  r.knowledge = engine.knowledge().snapshot(engine.config().top_k);
  r.diagnostics = extra;
  r.diagnostics.graph_miss = engine.local().graph_miss();
  r.diagnostics.graph_records = engine.local().graph().record_count();
  r.diagnostics.graph_duplicate_followings = engine.local().graph().duplicate_followings();
  return r;
}

ordered_json config_to_json(const SessionConfig& c) {
  ordered_json cfg;
  cfg["keywords"] = c.keywords;
  put_opt(cfg, "language", c.language_filter);
  if (c.start_ts) cfg["start_ts"] = format_rfc3339(*c.start_ts, c.display_offset_minutes);
  if (c.duration) cfg["duration"] = format_duration(*c.duration);
  cfg["bucket"] = format_duration(c.bucket_width);
  cfg["display_offset"] = offset_string(c.display_offset_minutes);
  cfg["k"] = c.top_k;
  put_opt(cfg, "stopwords", c.stopwords);
  return cfg;
}

SessionConfig config_from_json(const json& cfg) {
  SessionConfig c;
  try {
    if (!cfg.is_object()) throw Error(Errc::InvalidConfig, "config must be an object");
    static const char* known[] = {"keywords", "language", "start_ts", "duration", "bucket",
                                  "display_offset", "k", "stopwords"};
    for (auto it = cfg.begin(); it != cfg.end(); ++it)
      if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
        throw Error(Errc::InvalidConfig, "unknown config field '" + it.key() + "'");
    c.keywords = at(cfg, "keywords").get<std::vector<std::string>>();
    c.language_filter = get_opt<std::string>(cfg, "language");
    if (auto s = get_opt<std::string>(cfg, "start_ts")) c.start_ts = parse_rfc3339(*s);
    if (auto s = get_opt<std::string>(cfg, "duration")) c.duration = parse_duration(*s);
    if (auto s = get_opt<std::string>(cfg, "bucket")) c.bucket_width = parse_duration(*s);
    if (auto it = cfg.find("display_offset"); it != cfg.end())
      c.display_offset_minutes = it->is_number() ? static_cast<int>(std::lround(it->get<double>() * 60))
                                                 : parse_utc_offset(it->get<std::string>());
    if (auto k = get_opt<std::int64_t>(cfg, "k")) {
      if (*k < 1) throw Error(Errc::InvalidConfig, "k must be at least 1");
      c.top_k = static_cast<std::size_t>(*k);
    }
    c.stopwords = get_opt<std::vector<std::string>>(cfg, "stopwords");
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("invalid config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidConfig) throw;
    throw Error(Errc::InvalidConfig, e.what());
  }
  c.validate();
  return c;
}

ordered_json global_json(const GlobalIndicators& g) {
  ordered_json global;
  global["nb_tw"] = g.nb_tw;
  global["nb_rtw"] = g.nb_rtw;
  global["nb_us"] = g.nb_us;
  put_opt(global, "avg_tw_per_user", g.avg_tw_per_user);
  put_opt(global, "avg_rtw_per_user", g.avg_rtw_per_user);
  put_opt(global, "avg_gap_tw_s", g.avg_gap_tw_s);
  put_opt(global, "avg_gap_rtw_s", g.avg_gap_rtw_s);
  return global;
}

ordered_json filter_json(const FilterStats& f) {
  ordered_json filter;
  filter["seen"] = f.seen;
  filter["accepted"] = f.accepted;
  filter["rejected_keyword"] = f.rejected_keyword;
  filter["rejected_language"] = f.rejected_language;
  filter["rejected_window"] = f.rejected_window;
  filter["duplicates_dropped"] = f.duplicates_dropped;
  return filter;
}

ordered_json series_json(const std::vector<SeriesRow>& rows, int offset_minutes) {
  ordered_json series = ordered_json::array();
  for (const auto& s : rows) {
    ordered_json row;
    row["bucket"] = s.bucket;
    row["bucket_start"] = format_rfc3339(s.bucket_start, offset_minutes);
    row["nb_tw"] = s.nb_tw;
    row["nb_rtw"] = s.nb_rtw;
    row["new_users"] = s.new_users;
    put_opt(row, "bkt_avg_gap_tw_s", s.bkt_avg_gap_tw_s);
    put_opt(row, "bkt_avg_gap_rtw_s", s.bkt_avg_gap_rtw_s);
    row["cum_nb_tw"] = s.cum_nb_tw;
    row["cum_nb_rtw"] = s.cum_nb_rtw;
    row["cum_nb_us"] = s.cum_nb_us;
    put_opt(row, "cum_avg_tw_per_user", s.cum_avg_tw_per_user);
    put_opt(row, "cum_avg_rtw_per_user", s.cum_avg_rtw_per_user);
    put_opt(row, "cum_avg_gap_tw_s", s.cum_avg_gap_tw_s);
    put_opt(row, "cum_avg_gap_rtw_s", s.cum_avg_gap_rtw_s);
    series.push_back(std::move(row));
  }
  return series;
}

ordered_json histogram_json(const Histogram& h) {
  ordered_json d;
  d["population"] = h.population;
  put_opt(d, "share_at_zero", h.share_at_zero);
  put_opt(d, "share_at_one", h.share_at_one);
  ordered_json bins = ordered_json::array();
  for (const auto& b : h.bins)
    bins.push_back({static_cast<std::int64_t>(b.low), static_cast<std::int64_t>(b.high), b.count});
  d["bins"] = std::move(bins);
  return d;
}

ordered_json scatter_json(const ScatterSummary& s) {
  ordered_json sc;
  sc["x"] = field_name(s.x_field);
  sc["y"] = field_name(s.y_field);
  sc["threshold"] = s.threshold;
  sc["points"] = s.points;
  sc["low"] = group_json(s.low);
  sc["high"] = group_json(s.high);
  return sc;
}

ordered_json knowledge_json(const KnowledgeSummary& ks) {
  ordered_json k;
  k["k"] = ks.k;
  ordered_json tweets = ordered_json::array();
  for (const auto& t : ks.top_tweets)
    tweets.push_back(ordered_json{{"id", t.id}, {"retweets", t.retweets}, {"captured", t.captured}});
  k["top_tweets"] = std::move(tweets);
  auto ranked = [](const std::vector<RankedItem>& items, const char* key) {
    ordered_json arr = ordered_json::array();
    for (const auto& i : items) arr.push_back(ordered_json{{key, i.key}, {"count", i.count}});
    return arr;
  };
  k["top_words"] = ranked(ks.top_words, "word");
  k["top_users"] = ranked(ks.top_users, "user");
  k["top_links"] = ranked(ks.top_links, "url");
  return k;
}

ordered_json to_json(const SessionReport& r) {
  const int off = r.config.display_offset_minutes;
  auto ts = [off](Timestamp t) { return format_rfc3339(t, off); };

  ordered_json doc;
  doc["schema"] = kReportSchema;
  doc["config"] = config_to_json(r.config);
  if (r.session_start) doc["session_start"] = ts(*r.session_start);
  doc["filter"] = filter_json(r.filter);
  doc["global"] = global_json(r.global);
  doc["series"] = series_json(r.series, off);

  ordered_json dists = ordered_json::object();
  for (const auto& h : r.distributions) dists[std::string(field_name(h.field))] = histogram_json(h);
  doc["distributions"] = std::move(dists);

  if (r.elapsed) {
    ordered_json e;
    e["population"] = r.elapsed->population;
    e["within_24h"] = r.elapsed->within_24h;
    e["within_48h"] = r.elapsed->within_48h;
    e["within_72h"] = r.elapsed->within_72h;
    e["final_24h"] = r.elapsed->final_24h;
    doc["elapsed_summary"] = std::move(e);
  }

  ordered_json scatters = ordered_json::array();
  for (const auto& s : r.scatters) scatters.push_back(scatter_json(s));
  doc["scatter_summaries"] = std::move(scatters);

  ordered_json tail = ordered_json::object();
  put_opt(tail, "nb_fe_ccdf_slope", r.nb_fe_ccdf_slope);
  doc["heavy_tail"] = std::move(tail);

  doc["knowledge"] = knowledge_json(r.knowledge);

  ordered_json diag;
  diag["graph_miss"] = r.diagnostics.graph_miss;
  diag["graph_records"] = r.diagnostics.graph_records;
  diag["graph_duplicate_followings"] = r.diagnostics.graph_duplicate_followings;
  diag["queue_dropped"] = r.diagnostics.queue_dropped;
  doc["diagnostics"] = std::move(diag);

  ordered_json users = ordered_json::array();
  for (const auto& u : r.users) {
    ordered_json row;
    row["user"] = u.user;
    row["nb_t"] = u.nb_t;
    row["nb_rt"] = u.nb_rt;
    row["first_post_ts"] = ts(u.first_post_ts);
    row["nb_fe"] = u.nb_fe;
    row["nb_fg_p"] = u.nb_fg_p;
    row["total_r"] = u.total_r;
    row["elapsed_h"] = u.elapsed_h;
    row["graph_miss"] = u.graph_miss;
    users.push_back(std::move(row));
  }
  doc["users"] = std::move(users);
  return doc;
}

SessionReport report_from_json(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("schema", "") != kReportSchema)
      throw Error(Errc::MalformedRecord, "not a diffscope report");
    SessionReport r;

    r.config = config_from_json(at(doc, "config"));

    if (auto s = get_opt<std::string>(doc, "session_start")) r.session_start = parse_rfc3339(*s);

    const json& f = at(doc, "filter");
    r.filter.seen = at(f, "seen").get<std::uint64_t>();
    r.filter.accepted = at(f, "accepted").get<std::uint64_t>();
    r.filter.rejected_keyword = at(f, "rejected_keyword").get<std::uint64_t>();
    r.filter.rejected_language = at(f, "rejected_language").get<std::uint64_t>();
    r.filter.rejected_window = at(f, "rejected_window").get<std::uint64_t>();
    r.filter.duplicates_dropped = at(f, "duplicates_dropped").get<std::uint64_t>();

    const json& g = at(doc, "global");
    r.global.nb_tw = at(g, "nb_tw").get<std::uint64_t>();
    r.global.nb_rtw = at(g, "nb_rtw").get<std::uint64_t>();
    r.global.nb_us = at(g, "nb_us").get<std::uint64_t>();
    r.global.avg_tw_per_user = get_opt<double>(g, "avg_tw_per_user");
    r.global.avg_rtw_per_user = get_opt<double>(g, "avg_rtw_per_user");
    r.global.avg_gap_tw_s = get_opt<double>(g, "avg_gap_tw_s");
    r.global.avg_gap_rtw_s = get_opt<double>(g, "avg_gap_rtw_s");

    for (const json& row : at(doc, "series")) {
      SeriesRow s;
      s.bucket = at(row, "bucket").get<std::int64_t>();
      s.bucket_start = parse_rfc3339(at(row, "bucket_start").get<std::string>());
      s.nb_tw = at(row, "nb_tw").get<std::uint64_t>();
      s.nb_rtw = at(row, "nb_rtw").get<std::uint64_t>();
      s.new_users = at(row, "new_users").get<std::uint64_t>();
      s.bkt_avg_gap_tw_s = get_opt<double>(row, "bkt_avg_gap_tw_s");
      s.bkt_avg_gap_rtw_s = get_opt<double>(row, "bkt_avg_gap_rtw_s");
      s.cum_nb_tw = at(row, "cum_nb_tw").get<std::uint64_t>();
      s.cum_nb_rtw = at(row, "cum_nb_rtw").get<std::uint64_t>();
      s.cum_nb_us = at(row, "cum_nb_us").get<std::uint64_t>();
      s.cum_avg_tw_per_user = get_opt<double>(row, "cum_avg_tw_per_user");
      s.cum_avg_rtw_per_user = get_opt<double>(row, "cum_avg_rtw_per_user");
      s.cum_avg_gap_tw_s = get_opt<double>(row, "cum_avg_gap_tw_s");
      s.cum_avg_gap_rtw_s = get_opt<double>(row, "cum_avg_gap_rtw_s");
      r.series.push_back(s);
    }

    for (const auto& [name, d] : at(doc, "distributions").items()) {
      Histogram h;
      h.field = parse_local_field(name);
      h.population = at(d, "population").get<std::uint64_t>();
      h.share_at_zero = get_opt<double>(d, "share_at_zero");
      h.share_at_one = get_opt<double>(d, "share_at_one");
      for (const json& b : at(d, "bins"))
        h.bins.push_back({b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<std::uint64_t>()});
      r.distributions.push_back(std::move(h));
    }
    // nlohmann::json objects iterate alphabetically; restore display order.
    std::vector<Histogram> ordered;
    for (LocalField f : kReportedFields)
      for (auto& h : r.distributions)
        if (h.field == f) ordered.push_back(std::move(h));
    r.distributions = std::move(ordered);

    if (auto it = doc.find("elapsed_summary"); it != doc.end()) {
      ElapsedSummary e;
      e.population = at(*it, "population").get<std::uint64_t>();
      e.within_24h = at(*it, "within_24h").get<double>();
      e.within_48h = at(*it, "within_48h").get<double>();
      e.within_72h = at(*it, "within_72h").get<double>();
      e.final_24h = at(*it, "final_24h").get<double>();
      r.elapsed = e;
    }

    for (const json& sc : at(doc, "scatter_summaries")) {
      ScatterSummary s;
      s.x_field = parse_local_field(at(sc, "x").get<std::string>());
      s.y_field = parse_local_field(at(sc, "y").get<std::string>());
      s.threshold = at(sc, "threshold").get<double>();
      s.points = at(sc, "points").get<std::uint64_t>();
      s.low = group_from(at(sc, "low"));
      s.high = group_from(at(sc, "high"));
      r.scatters.push_back(s);
    }

    r.nb_fe_ccdf_slope = get_opt<double>(at(doc, "heavy_tail"), "nb_fe_ccdf_slope");

    const json& k = at(doc, "knowledge");
    r.knowledge.k = at(k, "k").get<std::size_t>();
    for (const json& t : at(k, "top_tweets"))
      r.knowledge.top_tweets.push_back(
          {at(t, "id").get<std::string>(), at(t, "retweets").get<std::uint64_t>(), at(t, "captured").get<bool>()});
    auto ranked = [&](const char* list, const char* key) {
      std::vector<RankedItem> out;
      for (const json& i : at(k, list)) out.push_back({at(i, key).get<std::string>(), at(i, "count").get<std::uint64_t>()});
      return out;
    };
    r.knowledge.top_words = ranked("top_words", "word");
    r.knowledge.top_users = ranked("top_users", "user");
    r.knowledge.top_links = ranked("top_links", "url");

    const json& diag = at(doc, "diagnostics");
    r.diagnostics.graph_miss = at(diag, "graph_miss").get<std::uint64_t>();
    r.diagnostics.graph_records = at(diag, "graph_records").get<std::uint64_t>();
    r.diagnostics.graph_duplicate_followings = at(diag, "graph_duplicate_followings").get<std::uint64_t>();
    r.diagnostics.queue_dropped = at(diag, "queue_dropped").get<std::uint64_t>();

    for (const json& row : at(doc, "users")) {
      UserLocalRecord u;
      u.user = at(row, "user").get<std::string>();
      u.nb_t = at(row, "nb_t").get<std::uint64_t>();
      u.nb_rt = at(row, "nb_rt").get<std::uint64_t>();
      u.first_post_ts = parse_rfc3339(at(row, "first_post_ts").get<std::string>());
      u.nb_fe = at(row, "nb_fe").get<std::uint64_t>();
      u.nb_fg_p = at(row, "nb_fg_p").get<std::uint64_t>();
      u.total_r = at(row, "total_r").get<std::uint64_t>();
      u.elapsed_h = at(row, "elapsed_h").get<double>();
      u.graph_miss = at(row, "graph_miss").get<bool>();
      r.users.push_back(std::move(u));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedRecord, std::string("invalid report: ") + e.what());
  }
}

std::string dump_report(const SessionReport& report) {
  return to_json(report).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

SessionReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open report '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::MalformedRecord, std::string("invalid report JSON: ") + e.what());
  }
  return report_from_json(doc);
}

std::optional<Divergence> compare_json(const json& expected, const json& actual, double rel_tol) {
  struct Walker {
    double tol;
    std::optional<Divergence> walk(const json& e, const json& a, const std::string& path) const {
      auto diverge = [&]() { return Divergence{path.empty() ? "/" : path, e.dump(), a.dump()}; };
      if (e.is_number() && a.is_number()) {
        if (e.is_number_integer() && a.is_number_integer()) {
          bool same = e.is_number_unsigned() && a.is_number_unsigned()
                          ? e.get<std::uint64_t>() == a.get<std::uint64_t>()
                          : e.get<std::int64_t>() == a.get<std::int64_t>();
          if (!same) return diverge();
          return std::nullopt;
        }
        const double x = e.get<double>();
        const double y = a.get<double>();
        if (x == y) return std::nullopt;
        if (std::fabs(x - y) <= tol * std::max(std::fabs(x), std::fabs(y))) return std::nullopt;
        return diverge();
      }
      if (e.type() != a.type()) return diverge();
      if (e.is_object()) {
        for (auto it = e.begin(); it != e.end(); ++it) {
          auto other = a.find(it.key());
          if (other == a.end()) return Divergence{path + "/" + it.key(), it.value().dump(), "<absent>"};
          if (auto d = walk(it.value(), *other, path + "/" + it.key())) return d;
        }
        for (auto it = a.begin(); it != a.end(); ++it)
          if (!e.contains(it.key())) return Divergence{path + "/" + it.key(), "<absent>", it.value().dump()};
        return std::nullopt;
      }
      if (e.is_array()) {
        const std::size_t n = std::min(e.size(), a.size());
        for (std::size_t i = 0; i < n; ++i)
          if (auto d = walk(e[i], a[i], path + "/" + std::to_string(i))) return d;
        if (e.size() != a.size())
          return Divergence{path + "/length", std::to_string(e.size()), std::to_string(a.size())};
        return std::nullopt;
      }
      if (e != a) return diverge();
      return std::nullopt;
    }
  };
  return Walker{rel_tol}.walk(expected, actual, "");
}

std::optional<Divergence> compare_reports(const SessionReport& expected, const SessionReport& actual,
                                          double rel_tol) {
  // Round-trip through text so both sides carry the same JSON number types.
  return compare_json(json::parse(dump_report(expected)), json::parse(dump_report(actual)), rel_tol);
}

void write_global_csv(std::ostream& out, const SessionReport& r) {
  out << "bucket_start,nb_tw,nb_rtw,new_users,bkt_avg_gap_tw_s,bkt_avg_gap_rtw_s,cum_avg_tw_per_user,"
         "cum_avg_rtw_per_user\n";
  for (const auto& s : r.series) {
    out << format_rfc3339(s.bucket_start, r.config.display_offset_minutes) << ',' << s.nb_tw << ',' << s.nb_rtw
        << ',' << s.new_users << ',' << opt_cell(s.bkt_avg_gap_tw_s) << ',' << opt_cell(s.bkt_avg_gap_rtw_s) << ','
        << opt_cell(s.cum_avg_tw_per_user) << ',' << opt_cell(s.cum_avg_rtw_per_user) << '\n';
  }
}

void write_local_csv(std::ostream& out, const SessionReport& r) {
  out << "user,nb_t,nb_rt,first_post_ts,nb_fe,nb_fg_p,total_r,elapsed_h,graph_miss\n";
  for (const auto& u : r.users) {
    out << csv_cell(u.user) << ',' << u.nb_t << ',' << u.nb_rt << ','
        << format_rfc3339(u.first_post_ts, r.config.display_offset_minutes) << ',' << u.nb_fe << ',' << u.nb_fg_p
        << ',' << u.total_r << ',' << format_number(u.elapsed_h) << ',' << (u.graph_miss ? 1 : 0) << '\n';
  }
}

void write_knowledge_csv(std::ostream& out, const SessionReport& r) {
  out << "category,rank,key,count,captured\n";
  std::size_t rank = 0;
  for (const auto& t : r.knowledge.top_tweets)
    out << "tweet," << ++rank << ',' << csv_cell(t.id) << ',' << t.retweets << ',' << (t.captured ? 1 : 0) << '\n';
  auto section = [&](const char* name, const std::vector<RankedItem>& items) {
    std::size_t n = 0;
    for (const auto& i : items) out << name << ',' << ++n << ',' << csv_cell(i.key) << ',' << i.count << ",\n";
  };
  section("word", r.knowledge.top_words);
  section("user", r.knowledge.top_users);
  section("link", r.knowledge.top_links);
}

void write_top_tweets_csv(std::ostream& out, const KnowledgeSummary& k) {
  out << "id,retweets,captured\n";
  for (const auto& t : k.top_tweets) out << csv_cell(t.id) << ',' << t.retweets << ',' << (t.captured ? 1 : 0) << '\n';
}

void write_ranked_csv(std::ostream& out, const std::vector<RankedItem>& items, const char* key_column) {
  out << key_column << ",count\n";
  for (const auto& i : items) out << csv_cell(i.key) << ',' << i.count << '\n';
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_low,bin_high,count\n";
  for (const auto& b : h.bins) out << format_number(b.low) << ',' << format_number(b.high) << ',' << b.count << '\n';
}

void write_scatter_csv(std::ostream& out, const ScatterSeries& s) {
  out << "user,x,y\n";
  for (const auto& p : s.points) out << csv_cell(p.user) << ',' << format_number(p.x) << ',' << format_number(p.y) << '\n';
}

void write_report_dir(const std::filesystem::path& dir, const SessionReport& r) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error(Errc::Io, "cannot write '" + (dir / name).string() + "'");
    return f;
  };
  {
    auto f = open("report.json");
    f << dump_report(r);
  }
  {
    auto f = open("global.csv");
    write_global_csv(f, r);
  }
  {
    auto f = open("local.csv");
    write_local_csv(f, r);
  }
  {
    auto f = open("knowledge.csv");
    write_knowledge_csv(f, r);
  }
  {
    auto f = open("top_tweets.csv");
    write_top_tweets_csv(f, r.knowledge);
  }
  {
    auto f = open("top_words.csv");
    write_ranked_csv(f, r.knowledge.top_words, "word");
  }
  {
    auto f = open("top_users.csv");
    write_ranked_csv(f, r.knowledge.top_users, "user");
  }
  {
    auto f = open("top_links.csv");
    write_ranked_csv(f, r.knowledge.top_links, "url");
  }
  for (const auto& h : r.distributions) {
    std::ofstream f(dir / ("dist_" + std::string(field_name(h.field)) + ".csv"), std::ios::binary);
    write_histogram_csv(f, h);
  }
  for (auto [x, y] : kReportedScatters) {
    auto s = correlation_scatter(r.users, x, y);
    std::ofstream f(dir / ("scatter_" + std::string(field_name(x)) + "_" + std::string(field_name(y)) + ".csv"),
                    std::ios::binary);
    write_scatter_csv(f, s);
  }
}

}  // namespace diffscope
