#include "diffscope/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "diffscope/errors.hpp"
#include "diffscope/text.hpp"

namespace diffscope {

namespace {

std::int64_t bucket_index(Timestamp ts, Timestamp start, Duration width) {
  auto d = (ts - start).count();
  auto w = width.count();
  return d >= 0 ? d / w : -((-d + w - 1) / w);
}

std::optional<double> divide(double num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return num / static_cast<double>(den);
}

struct GapSums {
  std::int64_t sum_ms = 0;
  std::uint64_t n = 0;
};

GroupSummary group_of(const std::vector<double>& ys) {
  GroupSummary g;
  g.count = ys.size();
  if (ys.empty()) return g;
  g.y_min = *std::min_element(ys.begin(), ys.end());
  g.y_max = *std::max_element(ys.begin(), ys.end());
  double mean = 0;
  for (double y : ys) mean += y;
  mean /= static_cast<double>(ys.size());
  g.y_mean = mean;
  double var = 0;
  for (double y : ys) var += (y - mean) * (y - mean);
  var /= static_cast<double>(ys.size());
  if (mean != 0) g.y_cv = std::sqrt(var) / std::fabs(mean);
  return g;
}

std::vector<RankedItem> rank(const std::map<std::string, std::pair<std::uint64_t, std::size_t>>& tally,
                             std::size_t k) {
  std::vector<std::pair<std::string, std::pair<std::uint64_t, std::size_t>>> rows(tally.begin(), tally.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second.first != b.second.first) return a.second.first > b.second.first;
    return a.second.second < b.second.second;
  });
  std::vector<RankedItem> out;
  for (std::size_t i = 0; i < rows.size() && i < k; ++i) out.push_back({rows[i].first, rows[i].second.first});
  return out;
}

void count(std::map<std::string, std::pair<std::uint64_t, std::size_t>>& tally, const std::string& key,
           std::size_t& order) {
  auto [it, inserted] = tally.try_emplace(key, 0, order);
  if (inserted) ++order;
  ++it->second.first;
}

double value_of(const UserLocalRecord& u, LocalField f) {
  switch (f) {
    case LocalField::NbMessages: return static_cast<double>(u.nb_t + u.nb_rt);
    case LocalField::NbT: return static_cast<double>(u.nb_t);
    case LocalField::NbRt: return static_cast<double>(u.nb_rt);
    case LocalField::NbFe: return static_cast<double>(u.nb_fe);
    case LocalField::NbFgP: return static_cast<double>(u.nb_fg_p);
    case LocalField::TotalR: return static_cast<double>(u.total_r);
    case LocalField::ElapsedH: return u.elapsed_h;
  }
  return 0;
}

bool graph_field(LocalField f) { return f == LocalField::NbFe || f == LocalField::NbFgP || f == LocalField::TotalR; }

bool contains_folded(const std::u32string& hay, const std::vector<std::u32string>& needles) {
  for (const auto& n : needles)
    if (std::search(hay.begin(), hay.end(), n.begin(), n.end()) != hay.end()) return true;
  return false;
}

bool space32(char32_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

bool starts_with32(const std::u32string& s, std::string_view p) {
  if (s.size() < p.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (s[i] != static_cast<char32_t>(p[i])) return false;
  return true;
}

// Naive word extraction over the folded text with its own drop set.
struct OracleWords {
  std::set<std::u32string> drop;

  OracleWords(const std::vector<std::string>& keywords, const std::vector<std::string>& stopwords) {
    for (const auto& s : stopwords) drop.insert(casefold(s));
    for (const auto& k : keywords) {
      std::u32string joined;
      std::u32string cur;
      for (char32_t c : casefold(k) + U" ") {
        if (is_word_char(c)) {
          cur += c;
          joined += c;
        } else {
          if (!cur.empty()) drop.insert(cur);
          cur.clear();
        }
      }
      if (!joined.empty()) drop.insert(joined);
    }
  }

  std::vector<std::string> operator()(const std::string& text) const {
    std::u32string folded = casefold(text);
    std::vector<std::u32string> chunks(1);
    for (char32_t c : folded) {
      if (space32(c)) chunks.emplace_back();
      else chunks.back() += c;
    }
    std::vector<std::string> out;
    for (const auto& ch : chunks) {
      if (ch.empty() || ch[0] == U'@' || ch[0] == U'#') continue;
      if (starts_with32(ch, "http://") || starts_with32(ch, "https://") || starts_with32(ch, "www.")) continue;
      std::u32string w;
      for (char32_t c : ch + U" ") {
        if (is_word_char(c)) {
          w += c;
          continue;
        }
        if (w.size() >= 3 && !drop.count(w)) out.push_back(encode_utf8(w));
        w.clear();
      }
    }
    return out;
  }
};

}  // namespace

SessionReport oracle_report(const SessionConfig& config, std::span<const Message> source,
                            const std::vector<UserMeta>& graph, std::uint64_t duplicate_followings) {
  SessionReport r;
  r.config = config;

  // Pass 1: filtering.
  std::vector<Message> accepted;
  std::unordered_set<std::string> ids;
  std::optional<Timestamp> start = config.start_ts;
  std::optional<std::u32string> lang;
  if (config.language_filter) lang = casefold(*config.language_filter);
  std::vector<std::u32string> folded_keywords;
  for (const auto& k : config.keywords)
    if (!k.empty()) folded_keywords.push_back(casefold(k));
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Message& m = source[i];
    if (i > 0 && m.ts < source[i - 1].ts)
      throw Error(Errc::SourceOrderViolation, "source is not sorted", static_cast<std::size_t>(m.seq));
    if (start && config.duration && m.ts >= *start + *config.duration) break;
    ++r.filter.seen;
    if (ids.count(m.id)) {
      ++r.filter.duplicates_dropped;
      continue;
    }
    ids.insert(m.id);
    if (start && m.ts < *start) {
      ++r.filter.rejected_window;
      continue;
    }
    if (lang && m.lang && casefold(*m.lang) != *lang) {
      ++r.filter.rejected_language;
      continue;
    }
    bool hit = contains_folded(casefold(m.text), folded_keywords);
    for (const auto& t : m.hashtags) hit = hit || contains_folded(casefold(t), folded_keywords);
    if (!hit) {
      ++r.filter.rejected_keyword;
      continue;
    }
    if (!start) start = m.ts;
    accepted.push_back(m);
  }
  r.filter.accepted = accepted.size();
  r.session_start = start;

  // Global indicators.
  r.global.nb_rtw = static_cast<std::uint64_t>(
      std::count_if(accepted.begin(), accepted.end(), [](const Message& m) { return m.retweet_of.has_value(); }));
  r.global.nb_tw = accepted.size() - r.global.nb_rtw;
  std::vector<std::string> authors;
  for (const auto& m : accepted) authors.push_back(m.author);
  std::sort(authors.begin(), authors.end());
  r.global.nb_us = static_cast<std::uint64_t>(std::unique(authors.begin(), authors.end()) - authors.begin());
  r.global.avg_tw_per_user = divide(static_cast<double>(r.global.nb_tw), r.global.nb_us);
  r.global.avg_rtw_per_user = divide(static_cast<double>(r.global.nb_rtw), r.global.nb_us);

  std::vector<Timestamp> tw_ts;
  std::vector<Timestamp> rtw_ts;
  for (const auto& m : accepted) (m.retweet_of ? rtw_ts : tw_ts).push_back(m.ts);
  auto total_gap = [](const std::vector<Timestamp>& ts) {
    std::int64_t s = 0;
    for (std::size_t i = 1; i < ts.size(); ++i) s += (ts[i] - ts[i - 1]).count();
    return s;
  };
  if (tw_ts.size() > 1)
    r.global.avg_gap_tw_s = static_cast<double>(total_gap(tw_ts)) / 1000.0 / static_cast<double>(tw_ts.size() - 1);
  if (rtw_ts.size() > 1)
    r.global.avg_gap_rtw_s =
        static_cast<double>(total_gap(rtw_ts)) / 1000.0 / static_cast<double>(rtw_ts.size() - 1);

  // Series: group events by bucket index.
  if (!accepted.empty()) {
    const Duration w = config.bucket_width;
    const std::int64_t last = bucket_index(accepted.back().ts, *start, w);
    const std::size_t nb = static_cast<std::size_t>(last + 1);
    std::vector<std::uint64_t> tw(nb), rtw(nb), fresh(nb), gtw(nb), grtw(nb);
    std::vector<std::int64_t> stw(nb), srtw(nb);
    std::unordered_set<std::string> met;
    std::optional<Timestamp> prev_tw, prev_rtw;
    for (const auto& m : accepted) {
      auto b = static_cast<std::size_t>(bucket_index(m.ts, *start, w));
      if (m.retweet_of) {
        ++rtw[b];
        if (prev_rtw) {
          srtw[b] += (m.ts - *prev_rtw).count();
          ++grtw[b];
        }
        prev_rtw = m.ts;
      } else {
        ++tw[b];
        if (prev_tw) {
          stw[b] += (m.ts - *prev_tw).count();
          ++gtw[b];
        }
        prev_tw = m.ts;
      }
      if (met.insert(m.author).second) ++fresh[b];
    }
    std::uint64_t ctw = 0, crtw = 0, cus = 0, cgtw = 0, cgrtw = 0;
    std::int64_t cstw = 0, csrtw = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      ctw += tw[b];
      crtw += rtw[b];
      cus += fresh[b];
      cgtw += gtw[b];
      cgrtw += grtw[b];
      cstw += stw[b];
      csrtw += srtw[b];
      SeriesRow row;
      row.bucket = static_cast<std::int64_t>(b);
      row.bucket_start = *start + w * static_cast<std::int64_t>(b);
      row.nb_tw = tw[b];
      row.nb_rtw = rtw[b];
      row.new_users = fresh[b];
      row.bkt_avg_gap_tw_s = divide(static_cast<double>(stw[b]) / 1000.0, gtw[b]);
      row.bkt_avg_gap_rtw_s = divide(static_cast<double>(srtw[b]) / 1000.0, grtw[b]);
      row.cum_nb_tw = ctw;
      row.cum_nb_rtw = crtw;
      row.cum_nb_us = cus;
      row.cum_avg_tw_per_user = divide(static_cast<double>(ctw), cus);
      row.cum_avg_rtw_per_user = divide(static_cast<double>(crtw), cus);
      row.cum_avg_gap_tw_s = divide(static_cast<double>(cstw) / 1000.0, cgtw);
      row.cum_avg_gap_rtw_s = divide(static_cast<double>(csrtw) / 1000.0, cgrtw);
      r.series.push_back(row);
    }
  }

  // Local records: neighbourhood counts over the strict prefix before the
  // author's first accepted message.
  std::uint64_t dup = duplicate_followings;
  std::vector<std::set<std::string>> follow_sets(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (const auto& f : graph[i].followings)
      if (!follow_sets[i].insert(f).second) ++dup;
  }
  std::map<std::string, std::size_t> meta_index;
  for (std::size_t i = 0; i < graph.size(); ++i) meta_index[graph[i].user_id] = i;

  std::map<std::string, std::vector<std::size_t>> positions;
  for (std::size_t i = 0; i < accepted.size(); ++i) positions[accepted[i].author].push_back(i);

  std::vector<std::pair<std::size_t, std::string>> first_posts;
  for (const auto& [user, pos] : positions) first_posts.emplace_back(pos.front(), user);
  std::sort(first_posts.begin(), first_posts.end());

  for (const auto& [first, user] : first_posts) {
    UserLocalRecord u;
    u.user = user;
    for (std::size_t p : positions[user]) (accepted[p].retweet_of ? u.nb_rt : u.nb_t) += 1;
    u.first_post_ts = accepted[first].ts;
    u.elapsed_h = static_cast<double>((u.first_post_ts - *start).count()) / 3'600'000.0;
    auto it = meta_index.find(user);
    if (it == meta_index.end()) {
      u.graph_miss = true;
    } else {
      u.nb_fe = graph[it->second].followers_count;
      for (const auto& f : follow_sets[it->second]) {
        auto pf = positions.find(f);
        if (pf == positions.end()) continue;
        auto before = static_cast<std::uint64_t>(
            std::lower_bound(pf->second.begin(), pf->second.end(), first) - pf->second.begin());
        if (before > 0) {
          ++u.nb_fg_p;
          u.total_r += before;
        }
      }
    }
    r.users.push_back(u);
  }

  // Distributions.
  for (LocalField f : kReportedFields) {
    Histogram h;
    h.field = f;
    std::map<std::int64_t, std::uint64_t> bins;
    std::uint64_t zeros = 0, ones = 0;
    for (const auto& u : r.users) {
      if (graph_field(f) && u.graph_miss) continue;
      double v = value_of(u, f);
      ++bins[static_cast<std::int64_t>(std::floor(v))];
      ++h.population;
      if (v == 0) ++zeros;
      if (v == 1) ++ones;
    }
    if (h.population > 0) {
      if (f == LocalField::ElapsedH) {
        std::int64_t hi = std::max<std::int64_t>(71, bins.rbegin()->first);
        for (std::int64_t b = 0; b <= hi; ++b) {
          auto it = bins.find(b);
          h.bins.push_back({double(b), double(b + 1), it == bins.end() ? 0 : it->second});
        }
      } else {
        for (auto [b, c] : bins) h.bins.push_back({double(b), double(b + 1), c});
      }
      h.share_at_zero = static_cast<double>(zeros) / static_cast<double>(h.population);
      h.share_at_one = static_cast<double>(ones) / static_cast<double>(h.population);
    }
    r.distributions.push_back(h);
  }

  if (!r.users.empty()) {
    ElapsedSummary e;
    e.population = r.users.size();
    const double n = static_cast<double>(r.users.size());
    for (const auto& u : r.users) {
      if (u.elapsed_h < 24) e.within_24h += 1;
      if (u.elapsed_h < 48) e.within_48h += 1;
      if (u.elapsed_h < 72) e.within_72h += 1;
      if (u.elapsed_h >= 48 && u.elapsed_h < 72) e.final_24h += 1;
    }
    e.within_24h /= n;
    e.within_48h /= n;
    e.within_72h /= n;
    e.final_24h /= n;
    r.elapsed = e;
  }

  for (auto [x, y] : kReportedScatters) {
    ScatterSummary s;
    s.x_field = x;
    s.y_field = y;
    std::vector<double> low, high;
    for (const auto& u : r.users) {
      if (u.graph_miss) continue;
      ++s.points;
      (value_of(u, x) <= s.threshold ? low : high).push_back(value_of(u, y));
    }
    s.low = group_of(low);
    s.high = group_of(high);
    r.scatters.push_back(s);
  }

  // Log-log ccdf slope of nb_fe over values >= 1.
  std::vector<double> fe;
  for (const auto& u : r.users)
    if (!u.graph_miss) fe.push_back(static_cast<double>(u.nb_fe));
  std::sort(fe.begin(), fe.end(), std::greater<>());
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < fe.size(); ++i) {
    if (i + 1 < fe.size() && fe[i + 1] == fe[i]) continue;
    if (fe[i] >= 1) pts.emplace_back(std::log10(fe[i]), std::log10(double(i + 1) / double(fe.size())));
  }
  if (pts.size() >= 3) {
    double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
    }
    for (auto [x, y] : pts) {
      sxx += (x - sx / n) * (x - sx / n);
      sxy += (x - sx / n) * (y - sy / n);
    }
    if (sxx > 0) r.nb_fe_ccdf_slope = sxy / sxx;
  }

  // Knowledge.
  std::vector<std::string> stop;
  if (config.stopwords) stop = *config.stopwords;
  else
    for (auto w : default_stopwords()) stop.emplace_back(w);
  OracleWords tokenize(config.keywords, stop);
  std::map<std::string, std::pair<std::uint64_t, std::size_t>> rts, words, users, links;
  std::size_t o_rt = 0, o_w = 0, o_u = 0, o_l = 0;
  std::set<std::string> captured;
  for (const auto& m : accepted) {
    captured.insert(m.id);
    count(users, m.author, o_u);
    for (const auto& l : m.links) count(links, l, o_l);
    if (m.retweet_of) count(rts, *m.retweet_of, o_rt);
    else
      for (const auto& w : tokenize(m.text)) count(words, w, o_w);
  }
  r.knowledge.k = config.top_k;
  for (const auto& item : rank(rts, config.top_k))
    r.knowledge.top_tweets.push_back({item.key, item.count, captured.count(item.key) > 0});
  r.knowledge.top_words = rank(words, config.top_k);
  r.knowledge.top_users = rank(users, config.top_k);
  r.knowledge.top_links = rank(links, config.top_k);

  r.diagnostics.graph_miss = static_cast<std::uint64_t>(
      std::count_if(r.users.begin(), r.users.end(), [](const UserLocalRecord& u) { return u.graph_miss; }));
  r.diagnostics.graph_records = graph.size();
  r.diagnostics.graph_duplicate_followings = dup;
  return r;
}

}  // namespace diffscope
