#include "diffscope/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "diffscope/errors.hpp"
#include "diffscope/graph_view.hpp"

namespace diffscope::synth {

namespace {

constexpr std::uint64_t kGraphStream = 0x6772617068ULL;
constexpr std::uint64_t kLangStream = 0x6c616e67ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = [] {
    static constexpr const char* kSyllables[] = {"ka", "lo", "mi", "nu", "pe", "ri", "so", "tu",
                                                  "za", "bo", "di", "fa", "gu", "xe", "jo", "qi"};
    std::vector<std::string> out;
    for (int i = 0; i < 400; ++i) {
      std::string w = kSyllables[i % 16];
      w += kSyllables[(i / 16) % 16];
      if (i >= 256) w += kSyllables[(i * 7) % 16];
      out.push_back(std::move(w));
    }
    return out;
  }();
  return words;
}

std::string vary_case(const std::string& s, std::uint64_t draw) {
  std::string out = s;
  switch (draw % 3) {
    case 0: break;
    case 1:
      for (auto& c : out)
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
      break;
    default:
      for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
      break;
  }
  return out;
}

std::string compact_tag(const std::string& keyword) {
  std::string out;
  for (char c : keyword) {
    if (c == ' ') continue;
    out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c;
  }
  return out;
}

struct Content {
  std::string text;
  std::vector<std::string> links;
  std::vector<std::string> tags;
};

Content make_content(std::uint64_t text_seed, const GeneratorParams& p) {
  Rng r(text_seed);
  const auto& vocab = vocabulary();
  const bool off_topic = r.uniform() < p.off_topic_rate;
  const std::size_t n_words = 3 + r.below(6);
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n_words; ++i)
    words.push_back(vocab[draw_power_law(r, 2.0, vocab.size()) - 1]);

  Content c;
  std::string keyword = p.keywords[r.below(p.keywords.size())];
  if (!off_topic) {
    auto at = r.below(words.size() + 1);
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), vary_case(keyword, r.next()));
  }
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) c.text += ' ';
    c.text += words[i];
  }
  if (r.uniform() < p.link_rate) {
    auto link = "https://news.example/a/" + std::to_string(draw_power_law(r, 2.0, 200));
    c.text += ' ' + link;
    c.links.push_back(std::move(link));
  }
  if (r.uniform() < p.hashtag_rate) {
    std::string tag = off_topic ? vocab[r.below(vocab.size())] : compact_tag(keyword);
    c.text += " #" + tag;
    c.tags.push_back(std::move(tag));
  }
  return c;
}

struct Decision {
  bool post = false;
  bool retweet = false;
  std::int64_t target = -1;
  std::int64_t jitter_ms = 0;
  std::uint64_t text_seed = 0;
};

struct StepInput {
  const GraphView& graph;
  const GeneratorParams& params;
  const std::vector<std::int64_t>& prev_post;
  const std::vector<char>& active;
  std::size_t step;
  double spontaneous_rate;
  double repost_rate;
};

Decision decide(const StepInput& in, std::size_t u) {
  Rng r = Rng::stream(in.params.seed, in.step + 1, u);
  auto follows = in.graph.followings(static_cast<UserId>(u));
  std::uint64_t exposures = 0;
  for (UserId f : follows)
    if (f < in.prev_post.size() && in.prev_post[f] >= 0) ++exposures;

  const bool active = in.active[u] != 0;
  const bool forced = in.step == 0 && u < in.params.seed_posters && !active;
  const double p_trigger =
      (!active && exposures > 0) ? 1.0 - std::pow(1.0 - in.params.influence_rate, static_cast<double>(exposures)) : 0.0;

  // Fixed draw order keeps every stream position independent of the outcome.
  const bool spontaneous = r.uniform() < (active ? in.repost_rate : in.spontaneous_rate);
  const bool triggered = r.uniform() < p_trigger;
  const bool rt_draw = r.uniform() < in.params.retweet_fraction;
  Decision d;
  d.jitter_ms = static_cast<std::int64_t>(r.below(static_cast<std::uint64_t>(in.params.step_width.count())));
  d.text_seed = r.next();
  const std::uint64_t pick = exposures > 0 ? r.below(exposures) : 0;

  d.post = forced || spontaneous || triggered;
  if (!d.post || exposures == 0) return d;
  const bool may_retweet = active || (triggered && !spontaneous && !forced);
  if (!may_retweet || !rt_draw) return d;

  std::uint64_t seen = 0;
  for (UserId f : follows) {
    if (f < in.prev_post.size() && in.prev_post[f] >= 0) {
      if (seen++ == pick) {
        d.target = in.prev_post[f];
        break;
      }
    }
  }
  d.retweet = true;
  return d;
}

void decide_serial(const StepInput& in, std::vector<Decision>& out) {
  for (std::size_t u = 0; u < out.size(); ++u) out[u] = decide(in, u);
}

void decide_parallel(const StepInput& in, std::vector<Decision>& out) {
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t u = 0; u < n; ++u) out[static_cast<std::size_t>(u)] = decide(in, static_cast<std::size_t>(u));
}

double get_prob(const nlohmann::json& doc, const char* key, double fallback) {
  auto it = doc.find(key);
  return it == doc.end() ? fallback : it->get<double>();
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return Rng(mix64(seed ^ mix64(a * 0x9e3779b97f4a7c15ULL ^ mix64(b + 0x632be59bd9b4e019ULL))));
}

std::uint64_t Rng::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

std::uint64_t draw_power_law(Rng& rng, double alpha, std::uint64_t cap) {
  if (cap == 0) return 0;
  const double u = 1.0 - rng.uniform();  // (0, 1]
  const double k = std::floor(std::pow(u, -1.0 / (alpha - 1.0)));
  if (!(k < static_cast<double>(cap))) return cap;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(k));
}

void GeneratorParams::validate() const {
  auto bad = [](const std::string& why) { throw Error(Errc::InvalidParams, why); };
  auto prob = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) bad(std::string(name) + " must lie in [0, 1]");
  };
  if (n_users < 1) bad("n_users must be at least 1");
  if (!(follower_exponent > 1.0)) bad("follower_exponent must exceed 1");
  prob(base_spontaneous_rate, "base_spontaneous_rate");
  prob(influence_rate, "influence_rate");
  prob(retweet_fraction, "retweet_fraction");
  prob(repost_rate, "repost_rate");
  prob(off_topic_rate, "off_topic_rate");
  prob(link_rate, "link_rate");
  prob(hashtag_rate, "hashtag_rate");
  if (!(decay > 0.0 && decay <= 1.0)) bad("decay must lie in (0, 1]");
  if (step_width.count() <= 0) bad("step_width must be positive");
  if (seed_posters > n_users) bad("seed_posters exceeds n_users");
  if (keywords.empty()) bad("at least one keyword is required");
  for (const auto& k : keywords)
    if (k.empty()) bad("keywords must be non-empty");
}

GeneratorParams params_from_json(const nlohmann::json& doc, GeneratorParams p) {
  try {
    if (!doc.is_object()) throw Error(Errc::InvalidParams, "generator params must be an object");
    static const std::unordered_set<std::string> known = {
        "n_users", "follower_exponent", "max_followings", "base_spontaneous_rate", "influence_rate",
        "retweet_fraction", "repost_rate", "n_steps", "step_width", "decay", "seed_posters", "seed",
        "start_ts", "keywords", "off_topic_rate", "link_rate", "hashtag_rate", "languages"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
      if (!known.count(it.key())) throw Error(Errc::InvalidParams, "unknown generator parameter '" + it.key() + "'");

    p.n_users = doc.value("n_users", p.n_users);
    p.follower_exponent = get_prob(doc, "follower_exponent", p.follower_exponent);
    p.max_followings = doc.value("max_followings", p.max_followings);
    p.base_spontaneous_rate = get_prob(doc, "base_spontaneous_rate", p.base_spontaneous_rate);
    p.influence_rate = get_prob(doc, "influence_rate", p.influence_rate);
    p.retweet_fraction = get_prob(doc, "retweet_fraction", p.retweet_fraction);
    p.repost_rate = get_prob(doc, "repost_rate", p.repost_rate);
    p.n_steps = doc.value("n_steps", p.n_steps);
    if (auto it = doc.find("step_width"); it != doc.end())
      p.step_width = it->is_string() ? parse_duration(it->get<std::string>())
                                     : Duration{static_cast<std::int64_t>(it->get<double>() * 1000.0)};
    p.decay = get_prob(doc, "decay", p.decay);
    p.seed_posters = doc.value("seed_posters", p.seed_posters);
    p.seed = doc.value("seed", p.seed);
    if (auto it = doc.find("start_ts"); it != doc.end()) p.start_ts = parse_rfc3339(it->get<std::string>());
    if (auto it = doc.find("keywords"); it != doc.end()) p.keywords = it->get<std::vector<std::string>>();
    p.off_topic_rate = get_prob(doc, "off_topic_rate", p.off_topic_rate);
    p.link_rate = get_prob(doc, "link_rate", p.link_rate);
    p.hashtag_rate = get_prob(doc, "hashtag_rate", p.hashtag_rate);
    if (auto it = doc.find("languages"); it != doc.end()) p.languages = it->get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidParams, std::string("invalid generator params: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidParams) throw;
    throw Error(Errc::InvalidParams, e.what());
  }
  p.validate();
  return p;
}

nlohmann::ordered_json params_to_json(const GeneratorParams& p) {
  nlohmann::ordered_json doc;
  doc["n_users"] = p.n_users;
  doc["follower_exponent"] = p.follower_exponent;
  doc["max_followings"] = p.max_followings;
  doc["base_spontaneous_rate"] = p.base_spontaneous_rate;
  doc["influence_rate"] = p.influence_rate;
  doc["retweet_fraction"] = p.retweet_fraction;
  doc["repost_rate"] = p.repost_rate;
  doc["n_steps"] = p.n_steps;
  doc["step_width"] = format_duration(p.step_width);
  doc["decay"] = p.decay;
  doc["seed_posters"] = p.seed_posters;
  doc["seed"] = p.seed;
  doc["start_ts"] = format_rfc3339(p.start_ts);
  doc["keywords"] = p.keywords;
  doc["off_topic_rate"] = p.off_topic_rate;
  doc["link_rate"] = p.link_rate;
  doc["hashtag_rate"] = p.hashtag_rate;
  doc["languages"] = p.languages;
  return doc;
}

Preset load_preset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open preset '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::InvalidParams, std::string("invalid preset JSON: ") + e.what());
  }
  Preset p;
  p.name = doc.value("name", path.stem().string());
  p.description = doc.value("description", "");
  p.params = params_from_json(doc.value("generator", nlohmann::json::object()));
  p.session = doc.value("session", nlohmann::json::object());
  p.targets = doc.value("targets", nlohmann::json::object());
  return p;
}

std::string user_name(std::size_t index) { return "u" + std::to_string(index); }

std::vector<UserMeta> generate_graph(const GeneratorParams& params) {
  params.validate();
  const std::size_t n = params.n_users;
  std::vector<std::vector<std::size_t>> follows(n);
  std::vector<std::uint64_t> in_degree(n, 0);
  std::uint64_t cap = n - 1;
  if (params.max_followings != 0) cap = std::min<std::uint64_t>(cap, params.max_followings);

  for (std::size_t u = 0; u < n && cap > 0; ++u) {
    Rng r = Rng::stream(params.seed, kGraphStream, u);
    const std::uint64_t k = draw_power_law(r, params.follower_exponent, cap);
    // Floyd's sampling of k distinct candidates out of the n-1 other users.
    std::unordered_set<std::uint64_t> chosen;
    const std::uint64_t pool = n - 1;
    for (std::uint64_t j = pool - k; j < pool; ++j) {
      std::uint64_t t = r.below(j + 1);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    auto& out = follows[u];
    out.reserve(k);
    for (std::uint64_t c : chosen) out.push_back(c < u ? c : c + 1);
    std::sort(out.begin(), out.end());
    for (std::size_t f : out) ++in_degree[f];
  }

  std::vector<UserMeta> graph(n);
  for (std::size_t u = 0; u < n; ++u) {
    graph[u].user_id = user_name(u);
    graph[u].followers_count = in_degree[u];
    graph[u].followings.reserve(follows[u].size());
    for (std::size_t f : follows[u]) graph[u].followings.push_back(user_name(f));
  }
  return graph;
}

std::vector<Message> generate_cascade(const std::vector<UserMeta>& graph_users, const GeneratorParams& params,
                                      Execution exec) {
  params.validate();
  const GraphView graph = GraphView::from_users(graph_users);
  const std::size_t n = graph_users.size();

  std::vector<std::string> lang_of(n);
  if (!params.languages.empty())
    for (std::size_t u = 0; u < n; ++u)
      lang_of[u] = params.languages[Rng::stream(params.seed, kLangStream, u).below(params.languages.size())];

  std::vector<Message> posts;
  std::vector<std::int64_t> prev_post(graph.id_count(), -1);
  std::vector<std::int64_t> cur_post(graph.id_count(), -1);
  std::vector<char> active(n, 0);
  std::vector<Decision> decisions(n);

  double spontaneous = params.base_spontaneous_rate;
  double repost = params.repost_rate;
  for (std::size_t step = 0; step < params.n_steps; ++step) {
    StepInput in{graph, params, prev_post, active, step, spontaneous, repost};
    if (exec == Execution::Parallel) decide_parallel(in, decisions);
    else decide_serial(in, decisions);

    std::fill(cur_post.begin(), cur_post.end(), -1);
    const Timestamp step_start = params.start_ts + params.step_width * static_cast<std::int64_t>(step);
    for (std::size_t u = 0; u < n; ++u) {
      const Decision& d = decisions[u];
      if (!d.post) continue;
      Message m;
      m.id = "p" + std::to_string(step) + "_" + std::to_string(u);
      m.ts = step_start + Duration{d.jitter_ms};
      m.author = graph_users[u].user_id;
      if (d.retweet) {
        const Message& orig = posts[static_cast<std::size_t>(d.target)];
        m.kind = MessageKind::Retweet;
        m.retweet_of = orig.id;
        m.text = "RT @" + orig.author + ": " + orig.text;
        m.links = orig.links;
        m.hashtags = orig.hashtags;
      } else {
        Content c = make_content(d.text_seed, params);
        m.text = std::move(c.text);
        m.links = std::move(c.links);
        m.hashtags = std::move(c.tags);
      }
      if (!params.languages.empty()) m.lang = lang_of[u];
      cur_post[u] = static_cast<std::int64_t>(posts.size());
      active[u] = 1;
      posts.push_back(std::move(m));
    }
    std::swap(prev_post, cur_post);
    spontaneous *= params.decay;
    repost *= params.decay;
  }

  std::stable_sort(posts.begin(), posts.end(), [](const Message& a, const Message& b) { return a.ts < b.ts; });
  for (std::size_t i = 0; i < posts.size(); ++i) posts[i].seq = i + 1;
  return posts;
}

}  // namespace diffscope::synth
