#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "diffscope/message.hpp"
#include "diffscope/time.hpp"

namespace diffscope::synth {

/// SplitMix64. Independent streams are derived by hashing (seed, a, b), so a
/// user's draws at a given step do not depend on how work is scheduled.
class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}
  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

/// Draws k >= 1 with P(K >= k) = k^-(alpha-1), capped at `cap`.
std::uint64_t draw_power_law(Rng& rng, double alpha, std::uint64_t cap);

struct GeneratorParams {
  std::size_t n_users = 1000;
  // Exponent of the following-count distribution, > 1.
  double follower_exponent = 2.5;
  // 0 means n_users - 1.
  std::size_t max_followings = 0;
  double base_spontaneous_rate = 0.01;
  double influence_rate = 0.05;
  double retweet_fraction = 0.3;
  // Per-step probability that an already-active user posts again.
  double repost_rate = 0.02;
  std::size_t n_steps = 72;
  Duration step_width = std::chrono::hours{1};
  // Per-step multiplier on the spontaneous and repost rates.
  double decay = 1.0;
  // Users forced to post at step 0.
  std::size_t seed_posters = 0;
  std::uint64_t seed = 1;
  Timestamp start_ts = Timestamp{std::chrono::sys_days{std::chrono::year{2015} / 1 / 23}};
  std::vector<std::string> keywords{"HoloLens"};
  // Share of posts that carry no keyword.
  double off_topic_rate = 0.0;
  double link_rate = 0.2;
  double hashtag_rate = 0.3;
  // When non-empty, every user is assigned one language tag.
  std::vector<std::string> languages;

  /// Throws Error{InvalidParams}.
  void validate() const;
};

GeneratorParams params_from_json(const nlohmann::json& doc, GeneratorParams base = {});
nlohmann::ordered_json params_to_json(const GeneratorParams& p);

struct Preset {
  std::string name;
  std::string description;
  GeneratorParams params;
  nlohmann::json session;  // keywords/bucket overrides for replaying the output
  nlohmann::json targets;
};

Preset load_preset(const std::filesystem::path& path);

std::string user_name(std::size_t index);

/// Users "u0".."u{n-1}"; following counts from draw_power_law, followings
/// uniform without replacement, followers_count equal to the in-degree.
std::vector<UserMeta> generate_graph(const GeneratorParams& params);

enum class Execution { Serial, Parallel };

/// Discrete-time cascade over `graph`, emitted sorted by timestamp. Serial and
/// parallel execution produce identical logs.
std::vector<Message> generate_cascade(const std::vector<UserMeta>& graph, const GeneratorParams& params,
                                      Execution exec = Execution::Parallel);

}  // namespace diffscope::synth
