#include "diffscope/cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <fstream>
#include <iostream>

#include "diffscope/errors.hpp"
#include "diffscope/event_io.hpp"
#include "diffscope/oracle.hpp"
#include "diffscope/pipeline.hpp"
#include "diffscope/report.hpp"
#include "diffscope/service.hpp"
#include "diffscope/source.hpp"
#include "diffscope/synth.hpp"

namespace diffscope::cli {

namespace {

using json = nlohmann::json;

// Raised for flag values that parse but are unusable.
struct BadFlags : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string env_name(const std::string& flag) {
  std::string name = "DIFFSCOPE_";
  for (char c : flag.substr(flag.find_first_not_of('-')))
    name += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

template <class T>
CLI::Option* flag(CLI::App* app, const std::string& name, T& var, const std::string& help) {
  return app->add_option(name, var, help)->envname(env_name(name));
}

CLI::Option* toggle(CLI::App* app, const std::string& name, bool& var, const std::string& help) {
  return app->add_flag(name, var, help)->envname(env_name(name));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(',', pos);
    auto item = trim(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (!item.empty()) out.push_back(item);
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

struct ConfigFlags {
  std::string keywords;
  std::string language;
  std::string start;
  std::string duration;
  std::string bucket;
  std::string display_offset;
  std::size_t k = 0;
  std::string stopwords;
  bool legacy_140 = false;

  void attach(CLI::App* app, bool keywords_required) {
    auto* kw = flag(app, "--keywords", keywords, "Comma-separated keyword list");
    if (keywords_required) kw->required();
    flag(app, "--language", language, "Keep only messages with this language tag");
    flag(app, "--start", start, "Session start (RFC 3339)");
    flag(app, "--duration", duration, "Session length, e.g. 72h");
    flag(app, "--bucket", bucket, "Series bucket width, e.g. 1h");
    flag(app, "--display-offset", display_offset, "UTC offset for rendering, e.g. +1 or +01:00");
    flag(app, "--k", k, "Top-k size for knowledge lists");
    flag(app, "--stopwords", stopwords, "File with one stopword per line");
    toggle(app, "--legacy-140", legacy_140, "Reject texts longer than 140 code points");
  }

  bool given() const { return !keywords.empty(); }

  json to_json() const {
    json c;
    c["keywords"] = split_list(keywords);
    if (!language.empty()) c["language"] = language;
    if (!start.empty()) c["start_ts"] = start;
    if (!duration.empty()) c["duration"] = duration;
    if (!bucket.empty()) c["bucket"] = bucket;
    if (!display_offset.empty()) {
      // Bare integers are hours.
      bool digits = display_offset.find_first_not_of("+-0123456789") == std::string::npos;
      c["display_offset"] = digits ? json(std::stoi(display_offset)) : json(display_offset);
    }
    if (k) c["k"] = k;
    if (!stopwords.empty()) c["stopwords"] = read_lines(stopwords);
    return c;
  }

  SessionConfig build() const { return config_from_json(to_json()); }
};

void print_summary(std::ostream& out, const SessionReport& r) {
  const auto& g = r.global;
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("-"); };
  out << "seen " << r.filter.seen << ", accepted " << r.filter.accepted << "\n";
  if (r.session_start) out << "start " << format_rfc3339(*r.session_start, r.config.display_offset_minutes) << "\n";
  out << "NbTw " << g.nb_tw << "  NbRTw " << g.nb_rtw << "  NbUs " << g.nb_us << "\n";
  out << "AVG(Tw/Us) " << opt(g.avg_tw_per_user) << "  AVG(RTw/Us) " << opt(g.avg_rtw_per_user) << "\n";
  out << "AVG(T_tw) " << opt(g.avg_gap_tw_s) << " s  AVG(T_rtw) " << opt(g.avg_gap_rtw_s) << " s\n";
}

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diffusion analytics over microblog event logs"};
  app.require_subcommand(1, 1);

  // replay
  auto* replay = app.add_subcommand("replay", "Run a full session over an event log");
  std::string log_path, graph_path, out_dir;
  ConfigFlags replay_cfg;
  flag(replay, "--log", log_path, "Event log (JSON Lines)")->required();
  flag(replay, "--graph", graph_path, "Graph snapshot (JSON Lines)")->required();
  flag(replay, "--out", out_dir, "Directory for report.json and CSV exports");
  replay_cfg.attach(replay, true);

  // generate
  auto* generate = app.add_subcommand("generate", "Generate a synthetic graph and cascade log");
  std::string preset_path, params_path, out_log, out_graph;
  std::map<std::string, std::string> gen_values;
  flag(generate, "--preset", preset_path, "Preset file");
  flag(generate, "--params", params_path, "Generator parameters (JSON)");
  flag(generate, "--out-log", out_log, "Output event log")->required();
  flag(generate, "--out-graph", out_graph, "Output graph snapshot")->required();
  const std::vector<std::pair<std::string, std::string>> gen_flags = {
      {"--users", "n_users"},
      {"--alpha", "follower_exponent"},
      {"--max-followings", "max_followings"},
      {"--spontaneous", "base_spontaneous_rate"},
      {"--influence", "influence_rate"},
      {"--retweet-fraction", "retweet_fraction"},
      {"--repost", "repost_rate"},
      {"--steps", "n_steps"},
      {"--step-width", "step_width"},
      {"--decay", "decay"},
      {"--seed-posters", "seed_posters"},
      {"--seed", "seed"},
      {"--start", "start_ts"},
      {"--keywords", "keywords"},
      {"--off-topic", "off_topic_rate"},
      {"--link-rate", "link_rate"},
      {"--hashtag-rate", "hashtag_rate"},
      {"--languages", "languages"},
  };
  for (const auto& [name, key] : gen_flags) flag(generate, name, gen_values[key], "Generator field " + key);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Recompute a report with the batch oracle");
  std::string oracle_log, oracle_graph, compare_path, oracle_out;
  ConfigFlags oracle_cfg;
  flag(oracle, "--log", oracle_log, "Event log (JSON Lines)")->required();
  flag(oracle, "--graph", oracle_graph, "Graph snapshot (JSON Lines)")->required();
  flag(oracle, "--compare", compare_path, "Engine report to diff against");
  flag(oracle, "--out", oracle_out, "Write the oracle report here");
  oracle_cfg.attach(oracle, false);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string addr = "127.0.0.1:8080", static_dir, persist_dir;
  int flush_ms = 500;
  flag(serve, "--addr", addr, "HOST:PORT to listen on; port 0 picks a free port");
  flag(serve, "--static", static_dir, "Directory of dashboard assets served at /");
  flag(serve, "--persist", persist_dir, "Write each finished session's report under DIR/<id>");
  flag(serve, "--flush-ms", flush_ms, "Minimum spacing of live notices")->check(CLI::PositiveNumber);

  // export
  auto* exp = app.add_subcommand("export", "Write CSV exports for a saved report");
  std::string report_path, export_dir;
  flag(exp, "--report", report_path, "report.json")->required();
  flag(exp, "--out", export_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string help;
    if (!app.get_subcommands().empty()) help = app.get_subcommands().front()->help();
    err << "error: " << e.what() << "\n";
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << (help.empty() ? app.help() : help);
      return 0;
    }
    return 2;
  }

  try {
    if (replay->parsed()) {
      SessionConfig config = replay_cfg.build();
      GraphFile graph = read_graph_file(graph_path);
      ParseOptions po;
      po.legacy_140 = replay_cfg.legacy_140;
      ReplaySource source(log_path, po);
      SessionReport report = run_pipeline(config, source, graph);
      if (!out_dir.empty()) write_report_dir(out_dir, report);
      print_summary(out, report);
      return 0;
    }

    if (generate->parsed()) {
      synth::GeneratorParams base;
      if (!preset_path.empty()) base = synth::load_preset(preset_path).params;
      if (!params_path.empty()) {
        std::ifstream in(params_path);
        if (!in) throw Error(Errc::Io, "cannot open '" + params_path + "'");
        json doc;
        try {
          doc = json::parse(in);
        } catch (const json::parse_error& e) {
          throw Error(Errc::InvalidParams, std::string("invalid params JSON: ") + e.what());
        }
        base = synth::params_from_json(doc, base);
      }
      json overrides = json::object();
      for (const auto& [name, key] : gen_flags) {
        const std::string& v = gen_values[key];
        if (generate->count(name) == 0 && v.empty()) continue;
        if (key == "keywords" || key == "languages") {
          overrides[key] = split_list(v);
        } else if (key == "step_width" || key == "start_ts") {
          overrides[key] = v;
        } else {
          json num;
          try {
            num = json::parse(v);
          } catch (const json::parse_error&) {
            throw BadFlags(name + " expects a number, got '" + v + "'");
          }
          if (!num.is_number()) throw BadFlags(name + " expects a number, got '" + v + "'");
          overrides[key] = num;
        }
      }
      synth::GeneratorParams params = synth::params_from_json(overrides, base);
      auto users = synth::generate_graph(params);
      auto log = synth::generate_cascade(users, params);
      write_graph_file(out_graph, users);
      write_event_log(out_log, log);
      out << "users " << users.size() << ", events " << log.size() << "\n";
      return 0;
    }

    if (oracle->parsed()) {
      std::optional<SessionReport> engine_report;
      json engine_doc;
      if (!compare_path.empty()) {
        std::ifstream in(compare_path);
        if (!in) throw Error(Errc::Io, "cannot open '" + compare_path + "'");
        try {
          engine_doc = json::parse(in);
        } catch (const json::parse_error& e) {
          throw Error(Errc::MalformedRecord, std::string("invalid report JSON: ") + e.what());
        }
        engine_report = report_from_json(engine_doc);
      }
      SessionConfig config;
      if (oracle_cfg.given()) config = oracle_cfg.build();
      else if (engine_report) config = engine_report->config;
      else throw BadFlags("--keywords is required without --compare");
      ParseOptions po;
      po.legacy_140 = oracle_cfg.legacy_140;
      auto log = read_event_log(oracle_log, po);
      GraphFile graph = read_graph_file(oracle_graph);
      SessionReport expected = oracle_report(config, log, graph.users, graph.duplicates_removed);
      if (!oracle_out.empty()) {
        std::ofstream f(oracle_out, std::ios::binary);
        if (!f) throw Error(Errc::Io, "cannot write '" + oracle_out + "'");
        f << dump_report(expected);
      }
      if (!engine_report) {
        if (oracle_out.empty()) out << dump_report(expected);
        return 0;
      }
      json expected_doc = json::parse(dump_report(expected));
      if (auto d = compare_json(expected_doc, engine_doc)) {
        out << "divergence at " << d->path << ": oracle " << d->expected << ", report " << d->actual << "\n";
        return 3;
      }
      out << "match\n";
      return 0;
    }

    if (serve->parsed()) {
      auto colon = addr.rfind(':');
      if (colon == std::string::npos) throw BadFlags("--addr must be HOST:PORT");
      std::string host = addr.substr(0, colon);
      int port = 0;
      try {
        port = std::stoi(addr.substr(colon + 1));
      } catch (const std::exception&) {
        throw BadFlags("--addr must be HOST:PORT");
      }
      if (port < 0 || port > 65535) throw BadFlags("--addr port out of range");

      service::SessionOptions options;
      options.flush_interval = std::chrono::milliseconds(flush_ms);
      if (!persist_dir.empty()) options.persist_dir = persist_dir;
      service::SessionManager manager(options);
      httplib::Server server;
      // httplib enables SO_REUSEPORT by default, which would let a second server share the port.
      server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
      });
      service::install_routes(server, manager);
      if (!static_dir.empty() && !server.set_mount_point("/", static_dir))
        throw BadFlags("--static directory '" + static_dir + "' does not exist");

      if (port == 0) {
        port = server.bind_to_any_port(host);
        if (port < 0) {
          err << "error: cannot bind " << host << "\n";
          return 1;
        }
      } else if (!server.bind_to_port(host, port)) {
        err << "error: cannot bind " << addr << "\n";
        return 1;
      }
      out << "listening on http://" << host << ":" << port << std::endl;
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.listen_after_bind();
      g_server = nullptr;
      return 0;
    }

    if (exp->parsed()) {
      write_report_dir(export_dir, load_report(report_path));
      return 0;
    }
  } catch (const BadFlags& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::InvalidConfig || e.code() == Errc::InvalidParams ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace diffscope::cli
