#include <httplib.h>

#include <sstream>

#include "diffscope/errors.hpp"
#include "diffscope/service.hpp"

namespace diffscope::service {

namespace {

using json = nlohmann::json;

void send_json(httplib::Response& res, const nlohmann::ordered_json& doc, int status = 200) {
  res.status = status;
  res.set_content(doc.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, nlohmann::ordered_json{{"error", message}, {"status", status}}, status);
}

template <class F>
httplib::Server::Handler guarded(F fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const ApiError& e) {
      send_error(res, e.status(), e.what());
    } catch (const Error& e) {
      send_error(res, e.code() == Errc::Io ? 404 : 400, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

std::optional<std::string> param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ApiError(400, key + " must be true or false");
}

LocalField field_param(const httplib::Request& req, const char* key, std::optional<LocalField> fallback = {}) {
  auto v = param(req, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ApiError(400, std::string("query parameter '") + key + "' is required");
  }
  return parse_local_field(*v);
}

std::size_t positive_param(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long n = 0;
  try {
    n = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || n < 1) throw ApiError(400, key + " must be a positive integer");
  return static_cast<std::size_t>(n);
}

double number_param(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw ApiError(400, key + " must be a number");
  return d;
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw ApiError(400, std::string("invalid JSON body: ") + e.what());
  }
}

std::string sse_frame(const Notice& n) {
  return "id: " + std::to_string(n.seq) + "\nevent: notice\ndata: " + n.to_json().dump() + "\n\n";
}

}  // namespace

void install_routes(httplib::Server& server, SessionManager& manager) {
  const std::string base = "/api/v1";
  const std::string sid = base + "/sessions/([^/]+)";

  server.Get(base + "/health", guarded([](const httplib::Request&, httplib::Response& res) {
    send_json(res, {{"status", "ok"}});
  }));

  server.Get(base + "/sessions", guarded([&manager](const httplib::Request&, httplib::Response& res) {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& s : manager.list()) list.push_back(s->handle_json());
    send_json(res, {{"sessions", list}});
  }));

  server.Post(base + "/sessions", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
    auto session = manager.create(parse_body(req));
    res.set_header("Location", "/api/v1/sessions/" + session->id());
    send_json(res, session->handle_json(), 201);
  }));

  server.Get(sid, guarded([&manager](const httplib::Request& req, httplib::Response& res) {
    send_json(res, manager.get(req.matches[1])->handle_json());
  }));

  server.Post(sid + "/control", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
    auto session = manager.get(req.matches[1]);
    json body = parse_body(req);
    if (!body.is_object() || !body.contains("action") || !body["action"].is_string())
      throw ApiError(400, "body must be {\"action\": \"start|pause|resume|stop\"}");
    session->control(body["action"].get<std::string>());
    send_json(res, session->handle_json());
  }));

  server.Post(sid + "/events", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
    auto session = manager.get(req.matches[1]);
    bool close = false;
    if (auto v = param(req, "final")) close = parse_bool("final", *v);
    std::size_t n = session->push_events(req.body, close);
    send_json(res, {{"accepted", n}, {"closed", close}}, 202);
  }));

  server.Get(sid + "/global", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
    send_json(res, manager.get(req.matches[1])->global_json());
  }));

  server.Get(sid + "/series", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
    auto session = manager.get(req.matches[1]);
    std::optional<Duration> bucket;
    if (auto v = param(req, "bucket")) {
      try {
        bucket = parse_duration(*v);
      } catch (const Error& e) {
        throw ApiError(400, e.what());
      }
    }
    send_json(res, session->series_json(bucket));
  }));

  server.Get(sid + "/local/distribution", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
    auto session = manager.get(req.matches[1]);
    LocalField field = field_param(req, "field");
    std::optional<bool> include;
    if (auto v = param(req, "include_graph_miss")) include = parse_bool("include_graph_miss", *v);
    send_json(res, session->distribution_json(field, include));
  }));

  server.Get(sid + "/local/scatter", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
    auto session = manager.get(req.matches[1]);
    LocalField x = field_param(req, "x", LocalField::NbMessages);
    LocalField y = field_param(req, "y", LocalField::NbFe);
    double threshold = kDefaultActivityThreshold;
    if (auto v = param(req, "threshold")) threshold = number_param("threshold", *v);
    bool include = false;
    if (auto v = param(req, "include_graph_miss")) include = parse_bool("include_graph_miss", *v);
    send_json(res, session->scatter_json(x, y, threshold, include));
  }));

  server.Get(sid + "/knowledge", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
    auto session = manager.get(req.matches[1]);
    std::size_t k = 10;
    if (auto v = param(req, "k")) k = positive_param("k", *v);
    send_json(res, session->knowledge_json(k));
  }));

  server.Get(sid + "/report", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
    res.set_content(dump_report(manager.get(req.matches[1])->report()), "application/json");
  }));

  server.Get(sid + "/export/(global|local|knowledge)\\.csv",
             guarded([&manager](const httplib::Request& req, httplib::Response& res) {
               auto session = manager.get(req.matches[1]);
               const std::string table = req.matches[2];
               SessionReport report = session->report();
               std::ostringstream out;
               if (table == "global") write_global_csv(out, report);
               else if (table == "local") write_local_csv(out, report);
               else write_knowledge_csv(out, report);
               res.set_header("Content-Disposition",
                              "attachment; filename=\"" + session->id() + "-" + table + ".csv\"");
               res.set_content(out.str(), "text/csv");
             }));

  server.Get(sid + "/feed", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
    auto sub = manager.get(req.matches[1])->subscribe();
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [sub](std::size_t, httplib::DataSink& sink) {
      auto n = sub->next(std::chrono::seconds(1));
      if (!n) {
        static const std::string keepalive = ": keepalive\n\n";
        return sink.write(keepalive.data(), keepalive.size());
      }
      std::string frame = sse_frame(*n);
      if (!sink.write(frame.data(), frame.size())) return false;
      if (n->terminal) sink.done();
      return true;
    });
  }));
}

}  // namespace diffscope::service
