// SPDX-License-Identifier: Apache-2.0
#include <httplib.h>

#include <atomic>

#include <spdlog/spdlog.h>

#include "chemagent/agent_json.hpp"
#include "chemagent/app.hpp"

namespace chemagent::app {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void send_json(httplib::Response &res, int status, const ordered_json &body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response &res, int status, const std::string &msg) {
  send_json(res, status, ordered_json{{"error", msg}});
}

// nullopt after writing a 400
std::optional<json> parse_body(const httplib::Request &req, httplib::Response &res) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    send_error(res, 400, "request body must be a JSON object");
    return std::nullopt;
  }
  return body;
}

struct AskRequest {
  std::string question;
  agent::Strategy strategy;
};

std::optional<AskRequest> parse_ask(const httplib::Request &req, httplib::Response &res,
                                    agent::Strategy dflt) {
  auto body = parse_body(req, res);
  if (!body) return std::nullopt;
  auto q = body->find("question");
  if (q == body->end() || !q->is_string() || q->get<std::string>().find_first_not_of(" \t\r\n") == std::string::npos) {
    send_error(res, 400, "field 'question' must be a non-empty string");
    return std::nullopt;
  }
  AskRequest a{q->get<std::string>(), dflt};
  if (auto p = body->find("prompt_strategy"); p != body->end() && !p->is_null()) {
    auto s = p->is_string() ? agent::parse_strategy(p->get<std::string>()) : std::nullopt;
    if (!s) {
      send_error(res, 400, "field 'prompt_strategy' must be \"minimal\" or \"domain\"");
      return std::nullopt;
    }
    a.strategy = *s;
  }
  return a;
}

int status_for(const agent::AgentOutcome &o) {
  if (o.termination != agent::Termination::backend_error) return 200;
  return o.error_kind == agent::BackendError::Kind::timeout ? 504 : 502;
}

std::string sse(std::string_view event, const ordered_json &data) {
  return "event: " + std::string(event) + "\ndata: " + data.dump() + "\n\n";
}

}  // namespace

struct Service::Impl {
  std::shared_ptr<const Runtime> rt;
  httplib::Server svr;
  std::atomic<int> in_flight{0};

  struct Busy {
    std::atomic<int> &n;
    explicit Busy(std::atomic<int> &c) : n(c) { ++n; }
    ~Busy() { --n; }
  };

  agent::AgentOutcome ask(const AskRequest &a, const agent::StepObserver &on_step = {}) {
    Busy b(in_flight);
    return agent::run(a.question, rt->agent_config(a.strategy), *rt->registry, on_step);
  }

  void routes() {
    const auto threads = static_cast<std::size_t>(rt->config.threads);
    svr.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    svr.set_payload_max_length(1 << 20);
    svr.set_logger([](const httplib::Request &req, const httplib::Response &res) {
      spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
    });
    svr.set_exception_handler([](const httplib::Request &, httplib::Response &res, std::exception_ptr ep) {
      std::string msg = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception &e) {
        msg = e.what();
      } catch (...) {
      }
      spdlog::error("handler failed: {}", msg);
      send_error(res, 500, msg);
    });

    svr.Get("/healthz", [](const httplib::Request &, httplib::Response &res) {
      res.set_content("ok", "text/plain");
    });

    svr.Get("/v1/tools", [this](const httplib::Request &, httplib::Response &res) {
      ordered_json a = ordered_json::array();
      for (const auto &t : rt->registry->tools())
        a.push_back({{"name", t.name},
                     {"label", t.label},
                     {"description", t.description},
                     {"kind", toolbox::kind_name(t.kind)}});
      send_json(res, 200, a);
    });

    svr.Post("/v1/describe", [this](const httplib::Request &req, httplib::Response &res) {
      auto body = parse_body(req, res);
      if (!body) return;
      auto s = body->find("smiles");
      if (s == body->end() || !s->is_string()) return send_error(res, 400, "field 'smiles' must be a string");
      std::string err;
      auto rows = describe(*rt->registry, s->get<std::string>(), &err);
      if (!rows) return send_error(res, 422, err);
      ordered_json out;
      for (const auto &r : *rows) out[r.tool] = r.text;
      send_json(res, 200, out);
    });

    svr.Post("/v1/ask", [this](const httplib::Request &req, httplib::Response &res) {
      auto a = parse_ask(req, res, rt->config.prompt_strategy);
      if (!a) return;
      auto o = ask(*a);
      send_json(res, status_for(o), agent::ask_response_json(o));
    });

    svr.Post("/v1/ask/stream", [this](const httplib::Request &req, httplib::Response &res) {
      auto a = parse_ask(req, res, rt->config.prompt_strategy);
      if (!a) return;
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream", [this, a = *a](std::size_t, httplib::DataSink &sink) {
            auto o = ask(a, [&sink](const agent::AgentStep &s) {
              const auto e = sse("step", agent::step_json(s));
              sink.write(e.data(), e.size());
            });
            // the one-shot body minus the steps already sent
            auto tail = agent::ask_response_json(o);
            tail.erase("steps");
            const bool ok = o.termination == agent::Termination::answered;
            if (!ok) tail["status"] = status_for(o);
            const auto e = sse(ok ? "final" : "error", tail);
            sink.write(e.data(), e.size());
            sink.done();
            return true;
          });
    });
  }
};

Service::Service(std::shared_ptr<const Runtime> rt) : impl_(std::make_unique<Impl>()) {
  impl_->rt = std::move(rt);
  impl_->routes();
}

Service::~Service() {
  stop();
}

int Service::bind(const std::string &address) {
  auto colon = address.rfind(':');
  if (colon == std::string::npos) throw ConfigError("listen address must be host:port, got " + address);
  std::string host = address.substr(0, colon);
  if (host.size() > 1 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  int port = 0;
  try {
    port = std::stoi(address.substr(colon + 1));
  } catch (const std::exception &) {
    throw ConfigError("bad port in listen address " + address);
  }
  if (port < 0 || port > 65535) throw ConfigError("bad port in listen address " + address);
  if (port == 0) {
    port = impl_->svr.bind_to_any_port(host);
    if (port < 0) throw std::runtime_error("cannot bind " + address);
  } else if (!impl_->svr.bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + address);
  }
  return port;
}

void Service::listen() {
  impl_->svr.listen_after_bind();
}

void Service::stop() {
  impl_->svr.stop();
}

void Service::wait_until_ready() const {
  impl_->svr.wait_until_ready();
}

int Service::in_flight() const {
  return impl_->in_flight.load();
}

}  // namespace chemagent::app
