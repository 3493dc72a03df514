// SPDX-License-Identifier: Apache-2.0
#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <json.hpp>
#include <random>
#include <thread>

#include "chemagent/agent.hpp"
#include "chemagent/text.hpp"

namespace chemagent::agent {

using nlohmann::json;

std::string_view backend_kind_name(BackendKind k) {
  switch (k) {
    case BackendKind::http: return "http";
    case BackendKind::scripted: return "scripted";
    case BackendKind::rule_oracle: return "rule_oracle";
  }
  return "?";
}

std::optional<BackendKind> parse_backend_kind(std::string_view s) {
  if (s == "http" || s == "http_openai_compatible" || s == "openai") return BackendKind::http;
  if (s == "scripted") return BackendKind::scripted;
  if (s == "rule_oracle" || s == "oracle") return BackendKind::rule_oracle;
  return std::nullopt;
}

void BackendConfig::validate() const {
  if (kind == BackendKind::http) {
    if (endpoint_url.empty()) throw std::invalid_argument("http backend needs an endpoint URL");
    if (model_id.empty()) throw std::invalid_argument("http backend needs a model id");
  }
  if (kind == BackendKind::rule_oracle && !questions)
    throw std::invalid_argument("rule_oracle backend needs question templates");
  if (flip_probability < 0 || flip_probability > 1)
    throw std::invalid_argument("flip probability must be within [0,1]");
  if (max_tokens < 1) throw std::invalid_argument("max_tokens must be positive");
  if (retry_count < 0) throw std::invalid_argument("retry_count must not be negative");
}

std::string apply_stop(std::string text, const std::vector<std::string> &stops) {
  std::size_t cut = text.size();
  for (const auto &s : stops) {
    if (s.empty()) continue;
    auto p = text.find(s);
    if (p != std::string::npos) cut = std::min(cut, p);
  }
  text.resize(cut);
  return text;
}

// ---- question templates ----

QuestionTemplates QuestionTemplates::load(const std::string &path) {
  QuestionTemplates q;
  for (auto &row : text::read_tsv(text::read_file(path))) {
    if (row.size() < 2) throw std::runtime_error(path + ": expected tool and template columns");
    auto p = row[1].find("{smiles}");
    if (p == std::string::npos) throw std::runtime_error(path + ": template without {smiles}");
    q.rows.push_back({row[0], row[1].substr(0, p), row[1].substr(p + 8)});
  }
  if (q.rows.empty()) throw std::runtime_error(path + ": no templates");
  return q;
}

std::vector<const QuestionTemplate *> QuestionTemplates::for_tool(std::string_view tool) const {
  std::vector<const QuestionTemplate *> out;
  for (const auto &r : rows)
    if (r.tool == tool) out.push_back(&r);
  return out;
}

std::optional<std::pair<std::string, std::string>> QuestionTemplates::recognise(
    std::string_view question) const {
  question = text::trim(question);
  const QuestionTemplate *best = nullptr;
  std::string smiles;
  for (const auto &r : rows) {
    if (question.size() <= r.prefix.size() + r.suffix.size()) continue;
    if (!text::starts_with(question, r.prefix)) continue;
    if (question.substr(question.size() - r.suffix.size()) != r.suffix) continue;
    std::string_view mid =
        question.substr(r.prefix.size(), question.size() - r.prefix.size() - r.suffix.size());
    if (mid.find(' ') != std::string_view::npos) continue;
    // longest fixed text wins ("... of X" vs "... of X?")
    if (!best || r.prefix.size() + r.suffix.size() > best->prefix.size() + best->suffix.size()) {
      best = &r;
      smiles = std::string(mid);
    }
  }
  if (!best) return std::nullopt;
  return std::make_pair(best->tool, smiles);
}

namespace {

// ---- scripted ----

class ScriptedBackend : public Backend {
public:
  explicit ScriptedBackend(std::vector<std::string> script) : script_(std::move(script)) {}
  std::string complete(const std::string &) override {
    if (next_ >= script_.size()) throw BackendError(BackendError::Kind::exhausted, "script exhausted");
    return script_[next_++];
  }

private:
  std::vector<std::string> script_;
  std::size_t next_ = 0;
};

// ---- rule oracle ----

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::optional<std::string> complement(std::string_view v) {
  static const std::pair<const char *, const char *> pairs[] = {
      {"Yes", "No"}, {"High", "Low"}, {"True", "False"}};
  for (auto [a, b] : pairs) {
    if (v == a) return std::string(b);
    if (v == b) return std::string(a);
  }
  return std::nullopt;
}

class OracleBackend : public Backend {
public:
  explicit OracleBackend(const BackendConfig &cfg) : cfg_(cfg) {}

  std::string complete(const std::string &prompt) override {
    auto q = prompt.rfind("\nQuestion: ");
    if (q == std::string::npos)
      throw BackendError(BackendError::Kind::malformed, "oracle: prompt has no question line");
    auto eol = prompt.find('\n', q + 1);
    std::string question = prompt.substr(q + 11, eol == std::string::npos ? std::string::npos
                                                                         : eol - q - 11);
    std::string_view scratch =
        eol == std::string::npos ? std::string_view{} : std::string_view(prompt).substr(eol);

    auto obs = scratch.rfind("\nObservation: ");
    if (obs != std::string_view::npos) {
      auto end = scratch.find('\n', obs + 1);
      std::string value(text::trim(scratch.substr(obs + 14, end == std::string_view::npos
                                                               ? std::string_view::npos
                                                               : end - obs - 14)));
      if (cfg_.flip_probability > 0) {
        if (auto c = complement(value)) {
          std::mt19937_64 rng(cfg_.noise_seed ^ fnv1a(question));
          if (std::uniform_real_distribution<double>(0, 1)(rng) < cfg_.flip_probability) value = *c;
        }
      }
      return " I now know the final answer\nFinal Answer: " + value;
    }
    auto hit = cfg_.questions->recognise(question);
    if (!hit)
      return " None of the tools answers this question\nFinal Answer: I cannot answer this "
             "question with the available tools.";
    return " The question asks for one property of the molecule; I will call the matching "
           "tool\nAction: " +
           hit->first + "\nAction Input: " + hit->second;
  }

private:
  BackendConfig cfg_;
};

// ---- OpenAI-compatible HTTP ----

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string base;    // path prefix without trailing slash or /v1
};

Endpoint split_url(const std::string &url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw std::invalid_argument("endpoint URL needs a scheme: " + url);
  auto slash = url.find('/', scheme + 3);
  Endpoint e;
  e.origin = url.substr(0, slash);
  e.base = slash == std::string::npos ? "" : url.substr(slash);
  while (!e.base.empty() && e.base.back() == '/') e.base.pop_back();
  if (e.base.size() >= 3 && e.base.compare(e.base.size() - 3, 3, "/v1") == 0)
    e.base.resize(e.base.size() - 3);
  return e;
}

class HttpBackend : public Backend {
public:
  explicit HttpBackend(const BackendConfig &cfg) : cfg_(cfg), ep_(split_url(cfg.endpoint_url)) {
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (text::starts_with(ep_.origin, "https://"))
      throw std::invalid_argument("this build has no TLS support; use an http:// endpoint");
#endif
    client_ = std::make_unique<httplib::Client>(ep_.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout).count();
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout).count() % 1000000;
    client_->set_connection_timeout(secs, usecs);
    client_->set_read_timeout(secs, usecs);
    client_->set_write_timeout(secs, usecs);
    if (!cfg.api_key.empty()) client_->set_bearer_token_auth(cfg.api_key);
  }

  std::string complete(const std::string &prompt) override {
    json body{{"model", cfg_.model_id},
              {"temperature", cfg_.temperature},
              {"max_tokens", cfg_.max_tokens},
              {"stop", cfg_.stop_sequences}};
    std::string path = ep_.base;
    if (cfg_.chat) {
      body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
      path += "/v1/chat/completions";
    } else {
      body["prompt"] = prompt;
      path += "/v1/completions";
    }
    const std::string payload = body.dump();
    auto delay = cfg_.backoff;
    for (int attempt = 0;; ++attempt) {
      try {
        return apply_stop(once(path, payload), cfg_.stop_sequences);
      } catch (const BackendError &e) {
        if (attempt >= cfg_.retry_count) throw;
        spdlog::warn("completion attempt {} failed: {}; retrying in {} ms", attempt + 1, e.what(),
                     delay.count());
        std::this_thread::sleep_for(delay);
        delay *= 2;
      }
    }
  }

private:
  std::string once(const std::string &path, const std::string &payload) {
    auto res = client_->Post(path, payload, "application/json");
    if (!res) {
      auto err = res.error();
      auto kind = err == httplib::Error::Read || err == httplib::Error::Write ||
                          err == httplib::Error::ConnectionTimeout
                      ? BackendError::Kind::timeout
                      : BackendError::Kind::transport;
      throw BackendError(kind, "request to " + ep_.origin + path + " failed: " + httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300)
      throw BackendError(BackendError::Kind::status,
                         "endpoint returned HTTP " + std::to_string(res->status) + ": " +
                             res->body.substr(0, 200));
    try {
      auto j = json::parse(res->body);
      const auto &choice = j.at("choices").at(0);
      if (choice.contains("message")) return choice.at("message").at("content").get<std::string>();
      return choice.at("text").get<std::string>();
    } catch (const json::exception &e) {
      throw BackendError(BackendError::Kind::malformed,
                         std::string("malformed completion response: ") + e.what());
    }
  }

  BackendConfig cfg_;
  Endpoint ep_;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace

std::unique_ptr<Backend> make_backend(const BackendConfig &cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case BackendKind::scripted: return std::make_unique<ScriptedBackend>(cfg.script);
    case BackendKind::rule_oracle: return std::make_unique<OracleBackend>(cfg);
    case BackendKind::http: return std::make_unique<HttpBackend>(cfg);
  }
  throw std::invalid_argument("unknown backend kind");
}

}  // namespace chemagent::agent
