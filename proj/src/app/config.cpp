// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <cstdlib>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "chemagent/app.hpp"
#include "chemagent/text.hpp"

namespace chemagent::app {

const std::vector<SettingKey> &setting_keys() {
  static const std::vector<SettingKey> keys = {
      {"config", "key=value settings file"},
      {"data_dir", "descriptor tables, questions.tsv and molecules.txt"},
      {"prompts_dir", "prompt assets"},
      {"backend", "auto, http, scripted or rule_oracle"},
      {"endpoint", "OpenAI-compatible base URL"},
      {"model", "model id sent upstream; also selects wrapper tokens"},
      {"api_key", "bearer token for the endpoint"},
      {"prompt", "prompt strategy: minimal or domain"},
      {"max_steps", "tool calls per question"},
      {"parse_retry_limit", "malformed replies before giving up"},
      {"temperature", "sampling temperature"},
      {"max_tokens", "completion length limit"},
      {"timeout_ms", "per-request upstream timeout"},
      {"retries", "upstream retries after the first attempt"},
      {"backoff_ms", "initial retry delay, doubled each retry"},
      {"chat", "use /v1/chat/completions (true/false)"},
      {"script_file", "replies for the scripted backend, '---' between replies"},
      {"flip_probability", "rule_oracle noise: chance of flipping a qualitative answer"},
      {"noise_seed", "rule_oracle noise seed"},
      {"listen", "service address host:port"},
      {"threads", "service worker threads"},
      {"log_level", "trace, debug, info, warn, error or off"},
  };
  return keys;
}

std::string env_name(const std::string &key) {
  std::string out = "CHEMAGENT_";
  for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string_view source_name(Source s) {
  switch (s) {
    case Source::defaults: return "default";
    case Source::file: return "config file";
    case Source::env: return "environment";
    case Source::flag: return "flag";
  }
  return "?";
}

void Settings::set(const std::string &key, const std::string &value, Source src) {
  values[key] = value;
  sources[key] = src;
}

std::optional<std::string> Settings::get(const std::string &key) const {
  auto it = values.find(key);
  if (it == values.end()) return std::nullopt;
  return it->second;
}

EnvLookup process_env() {
  return [](const std::string &name) -> std::optional<std::string> {
    const char *v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

namespace {

bool known_key(std::string_view k) {
  const auto &keys = setting_keys();
  return std::any_of(keys.begin(), keys.end(), [&](const SettingKey &s) { return k == s.key; });
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string &content,
                                                     const std::string &origin) {
  std::map<std::string, std::string> out;
  int lineno = 0;
  for (const auto &raw : text::split(content, '\n')) {
    ++lineno;
    auto line = text::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(fmt::format("{}:{}: expected key = value", origin, lineno));
    std::string key(text::trim(line.substr(0, eq)));
    std::string value(text::trim(line.substr(eq + 1)));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    if (!known_key(key) || key == "config")
      throw ConfigError(fmt::format("{}:{}: unknown setting '{}'", origin, lineno, key));
    out[key] = value;
  }
  return out;
}

Settings layer_settings(const std::map<std::string, std::string> &flags, const EnvLookup &env) {
  Settings s;
  std::optional<std::string> file;
  if (auto it = flags.find("config"); it != flags.end())
    file = it->second;
  else if (auto e = env(env_name("config")); e && !e->empty())
    file = *e;
  if (file) {
    std::string content;
    try {
      content = text::read_file(*file);
    } catch (const std::exception &) {
      throw ConfigError("cannot read config file " + *file);
    }
    for (auto &[k, v] : parse_config_file(content, *file)) s.set(k, v, Source::file);
    s.set("config", *file, flags.count("config") ? Source::flag : Source::env);
  }
  for (const auto &k : setting_keys()) {
    if (std::string_view(k.key) == "config") continue;
    if (auto e = env(env_name(k.key))) s.set(k.key, *e, Source::env);
  }
  for (auto &[k, v] : flags) {
    if (!known_key(k)) throw ConfigError("unknown setting '" + k + "'");
    s.set(k, v, Source::flag);
  }
  return s;
}

namespace {

std::string where(const Settings &s, const std::string &key) {
  auto it = s.sources.find(key);
  Source src = it == s.sources.end() ? Source::defaults : it->second;
  if (src == Source::env) return env_name(key);
  return fmt::format("{} ({})", key, source_name(src));
}

template <class T>
void read_number(const Settings &s, const std::string &key, T &dst) {
  auto v = s.get(key);
  if (!v) return;
  try {
    std::size_t used = 0;
    std::string t(text::trim(*v));
    if constexpr (std::is_floating_point_v<T>) {
      dst = static_cast<T>(std::stod(t, &used));
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!t.empty() && t[0] == '-') throw std::invalid_argument("negative");
      dst = static_cast<T>(std::stoull(t, &used));
    } else {
      dst = static_cast<T>(std::stoll(t, &used));
    }
    if (used != t.size()) throw std::invalid_argument("trailing text");
  } catch (const std::exception &) {
    throw ConfigError(fmt::format("{}: '{}' is not a valid number", where(s, key), *v));
  }
}

bool read_bool(const Settings &s, const std::string &key, bool dflt) {
  auto v = s.get(key);
  if (!v) return dflt;
  std::string t(text::trim(*v));
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", where(s, key), *v));
}

}  // namespace

std::vector<std::string> parse_script(const std::string &content) {
  std::vector<std::string> out;
  std::string cur;
  bool any = false;
  for (const auto &line : text::split(content, '\n')) {
    if (text::trim(line) == "---") {
      out.push_back(cur);
      cur.clear();
      any = false;
      continue;
    }
    if (any) cur += '\n';
    cur += line;
    any = true;
  }
  while (!cur.empty() && (cur.back() == '\n' || cur.back() == '\r')) cur.pop_back();
  if (any && !cur.empty()) out.push_back(cur);
  return out;
}

AppConfig resolve(const Settings &s) {
  AppConfig c;
  c.data_dir = s.get("data_dir").value_or(CHEMAGENT_DATA_DIR);
  c.prompts_dir = s.get("prompts_dir").value_or(CHEMAGENT_PROMPTS_DIR);
  if (auto v = s.get("prompt")) {
    auto st = agent::parse_strategy(*v);
    if (!st) throw ConfigError(fmt::format("{}: unknown prompt strategy '{}'", where(s, "prompt"), *v));
    c.prompt_strategy = *st;
  }
  read_number(s, "max_steps", c.max_steps);
  read_number(s, "parse_retry_limit", c.parse_retry_limit);
  if (c.max_steps < 1) throw ConfigError("max_steps must be at least 1");
  if (c.parse_retry_limit < 1) throw ConfigError("parse_retry_limit must be at least 1");

  auto &b = c.backend;
  b.endpoint_url = s.get("endpoint").value_or("");
  b.model_id = s.get("model").value_or("");
  b.api_key = s.get("api_key").value_or("");
  read_number(s, "temperature", b.temperature);
  read_number(s, "max_tokens", b.max_tokens);
  long long ms = b.timeout.count();
  read_number(s, "timeout_ms", ms);
  b.timeout = std::chrono::milliseconds(ms);
  ms = b.backoff.count();
  read_number(s, "backoff_ms", ms);
  b.backoff = std::chrono::milliseconds(ms);
  read_number(s, "retries", b.retry_count);
  b.chat = read_bool(s, "chat", false);
  read_number(s, "flip_probability", b.flip_probability);
  read_number(s, "noise_seed", b.noise_seed);

  c.backend_choice = s.get("backend").value_or("auto");
  if (c.backend_choice == "auto") {
    b.kind = b.endpoint_url.empty() ? agent::BackendKind::rule_oracle : agent::BackendKind::http;
  } else if (auto k = agent::parse_backend_kind(c.backend_choice)) {
    b.kind = *k;
  } else {
    throw ConfigError(fmt::format("{}: unknown backend '{}'", where(s, "backend"), c.backend_choice));
  }
  if (b.kind == agent::BackendKind::http && b.model_id.empty()) b.model_id = "default";
  if (auto f = s.get("script_file")) {
    try {
      b.script = parse_script(text::read_file(*f));
    } catch (const std::runtime_error &) {
      throw ConfigError("cannot read script file " + *f);
    }
  }
  if (b.kind == agent::BackendKind::scripted && b.script.empty())
    throw ConfigError("scripted backend needs script_file with at least one reply");
  if (b.timeout.count() <= 0) throw ConfigError("timeout_ms must be positive");

  c.listen_address = s.get("listen").value_or(c.listen_address);
  c.log_level = s.get("log_level").value_or(c.log_level);
  if (spdlog::level::from_str(c.log_level) == spdlog::level::off && c.log_level != "off")
    throw ConfigError(fmt::format("{}: unknown log level '{}'", where(s, "log_level"), c.log_level));
  read_number(s, "threads", c.threads);
  if (c.threads < 1) throw ConfigError("threads must be at least 1");
  return c;
}

std::shared_ptr<const Runtime> Runtime::load(const AppConfig &cfg) {
  auto rt = std::make_shared<Runtime>();
  rt->config = cfg;
  try {
    rt->registry = toolbox::default_registry(cfg.data_dir);
    rt->questions = std::make_shared<const agent::QuestionTemplates>(
        agent::QuestionTemplates::load(cfg.data_dir + "/questions.tsv"));
    // fail at startup rather than on the first question
    for (auto s : {agent::Strategy::minimal, agent::Strategy::domain})
      rt->agent_config(s).backend.validate();
  } catch (const ConfigError &) {
    throw;
  } catch (const std::exception &e) {
    throw ConfigError(e.what());
  }
  return rt;
}

agent::AgentConfig Runtime::agent_config(agent::Strategy s) const {
  agent::AgentConfig a;
  a.max_steps = config.max_steps;
  a.parse_retry_limit = config.parse_retry_limit;
  a.backend = config.backend;
  a.backend.questions = questions;
  const std::string model = config.backend.model_id.empty() ? "default" : config.backend.model_id;
  a.prompt = agent::PromptTemplate::load(config.prompts_dir, s, model);
  a.backend.chat = a.backend.chat || a.prompt.tokens.chat;
  return a;
}

std::optional<std::vector<toolbox::ToolResult>> describe(const toolbox::ToolRegistry &r,
                                                         const std::string &smiles,
                                                         std::string *err) {
  std::vector<toolbox::ToolResult> out;
  for (const auto &t : r.tools()) {
    auto res = r.invoke(t.name, smiles);
    // other tool failures stay in the row as their message
    if (!res.ok && text::starts_with(res.text, "invalid SMILES")) {
      if (err) *err = res.text;
      return std::nullopt;
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace chemagent::app
