// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chemagent/agent.hpp"

namespace chemagent::app {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---- settings ----

// Every setting key also reads from the environment as CHEMAGENT_<KEY>.
struct SettingKey {
  const char *key;
  const char *help;
};
const std::vector<SettingKey> &setting_keys();
std::string env_name(const std::string &key);

enum class Source { defaults, file, env, flag };
std::string_view source_name(Source s);

struct Settings {
  std::map<std::string, std::string> values;
  std::map<std::string, Source> sources;
  void set(const std::string &key, const std::string &value, Source src);
  std::optional<std::string> get(const std::string &key) const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string &name)>;
EnvLookup process_env();

// key = value lines, '#' comments. Unknown keys are an error.
std::map<std::string, std::string> parse_config_file(const std::string &content,
                                                     const std::string &origin = "config");

// file < environment < flags. The file is flags["config"], else $CHEMAGENT_CONFIG.
Settings layer_settings(const std::map<std::string, std::string> &flags, const EnvLookup &env);

struct AppConfig {
  agent::BackendConfig backend;
  std::string backend_choice = "auto";  // auto: http when an endpoint is set, else rule_oracle
  agent::Strategy prompt_strategy = agent::Strategy::domain;
  int max_steps = 5;
  int parse_retry_limit = 2;
  std::string data_dir;
  std::string prompts_dir;
  std::string listen_address = "127.0.0.1:8080";
  std::string log_level = "warn";
  int threads = 8;  // service workers
};

AppConfig resolve(const Settings &s);

// Replies for the scripted backend, separated by lines holding only "---".
std::vector<std::string> parse_script(const std::string &content);

// ---- shared pieces ----

// Loaded once, read-only afterwards; shared by the CLI and the service.
struct Runtime {
  AppConfig config;
  std::shared_ptr<const toolbox::ToolRegistry> registry;
  std::shared_ptr<const agent::QuestionTemplates> questions;

  static std::shared_ptr<const Runtime> load(const AppConfig &cfg);
  agent::AgentConfig agent_config(agent::Strategy s) const;
};

// Every tool on one molecule, registry order. nullopt when the SMILES does not parse.
std::optional<std::vector<toolbox::ToolResult>> describe(const toolbox::ToolRegistry &r,
                                                         const std::string &smiles,
                                                         std::string *err = nullptr);

// ---- service ----

class Service {
public:
  explicit Service(std::shared_ptr<const Runtime> rt);
  ~Service();
  Service(const Service &) = delete;
  Service &operator=(const Service &) = delete;

  // Binds host:port (port 0 picks one) and returns the port.
  int bind(const std::string &address);
  // Blocks until stop(); in-flight requests finish first.
  void listen();
  void stop();
  void wait_until_ready() const;
  int in_flight() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---- cli ----

struct Io {
  std::istream &in;
  std::ostream &out;
  std::ostream &err;
};

int run_cli(const std::vector<std::string> &args, Io io, const EnvLookup &env);

}  // namespace chemagent::app
