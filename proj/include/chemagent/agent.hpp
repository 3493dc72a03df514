// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chemagent/toolbox.hpp"

namespace chemagent::agent {

// ---- prompts ----

enum class Strategy { minimal, domain };

std::string_view strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view s);

struct ModelTokens {
  std::string begin;
  std::string end;
  bool chat = false;  // post to /v1/chat/completions instead of /v1/completions
};

struct PromptTemplate {
  Strategy strategy = Strategy::domain;
  std::string preamble;
  std::string format_rules;
  ModelTokens tokens;

  // Reads <dir>/minimal.txt or domain.txt, format.txt and model_tokens.tsv.
  // Unknown models use the `default` row.
  static PromptTemplate load(const std::string &dir, Strategy s, const std::string &model_id);
};

struct AgentAction {
  std::string tool;
  std::string input;
};

struct AgentStep {
  std::string thought;
  AgentAction action;
  std::string observation;
  // A reply that did not parse. Rendered as the raw reply followed by the
  // corrective observation; never part of AgentOutcome::steps.
  bool format_error = false;
  std::string raw;
};

std::string serialize_step(const AgentStep &s);

std::string render_prompt(const PromptTemplate &t, const toolbox::ToolRegistry &registry,
                          std::string_view question, const std::vector<AgentStep> &history);

// ---- output parsing ----

struct ThoughtAction {
  std::string thought;
  AgentAction action;
};
struct Final {
  std::string thought;
  std::string answer;
};
struct ParseError {
  std::string reason;
};
using Parsed = std::variant<ThoughtAction, Final, ParseError>;

Parsed parse_model_output(std::string_view text);

extern const char *const kCorrectiveObservation;

// ---- backends ----

enum class BackendKind { http, scripted, rule_oracle };

std::string_view backend_kind_name(BackendKind k);
std::optional<BackendKind> parse_backend_kind(std::string_view s);

// Benchmark phrasing templates; the rule oracle reads questions back with them.
struct QuestionTemplate {
  std::string tool;
  std::string prefix;  // text before {smiles}
  std::string suffix;  // text after {smiles}

  std::string render(std::string_view smiles) const { return prefix + std::string(smiles) + suffix; }
};

struct QuestionTemplates {
  std::vector<QuestionTemplate> rows;

  static QuestionTemplates load(const std::string &path);
  std::vector<const QuestionTemplate *> for_tool(std::string_view tool) const;
  // Tool and SMILES of a question written with one of the templates.
  std::optional<std::pair<std::string, std::string>> recognise(std::string_view question) const;
};

struct BackendConfig {
  BackendKind kind = BackendKind::rule_oracle;
  // http
  std::string endpoint_url;
  std::string model_id;
  std::string api_key;
  double temperature = 0.0;
  int max_tokens = 256;
  std::vector<std::string> stop_sequences{"Observation:"};
  std::chrono::milliseconds timeout{60000};
  int retry_count = 2;
  std::chrono::milliseconds backoff{250};
  bool chat = false;
  // scripted
  std::vector<std::string> script;
  // rule_oracle
  std::shared_ptr<const QuestionTemplates> questions;
  double flip_probability = 0.0;  // noisy oracle: flips qualitative final answers
  std::uint64_t noise_seed = 0;

  void validate() const;
};

class BackendError : public std::runtime_error {
public:
  enum class Kind { transport, timeout, status, malformed, exhausted };
  BackendError(Kind k, const std::string &what) : std::runtime_error(what), kind(k) {}
  Kind kind;
};

class Backend {
public:
  virtual ~Backend() = default;
  virtual std::string complete(const std::string &prompt) = 0;
};

// Fresh backend state (script position, connection) for one run.
std::unique_ptr<Backend> make_backend(const BackendConfig &cfg);

// Cut `text` at the earliest stop sequence.
std::string apply_stop(std::string text, const std::vector<std::string> &stops);

// ---- loop ----

enum class Termination { answered, max_steps, parse_failure_limit, backend_error };

std::string_view termination_name(Termination t);

struct AgentConfig {
  int max_steps = 5;
  int parse_retry_limit = 2;
  PromptTemplate prompt;
  BackendConfig backend;
};

struct AgentOutcome {
  std::string question;
  std::optional<std::string> final_answer;
  std::vector<AgentStep> steps;
  std::vector<std::string> rejected_replies;  // replies that failed to parse, in order
  Termination termination = Termination::max_steps;
  std::string error;  // backend failure detail
  std::optional<BackendError::Kind> error_kind;
  int backend_calls = 0;
  std::chrono::microseconds wall_time{0};
};

// Called after every completed tool step; used for streaming.
using StepObserver = std::function<void(const AgentStep &)>;

AgentOutcome run(std::string_view question, const AgentConfig &cfg,
                 const toolbox::ToolRegistry &registry, const StepObserver &on_step = {});
AgentOutcome run(std::string_view question, const AgentConfig &cfg,
                 const toolbox::ToolRegistry &registry, Backend &backend,
                 const StepObserver &on_step = {});

}  // namespace chemagent::agent
