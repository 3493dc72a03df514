// SPDX-License-Identifier: Apache-2.0
#include <stdexcept>

#include "chemagent/agent.hpp"
#include "chemagent/text.hpp"

namespace chemagent::agent {

std::string_view strategy_name(Strategy s) { return s == Strategy::minimal ? "minimal" : "domain"; }

std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "minimal") return Strategy::minimal;
  // the summary tables call the domain prompt "Full"
  if (s == "domain" || s == "full" || s == "Full") return Strategy::domain;
  return std::nullopt;
}

namespace {

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      char c = s[++i];
      if (c == 'n') out += '\n';
      else if (c == 't') out += '\t';
      else out += c;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::string read_asset(const std::string &path) {
  try {
    return text::read_file(path);
  } catch (const std::runtime_error &e) {
    throw std::runtime_error(std::string("prompt asset: ") + e.what());
  }
}

}  // namespace

PromptTemplate PromptTemplate::load(const std::string &dir, Strategy s, const std::string &model_id) {
  PromptTemplate t;
  t.strategy = s;
  t.preamble = std::string(text::trim(read_asset(dir + "/" + std::string(strategy_name(s)) + ".txt")));
  t.format_rules = std::string(text::trim(read_asset(dir + "/format.txt")));
  std::optional<ModelTokens> fallback, hit;
  for (auto &row : text::read_tsv(read_asset(dir + "/model_tokens.tsv"))) {
    row.resize(4);
    ModelTokens mt{unescape(row[2]), unescape(row[3]), text::trim(row[1]) == "chat"};
    if (row[0] == model_id) hit = mt;
    if (row[0] == "default") fallback = mt;
  }
  if (hit) t.tokens = *hit;
  else if (fallback) t.tokens = *fallback;
  return t;
}

std::string serialize_step(const AgentStep &s) {
  if (s.format_error)
    return std::string(text::trim(s.raw)) + "\nObservation: " + s.observation + "\n";
  return "Thought: " + s.thought + "\nAction: " + s.action.tool + "\nAction Input: " +
         s.action.input + "\nObservation: " + s.observation + "\n";
}

std::string render_prompt(const PromptTemplate &t, const toolbox::ToolRegistry &registry,
                          std::string_view question, const std::vector<AgentStep> &history) {
  std::string out = t.tokens.begin;
  out += t.preamble;
  out += "\n\n";
  for (const auto &tool : registry.tools()) out += tool.name + ": " + tool.description + "\n";
  out += "\n";
  out += t.format_rules;
  out += "\n\nQuestion: ";
  out += question;
  out += "\n";
  out += t.tokens.end;
  for (const auto &s : history) out += serialize_step(s);
  out += "Thought:";
  return out;
}

}  // namespace chemagent::agent
