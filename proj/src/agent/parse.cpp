// SPDX-License-Identifier: Apache-2.0
#include "chemagent/agent.hpp"
#include "chemagent/text.hpp"

namespace chemagent::agent {

const char *const kCorrectiveObservation =
    "Your response was not in the expected format. Reply with either "
    "\"Thought:\", \"Action:\" and \"Action Input:\" lines, or a \"Final Answer:\" line.";

namespace {

std::string_view ltrim(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

bool has_label(std::string_view line, std::string_view label) {
  return text::starts_with(ltrim(line), label);
}

std::string after_label(std::string_view line, std::string_view label) {
  return std::string(text::trim(ltrim(line).substr(label.size())));
}

std::string thought_of(const std::vector<std::string> &lines, std::size_t end) {
  std::string out;
  for (std::size_t i = 0; i < end; ++i) {
    std::string_view l = lines[i];
    if (has_label(l, "Thought:")) l = ltrim(l).substr(8);
    if (!out.empty()) out += "\n";
    out += l;
  }
  return std::string(text::trim(out));
}

}  // namespace

Parsed parse_model_output(std::string_view raw) {
  std::vector<std::string> lines = text::split(raw, '\n');
  for (auto &l : lines)
    if (!l.empty() && l.back() == '\r') l.pop_back();

  std::size_t action = lines.size(), final = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (action == lines.size() && has_label(lines[i], "Action:")) action = i;
    if (final == lines.size() && has_label(lines[i], "Final Answer:")) final = i;
  }
  if (action == lines.size() && final == lines.size())
    return ParseError{"no Action or Final Answer section"};

  if (final < action) {
    std::string answer = after_label(lines[final], "Final Answer:");
    for (std::size_t i = final + 1; i < lines.size(); ++i) answer += "\n" + lines[i];
    answer = std::string(text::trim(answer));
    if (answer.empty()) return ParseError{"empty Final Answer"};
    return Final{thought_of(lines, final), answer};
  }

  ThoughtAction ta;
  ta.thought = thought_of(lines, action);
  ta.action.tool = after_label(lines[action], "Action:");
  if (ta.action.tool.empty()) return ParseError{"empty Action"};
  for (std::size_t i = action + 1; i < lines.size(); ++i) {
    if (has_label(lines[i], "Action Input:")) {
      ta.action.input = after_label(lines[i], "Action Input:");
      return ta;
    }
  }
  return ParseError{"Action without Action Input"};
}

}  // namespace chemagent::agent
