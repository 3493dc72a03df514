// SPDX-License-Identifier: Apache-2.0
#include "chemagent/agent_json.hpp"

namespace chemagent::agent {

using nlohmann::ordered_json;

ordered_json step_json(const AgentStep &s) {
  return {{"thought", s.thought},
          {"tool", s.action.tool},
          {"input", s.action.input},
          {"observation", s.observation}};
}

namespace {

ordered_json steps_json(const AgentOutcome &o) {
  ordered_json a = ordered_json::array();
  for (const auto &s : o.steps) a.push_back(step_json(s));
  return a;
}

}  // namespace

ordered_json outcome_json(const AgentOutcome &o) {
  ordered_json j;
  j["question"] = o.question;
  j["final_answer"] = o.final_answer ? ordered_json(*o.final_answer) : ordered_json(nullptr);
  j["termination"] = termination_name(o.termination);
  j["steps"] = steps_json(o);
  j["rejected_replies"] = o.rejected_replies;
  j["backend_calls"] = o.backend_calls;
  if (!o.error.empty()) j["error"] = o.error;
  return j;
}

ordered_json ask_response_json(const AgentOutcome &o) {
  ordered_json j;
  j["answer"] = o.final_answer.value_or("");
  j["steps"] = steps_json(o);
  j["timing_ms"] = static_cast<double>(o.wall_time.count()) / 1000.0;
  j["termination"] = termination_name(o.termination);
  if (!o.error.empty()) j["error"] = o.error;
  return j;
}

}  // namespace chemagent::agent
