// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include "chemagent/agent.hpp"

namespace chemagent::agent {

// {thought, tool, input, observation}
nlohmann::ordered_json step_json(const AgentStep &s);

// Transcript line. No timing, so reruns with a deterministic backend are byte-identical.
nlohmann::ordered_json outcome_json(const AgentOutcome &o);

// Service response: {answer, steps, timing_ms, termination[, error]}
nlohmann::ordered_json ask_response_json(const AgentOutcome &o);

}  // namespace chemagent::agent
