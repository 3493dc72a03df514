// SPDX-License-Identifier: Apache-2.0
#include <spdlog/spdlog.h>

#include "chemagent/agent.hpp"

namespace chemagent::agent {

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::answered: return "answered";
    case Termination::max_steps: return "max_steps";
    case Termination::parse_failure_limit: return "parse_failure_limit";
    case Termination::backend_error: return "backend_error";
  }
  return "?";
}

AgentOutcome run(std::string_view question, const AgentConfig &cfg,
                 const toolbox::ToolRegistry &registry, const StepObserver &on_step) {
  auto backend = make_backend(cfg.backend);
  return run(question, cfg, registry, *backend, on_step);
}

AgentOutcome run(std::string_view question, const AgentConfig &cfg,
                 const toolbox::ToolRegistry &registry, Backend &backend,
                 const StepObserver &on_step) {
  if (cfg.max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();
  AgentOutcome out;
  out.question = std::string(question);
  std::vector<AgentStep> history;
  int parse_failures = 0;
  int productive = 0;  // calls that parsed: tool steps plus the final answer

  auto finish = [&](Termination t) {
    out.termination = t;
    out.wall_time = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - t0);
    return out;
  };

  while (productive < cfg.max_steps) {
    const std::string prompt = render_prompt(cfg.prompt, registry, question, history);
    std::string reply;
    try {
      ++out.backend_calls;
      reply = apply_stop(backend.complete(prompt), cfg.backend.stop_sequences);
    } catch (const BackendError &e) {
      out.error = e.what();
      out.error_kind = e.kind;
      spdlog::debug("backend error: {}", e.what());
      return finish(Termination::backend_error);
    }

    Parsed parsed = parse_model_output(reply);
    if (auto *f = std::get_if<Final>(&parsed)) {
      out.final_answer = f->answer;
      return finish(Termination::answered);
    }
    if (auto *ta = std::get_if<ThoughtAction>(&parsed)) {
      ++productive;
      AgentStep step;
      step.thought = ta->thought;
      step.action = ta->action;
      step.raw = reply;
      step.observation = registry.invoke(ta->action.tool, ta->action.input).text;
      history.push_back(step);
      out.steps.push_back(step);
      if (on_step) on_step(step);
      continue;
    }
    const auto &pe = std::get<ParseError>(parsed);
    spdlog::debug("unparseable reply ({}): {}", pe.reason, reply);
    out.rejected_replies.push_back(reply);
    if (++parse_failures >= cfg.parse_retry_limit) return finish(Termination::parse_failure_limit);
    AgentStep fix;
    fix.format_error = true;
    fix.raw = reply;
    fix.observation = kCorrectiveObservation;
    history.push_back(fix);
  }
  return finish(Termination::max_steps);
}

}  // namespace chemagent::agent
