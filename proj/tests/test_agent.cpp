// SPDX-License-Identifier: Apache-2.0
#include <random>

#include "chemagent/agent.hpp"
#include "chemagent/agent_json.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace chemagent;
using namespace chemagent::agent;

namespace {

const toolbox::ToolRegistry &reg() {
  static auto r = toolbox::default_registry(CHEMAGENT_DATA_DIR);
  return *r;
}

std::shared_ptr<const QuestionTemplates> templates() {
  static auto q = std::make_shared<const QuestionTemplates>(
      QuestionTemplates::load(test_util::data_path("questions.tsv")));
  return q;
}

PromptTemplate prompt(Strategy s = Strategy::domain, const std::string &model = "default") {
  return PromptTemplate::load(CHEMAGENT_PROMPTS_DIR, s, model);
}

AgentConfig scripted(std::vector<std::string> script) {
  AgentConfig c;
  c.prompt = prompt();
  c.backend.kind = BackendKind::scripted;
  c.backend.script = std::move(script);
  return c;
}

AgentConfig oracle(double flip = 0) {
  AgentConfig c;
  c.prompt = prompt();
  c.backend.kind = BackendKind::rule_oracle;
  c.backend.questions = templates();
  c.backend.flip_probability = flip;
  return c;
}

std::size_t occurrences(const std::string &hay, const std::string &needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("prompt rendering") {
  const auto p = render_prompt(prompt(), reg(), "What is the TPSA of C(CS)O", {});
  CHECK(p.size() > 200);
  const std::string tail = "Question: What is the TPSA of C(CS)O\nThought:";
  CHECK(p.compare(p.size() - tail.size(), tail.size(), tail) == 0);

  for (auto s : {Strategy::minimal, Strategy::domain}) {
    const auto text = render_prompt(prompt(s), reg(), "What is the TPSA of C(CS)O", {});
    for (const auto &t : reg().tools()) {
      CAPTURE(t.name);
      // tool names may not be substrings of one another, so a plain count is exact
      CHECK(occurrences(text, t.name) == 1);
      CHECK(text.find(t.name + ": " + t.description + "\n") != std::string::npos);
    }
  }
}

TEST_CASE("history is reproduced verbatim") {
  AgentStep s;
  s.thought = "need TPSA";
  s.action = {"calculate_tpsa", "C(CS)O"};
  s.observation = "20.23";
  const auto p = render_prompt(prompt(), reg(), "q", {s});
  const std::string block =
      "Thought: need TPSA\nAction: calculate_tpsa\nAction Input: C(CS)O\nObservation: 20.23\n";
  CHECK(p.find("Question: q\n" + block + "Thought:") != std::string::npos);
  CHECK(p.substr(p.size() - 8) == "Thought:");
}

TEST_CASE("strategies share the tool block and differ in preamble") {
  const auto a = render_prompt(prompt(Strategy::minimal), reg(), "q", {});
  const auto b = render_prompt(prompt(Strategy::domain), reg(), "q", {});
  CHECK(a != b);
  auto block = [](const std::string &p) {
    auto s = p.find("calculate_molwt: ");
    auto e = p.find("\n\n", s);
    return p.substr(s, e - s);
  };
  CHECK(block(a) == block(b));
  CHECK(prompt(Strategy::minimal).preamble != prompt(Strategy::domain).preamble);
  CHECK(prompt(Strategy::minimal).format_rules == prompt(Strategy::domain).format_rules);
}

TEST_CASE("model tokens wrap the prompt") {
  const auto g = prompt(Strategy::minimal, "gemma7b");
  CHECK(g.tokens.begin == "<start_of_turn>user\n");
  CHECK(g.tokens.end == "<end_of_turn>\n<start_of_turn>model\n");
  const auto p = render_prompt(g, reg(), "q", {});
  CHECK(p.rfind("<start_of_turn>user\n", 0) == 0);
  CHECK(p.find("Question: q\n<end_of_turn>\n<start_of_turn>model\nThought:") != std::string::npos);
  const auto unknown = prompt(Strategy::minimal, "some-new-model");
  CHECK(unknown.tokens.begin.empty());
  CHECK_FALSE(unknown.tokens.chat);
  CHECK(prompt(Strategy::minimal, "chat").tokens.chat);
  CHECK_THROWS(PromptTemplate::load("/nonexistent", Strategy::domain, "x"));
}

TEST_CASE("output parsing") {
  auto a = parse_model_output("Thought: need TPSA\nAction: calculate_tpsa\nAction Input: C(CS)O");
  REQUIRE(std::holds_alternative<ThoughtAction>(a));
  CHECK(std::get<ThoughtAction>(a).thought == "need TPSA");
  CHECK(std::get<ThoughtAction>(a).action.tool == "calculate_tpsa");
  CHECK(std::get<ThoughtAction>(a).action.input == "C(CS)O");

  auto f = parse_model_output("Final Answer: 20.23");
  REQUIRE(std::holds_alternative<Final>(f));
  CHECK(std::get<Final>(f).answer == "20.23");

  auto e = parse_model_output("I think the answer is 20.23");
  REQUIRE(std::holds_alternative<ParseError>(e));
  CHECK(std::get<ParseError>(e).reason.find("no Action or Final Answer") != std::string::npos);
}

TEST_CASE("output parsing details") {
  // the prompt ends with the Thought: cue, so replies usually start unlabelled
  auto a = parse_model_output(" I should compute it\nAction: calculate_qed\nAction Input:  CCCC=O \n");
  REQUIRE(std::holds_alternative<ThoughtAction>(a));
  CHECK(std::get<ThoughtAction>(a).thought == "I should compute it");
  CHECK(std::get<ThoughtAction>(a).action.input == "CCCC=O");

  auto multi = parse_model_output("Thought: done\nFinal Answer: Yes,\nit crosses\r\n");
  REQUIRE(std::holds_alternative<Final>(multi));
  CHECK(std::get<Final>(multi).answer == "Yes,\nit crosses");

  auto first_action = parse_model_output("Action: check_pains\nAction Input: CCO\nFinal Answer: True");
  CHECK(std::holds_alternative<ThoughtAction>(first_action));
  auto first_final = parse_model_output("Final Answer: True\nAction: check_pains\nAction Input: CCO");
  CHECK(std::holds_alternative<Final>(first_final));

  CHECK(std::holds_alternative<ParseError>(parse_model_output("Action: calculate_tpsa\n")));
  CHECK(std::holds_alternative<ParseError>(parse_model_output("Action:\nAction Input: C")));
  CHECK(std::holds_alternative<ParseError>(parse_model_output("Final Answer:   \n")));
  CHECK(std::holds_alternative<ParseError>(parse_model_output("final answer: 3")));  // case-sensitive
  CHECK(std::holds_alternative<ParseError>(parse_model_output("")));
}

TEST_CASE("stop sequences") {
  CHECK(apply_stop("Action: x\nAction Input: C\nObservation: 1", {"Observation:"}) ==
        "Action: x\nAction Input: C\n");
  CHECK(apply_stop("abc", {"Observation:"}) == "abc");
  CHECK(apply_stop("a STOP b END", {"END", "STOP"}) == "a ");
}

TEST_CASE("oracle answers the TPSA question in one step") {
  auto o = run("What is the TPSA of C(CS)O", oracle(), reg());
  CHECK(o.termination == Termination::answered);
  REQUIRE(o.final_answer);
  CHECK(*o.final_answer == "20.23");
  REQUIRE(o.steps.size() == 1);
  CHECK(o.steps[0].action.tool == "calculate_tpsa");
  CHECK(o.steps[0].action.input == "C(CS)O");
  CHECK(o.steps[0].observation == "20.23");
  CHECK(o.backend_calls == 2);
}

TEST_CASE("oracle picks the brenk tool") {
  auto b = make_backend(oracle().backend);
  const auto p = render_prompt(prompt(), reg(), "Does CCO pass the Brenk filter?", {});
  auto parsed = parse_model_output(b->complete(p));
  REQUIRE(std::holds_alternative<ThoughtAction>(parsed));
  CHECK(std::get<ThoughtAction>(parsed).action.tool == "check_brenk");
}

TEST_CASE("oracle declines questions it cannot read") {
  auto o = run("What is the boiling point of water?", oracle(), reg());
  CHECK(o.termination == Termination::answered);
  CHECK(o.steps.empty());
}

TEST_CASE("scripted backend") {
  auto b = make_backend(scripted({"A", "B"}).backend);
  CHECK(b->complete("x") == "A");
  CHECK(b->complete("x") == "B");
  CHECK_THROWS_AS(b->complete("x"), BackendError);
}

TEST_CASE("immediate final answer") {
  auto o = run("Does CCON=O pass the blood brain barrier?", scripted({"Final Answer: Yes"}), reg());
  CHECK(o.termination == Termination::answered);
  CHECK(o.steps.empty());
  CHECK(*o.final_answer == "Yes");
}

TEST_CASE("parse failure limit") {
  auto cfg = scripted({"blah", "still blah"});
  cfg.parse_retry_limit = 2;
  auto o = run("q", cfg, reg());
  CHECK(o.termination == Termination::parse_failure_limit);
  CHECK_FALSE(o.final_answer);
  CHECK(o.rejected_replies.size() == 2);
  CHECK(o.backend_calls == 2);
}

TEST_CASE("corrective observation is shown to the model") {
  struct Recorder : Backend {
    std::vector<std::string> prompts;
    std::vector<std::string> replies{"no labels here", "Final Answer: 1.00"};
    std::string complete(const std::string &p) override {
      prompts.push_back(p);
      return replies[prompts.size() - 1];
    }
  } rec;
  auto o = run("q", scripted({}), reg(), rec);
  CHECK(o.termination == Termination::answered);
  REQUIRE(rec.prompts.size() == 2);
  CHECK(rec.prompts[1].find("no labels here\nObservation: " + std::string(kCorrectiveObservation) +
                            "\nThought:") != std::string::npos);
}

TEST_CASE("max steps") {
  std::vector<std::string> loop(10, "Action: calculate_molwt\nAction Input: C");
  auto cfg = scripted(loop);
  cfg.max_steps = 3;
  auto o = run("q", cfg, reg());
  CHECK(o.termination == Termination::max_steps);
  CHECK(o.steps.size() == 3);
  CHECK(o.backend_calls == 3);
}

TEST_CASE("termination bound") {
  // random mix of junk and actions never exceeds max_steps + parse retries calls
  std::mt19937_64 rng(5);
  const std::vector<std::string> pool{"junk", "Action: calculate_sa\nAction Input: CCO",
                                      "Action: nope\nAction Input: C", "Final Answer: x"};
  for (int k = 0; k < 200; ++k) {
    std::vector<std::string> script;
    for (int i = 0; i < 20; ++i) script.push_back(pool[rng() % pool.size()]);
    auto cfg = scripted(script);
    cfg.max_steps = 1 + static_cast<int>(rng() % 5);
    cfg.parse_retry_limit = 1 + static_cast<int>(rng() % 3);
    auto o = run("q", cfg, reg());
    CHECK(o.backend_calls <= cfg.max_steps + cfg.parse_retry_limit);
    CHECK((o.termination == Termination::answered) == o.final_answer.has_value());
    for (const auto &s : o.steps)
      if (s.observation.rfind("unknown tool", 0) != 0) CHECK(reg().find(s.action.tool));
  }
}

TEST_CASE("tool errors become observations") {
  auto o = run("q",
               scripted({"Action: calculate_boiling\nAction Input: CCO",
                         "Action: calculate_tpsa\nAction Input: C1CC", "Final Answer: unsure"}),
               reg());
  CHECK(o.termination == Termination::answered);
  REQUIRE(o.steps.size() == 2);
  CHECK(o.steps[0].observation.rfind("unknown tool calculate_boiling; available: ", 0) == 0);
  CHECK(o.steps[1].observation.rfind("invalid SMILES: ", 0) == 0);
}

TEST_CASE("exhausted script is a backend error") {
  auto o = run("q", scripted({"Action: calculate_tpsa\nAction Input: CCO"}), reg());
  CHECK(o.termination == Termination::backend_error);
  CHECK(o.error == "script exhausted");
  CHECK(o.steps.size() == 1);
}

TEST_CASE("scripted runs are deterministic") {
  auto cfg = scripted({"Thought: t\nAction: calculate_qed\nAction Input: CCCC=O", "oops",
                       "Final Answer: 0.44"});
  auto a = outcome_json(run("What is the QED of CCCC=O?", cfg, reg())).dump();
  auto b = outcome_json(run("What is the QED of CCCC=O?", cfg, reg())).dump();
  CHECK(a == b);
  CHECK(a.find("\"rejected_replies\":[\"oops\"]") != std::string::npos);
}

TEST_CASE("history fidelity") {
  struct Recorder : Backend {
    std::vector<std::string> prompts;
    std::string complete(const std::string &p) override {
      prompts.push_back(p);
      if (prompts.size() < 4)
        return "Action: calculate_molwt\nAction Input: " + std::string(prompts.size(), 'C');
      return "Final Answer: done";
    }
  } rec;
  auto o = run("q", scripted({}), reg(), rec);
  REQUIRE(o.steps.size() == 3);
  for (std::size_t k = 0; k < rec.prompts.size(); ++k)
    for (std::size_t j = 0; j < k && j < o.steps.size(); ++j)
      CHECK(rec.prompts[k].find(serialize_step(o.steps[j])) != std::string::npos);
}

TEST_CASE("noisy oracle flips only qualitative answers") {
  auto cfg = oracle(1.0);
  CHECK(*run("Does CCON=O pass the blood brain barrier?", cfg, reg()).final_answer == "No");
  CHECK(*run("What is the GI absorption of C#C?", cfg, reg()).final_answer == "High");
  CHECK(*run("What is the TPSA of C(CS)O", cfg, reg()).final_answer == "20.23");
}

TEST_CASE("backend config validation") {
  BackendConfig http;
  http.kind = BackendKind::http;
  CHECK_THROWS_AS(http.validate(), std::invalid_argument);
  http.endpoint_url = "http://127.0.0.1:1";
  CHECK_THROWS_AS(http.validate(), std::invalid_argument);
  http.model_id = "m";
  CHECK_NOTHROW(http.validate());
  BackendConfig o;
  o.kind = BackendKind::rule_oracle;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  CHECK(parse_backend_kind("rule_oracle") == BackendKind::rule_oracle);
  CHECK_FALSE(parse_backend_kind("gpt"));
  CHECK(parse_strategy("Full") == Strategy::domain);
}

TEST_CASE("question templates") {
  auto q = templates();
  for (const auto &row : q->rows) {
    auto hit = q->recognise(row.render("C(CS)O"));
    REQUIRE(hit);
    CHECK(hit->first == row.tool);
    CHECK(hit->second == "C(CS)O");
  }
  CHECK_FALSE(q->recognise("What is love?"));
  CHECK(q->for_tool("check_pains").size() >= 1);
}
