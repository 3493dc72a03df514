// SPDX-License-Identifier: Apache-2.0
#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>
#include <algorithm>
#include <map>
#include <thread>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "chemagent/agent_json.hpp"
#include "chemagent/app.hpp"
#include "chemagent/benchmark.hpp"
#include "chemagent/text.hpp"

namespace chemagent::app {

namespace {

void setup_logging(const std::string &level) {
  static const bool once = [] {
    auto logger = spdlog::stderr_color_mt("chemagent");
    spdlog::set_default_logger(logger);
    return true;
  }();
  (void)once;
  spdlog::set_level(spdlog::level::from_str(level));
}

void print_step(std::ostream &out, const agent::AgentStep &s) {
  if (!s.thought.empty()) out << "Thought: " << s.thought << "\n";
  out << "Action: " << s.action.tool << "\n"
      << "Action Input: " << s.action.input << "\n"
      << "Observation: " << s.observation << "\n";
}

int report_outcome(std::ostream &err, const agent::AgentOutcome &o) {
  if (o.termination == agent::Termination::answered) return 0;
  err << "error: no answer (" << agent::termination_name(o.termination) << ")";
  if (!o.error.empty()) err << ": " << o.error;
  err << "\n";
  return 1;
}

// Serves until SIGINT or SIGTERM; stop() lets in-flight requests drain.
void serve_until_signal(Service &svc) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  sigset_t old;
  pthread_sigmask(SIG_BLOCK, &set, &old);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    spdlog::info("signal {}; draining", sig);
    svc.stop();
  });
  svc.listen();
  pthread_kill(waiter.native_handle(), SIGTERM);  // no-op wake if it already fired
  waiter.join();
  pthread_sigmask(SIG_SETMASK, &old, nullptr);
}

}  // namespace

int run_cli(const std::vector<std::string> &args, Io io, const EnvLookup &env) {
  CLI::App cli{"Chemistry tool agent: descriptors, ReAct question answering and benchmarks",
               "chemagent"};
  cli.require_subcommand(1);
  cli.failure_message(CLI::FailureMessage::help);

  // settings given as flags; only those actually passed take part in layering
  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<CLI::Option *, std::string>> setting_opts;
  auto setting = [&](const std::string &flag, const std::string &key) {
    const auto &keys = setting_keys();
    auto it = std::find_if(keys.begin(), keys.end(), [&](const SettingKey &k) { return key == k.key; });
    auto *opt = cli.add_option(flag, flag_values[key], it->help);
    setting_opts.emplace_back(opt, key);
    return opt;
  };
  setting("--config", "config");
  setting("--data-dir", "data_dir");
  setting("--prompts-dir", "prompts_dir");
  setting("--backend", "backend");
  setting("--endpoint", "endpoint");
  setting("--model", "model");
  setting("--prompt", "prompt");
  setting("--max-steps", "max_steps");
  setting("--parse-retry-limit", "parse_retry_limit");
  setting("--temperature", "temperature");
  setting("--max-tokens", "max_tokens");
  setting("--timeout-ms", "timeout_ms");
  setting("--retries", "retries");
  setting("--chat-mode", "chat");
  setting("--script-file", "script_file");
  setting("--flip-probability", "flip_probability");
  setting("--noise-seed", "noise_seed");
  setting("--log-level", "log_level");

  auto *describe_cmd = cli.add_subcommand("describe", "run all ten tools on a SMILES");
  std::string smiles;
  bool json_out = false;
  describe_cmd->add_option("smiles", smiles, "molecule")->required();
  describe_cmd->add_flag("--json", json_out, "print the service's JSON body");
  describe_cmd->fallthrough();

  auto *ask_cmd = cli.add_subcommand("ask", "answer one question with the agent");
  std::string question;
  bool trace = false;
  ask_cmd->add_option("question", question, "question text")->required();
  ask_cmd->add_flag("--json", json_out, "print the response as JSON");
  ask_cmd->add_flag("--trace", trace, "print each Thought/Action/Observation step");
  ask_cmd->fallthrough();

  auto *chat_cmd = cli.add_subcommand("chat", "interactive question loop; 'quit' to leave");
  chat_cmd->fallthrough();

  auto *bench_cmd = cli.add_subcommand("bench", "generate a question set and score the agent on it");
  std::string set_name = "full", model_label, node_label = "local", out_dir, molecules_path;
  std::uint64_t seed = 1;
  int parallel = 1, per_tool = 100;
  bench_cmd->add_option("--set", set_name, "question set")
      ->check(CLI::IsMember({"qualitative", "quantitative", "full"}))
      ->capture_default_str();
  bench_cmd->add_option("--seed", seed, "generation seed")->capture_default_str();
  bench_cmd->add_option("--parallel", parallel, "worker threads")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  bench_cmd->add_option("--model-label", model_label, "Model column (default: the model id)");
  bench_cmd->add_option("--node-label", node_label, "Node column")->capture_default_str();
  bench_cmd->add_option("--out", out_dir, "write summary.csv, per_tool.csv, transcripts.jsonl, questions.csv here");
  bench_cmd->add_option("--molecules", molecules_path, "SMILES list (default: <data_dir>/molecules.txt)");
  bench_cmd->add_option("--per-tool", per_tool, "questions per tool")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  bench_cmd->fallthrough();

  auto *serve_cmd = cli.add_subcommand("serve", "HTTP service with a server-sent event stream");
  setting("--listen", "listen");
  setting("--threads", "threads");
  serve_cmd->fallthrough();

  auto *tools_cmd = cli.add_subcommand("tools", "list the tools");
  tools_cmd->fallthrough();

  auto *config_cmd = cli.add_subcommand("config", "print the effective settings and where each came from");
  config_cmd->fallthrough();

  std::vector<const char *> argv{"chemagent"};
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    cli.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    return cli.exit(e, io.out, io.err);
  }

  std::map<std::string, std::string> flags;
  for (auto &[opt, key] : setting_opts)
    if (opt->count()) flags[key] = flag_values[key];

  AppConfig cfg;
  Settings settings;
  try {
    settings = layer_settings(flags, env);
    cfg = resolve(settings);
  } catch (const ConfigError &e) {
    io.err << "error: " << e.what() << "\n";
    return 2;
  }
  setup_logging(cfg.log_level);

  if (*config_cmd) {
    for (const auto &k : setting_keys()) {
      auto v = settings.get(k.key);
      if (!v) continue;
      std::string shown = std::string_view(k.key) == "api_key" ? "***" : *v;
      io.out << k.key << " = " << shown << "  # " << source_name(settings.sources.at(k.key)) << "\n";
    }
    io.out << "backend resolved to " << agent::backend_kind_name(cfg.backend.kind) << "\n";
    return 0;
  }

  std::shared_ptr<const Runtime> rt;
  try {
    rt = Runtime::load(cfg);
  } catch (const std::exception &e) {
    io.err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*tools_cmd) {
      for (const auto &t : rt->registry->tools()) io.out << t.name << ": " << t.description << "\n";
      return 0;
    }

    if (*describe_cmd) {
      std::string errmsg;
      auto rows = describe(*rt->registry, smiles, &errmsg);
      if (!rows) {
        io.err << "error: " << errmsg << "\n";
        return 1;
      }
      if (json_out) {
        nlohmann::ordered_json j;
        for (const auto &r : *rows) j[r.tool] = r.text;
        io.out << j.dump(2) << "\n";
      } else {
        for (std::size_t i = 0; i < rows->size(); ++i)
          io.out << rt->registry->tools()[i].label << ": " << (*rows)[i].text << "\n";
      }
      return 0;
    }

    if (*ask_cmd) {
      agent::StepObserver obs;
      if (trace && !json_out) obs = [&](const agent::AgentStep &s) { print_step(io.out, s); };
      auto o = agent::run(question, rt->agent_config(cfg.prompt_strategy), *rt->registry, obs);
      if (json_out)
        io.out << agent::ask_response_json(o).dump(2) << "\n";
      else if (o.final_answer)
        io.out << (trace ? "Final Answer: " : "") << *o.final_answer << "\n";
      return report_outcome(io.err, o);
    }

    if (*chat_cmd) {
      auto strategy = cfg.prompt_strategy;
      io.out << "Ask about a molecule by SMILES. '/prompt minimal|domain' switches prompts, 'quit' exits.\n";
      std::string line;
      while (true) {
        io.out << "> " << std::flush;
        if (!std::getline(io.in, line)) break;
        std::string q(text::trim(line));
        if (q.empty()) continue;
        if (q == "quit" || q == "exit") break;
        if (text::starts_with(q, "/prompt")) {
          auto s = agent::parse_strategy(text::trim(std::string_view(q).substr(7)));
          if (s) {
            strategy = *s;
            io.out << "prompt: " << agent::strategy_name(strategy) << "\n";
          } else {
            io.err << "usage: /prompt minimal|domain\n";
          }
          continue;
        }
        auto o = agent::run(q, rt->agent_config(strategy), *rt->registry,
                            [&](const agent::AgentStep &s) {
                              io.out << "  [" << s.action.tool << "] " << s.action.input << " -> "
                                     << s.observation << "\n";
                            });
        if (o.final_answer) io.out << *o.final_answer << "\n";
        report_outcome(io.err, o);
      }
      return 0;
    }

    if (*bench_cmd) {
      auto set = benchmark::parse_set(set_name);
      auto mols = benchmark::load_molecules(molecules_path.empty() ? cfg.data_dir + "/molecules.txt"
                                                                   : molecules_path);
      benchmark::GenerateOptions gopt;
      gopt.per_tool = per_tool;
      auto qs = benchmark::generate(*set, mols, seed, *rt->registry, *rt->questions, gopt);
      benchmark::Labels labels;
      labels.model = !model_label.empty() ? model_label
                     : cfg.backend.kind == agent::BackendKind::http
                         ? cfg.backend.model_id
                         : std::string(agent::backend_kind_name(cfg.backend.kind));
      labels.node = node_label;
      auto run = benchmark::run_benchmark(qs, rt->agent_config(cfg.prompt_strategy), *rt->registry,
                                          parallel, labels);
      if (!out_dir.empty()) benchmark::write_reports(run, out_dir);
      io.out << benchmark::SummaryRow::header() << "\n" << run.summary.to_csv() << "\n";
      const auto &d = run.diagnostics;
      io.err << fmt::format("{} questions: {} answered, {} hit max_steps, {} parse failures, {} backend errors\n",
                            run.results.size(), d.answered, d.max_steps, d.parse_failure_limit,
                            d.backend_errors);
      return 0;
    }

    if (*serve_cmd) {
      Service svc(rt);
      const int port = svc.bind(cfg.listen_address);
      io.out << "listening on " << cfg.listen_address.substr(0, cfg.listen_address.rfind(':')) << ":"
             << port << std::endl;
      serve_until_signal(svc);
      return 0;
    }
  } catch (const std::exception &e) {
    io.err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace chemagent::app
