// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chemagent/agent.hpp"

namespace chemagent::benchmark {

enum class SetName { qualitative, quantitative, full };
enum class Kind { qualitative, quantitative };

std::string_view set_label(SetName s);  // Qualitative / Quantitative / Full
std::optional<SetName> parse_set(std::string_view s);
std::string_view kind_name(Kind k);
Kind kind_of(toolbox::OutputKind k);
// Summary-table prompt label: minimal -> Minimal, domain -> Full.
std::string_view prompt_label(agent::Strategy s);

struct QuestionRecord {
  std::string id;  // <tool>-NNN
  std::string tool;
  std::string smiles;
  std::string question;
  std::string gold;
  Kind kind = Kind::quantitative;
};

struct BenchmarkSet {
  SetName name = SetName::full;
  std::vector<QuestionRecord> questions;
};

struct GenerateOptions {
  int per_tool = 100;
  std::size_t min_molecules = 20;  // distinct usable molecules required
};

// SMILES per line, '#' comments, blank lines ignored.
std::vector<std::string> load_molecules(const std::string &path);

// Questions for each tool of the set in registry order. Each tool draws from its own
// generator seeded by (seed, tool), so the qualitative and quantitative sets are
// exactly the two halves of the full set for the same seed.
BenchmarkSet generate(SetName set, const std::vector<std::string> &molecules, std::uint64_t seed,
                      const toolbox::ToolRegistry &registry,
                      const agent::QuestionTemplates &templates, const GenerateOptions &opt = {});

bool score_answer(const std::optional<std::string> &answer, const std::string &gold, Kind kind);

// First free-standing number in the text (not part of a word such as a SMILES ring digit).
std::optional<double> first_number(std::string_view text);

struct QuestionResult {
  QuestionRecord question;
  agent::AgentOutcome outcome;
  bool correct = false;
};

struct SummaryRow {
  std::string model;
  std::string node;
  std::string question_set;
  std::string prompt;
  double time_minutes = 0;
  double accuracy = 0;  // percent

  static const char *header() { return "Model,Node,QuestionSet,Prompt,Time,Accuracy"; }
  std::string to_csv() const;
  static SummaryRow parse_csv(std::string_view line);
};

struct ToolAccuracy {
  std::string tool;
  int asked = 0;
  int correct = 0;
  double accuracy() const { return asked ? 100.0 * correct / asked : 0.0; }
};

struct Diagnostics {
  int answered = 0;
  int max_steps = 0;
  int parse_failure_limit = 0;
  int backend_errors = 0;
};

struct Labels {
  std::string model = "unknown";
  std::string node = "local";
};

struct BenchmarkRun {
  std::vector<QuestionResult> results;
  SummaryRow summary;
  std::vector<ToolAccuracy> per_tool;
  Diagnostics diagnostics;
};

// Runs every question through the agent loop with `parallelism` workers.
BenchmarkRun run_benchmark(const BenchmarkSet &set, const agent::AgentConfig &cfg,
                           const toolbox::ToolRegistry &registry, int parallelism,
                           const Labels &labels);

// Writes summary.csv, per_tool.csv, transcripts.jsonl and questions.csv into dir.
void write_reports(const BenchmarkRun &run, const std::string &dir);
std::string questions_csv(const std::vector<QuestionRecord> &qs);

std::string csv_field(std::string_view s);
std::vector<std::string> parse_csv_line(std::string_view line);

}  // namespace chemagent::benchmark
