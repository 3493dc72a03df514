// SPDX-License-Identifier: Apache-2.0
#include "chemagent/benchmark.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "chemagent/agent_json.hpp"
#include "chemagent/smiles.hpp"
#include "chemagent/text.hpp"

namespace chemagent::benchmark {

std::string_view set_label(SetName s) {
  switch (s) {
    case SetName::qualitative: return "Qualitative";
    case SetName::quantitative: return "Quantitative";
    case SetName::full: return "Full";
  }
  return "?";
}

std::optional<SetName> parse_set(std::string_view s) {
  std::string l(s);
  for (auto &c : l) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (l == "qualitative") return SetName::qualitative;
  if (l == "quantitative") return SetName::quantitative;
  if (l == "full" || l == "combined") return SetName::full;
  return std::nullopt;
}

std::string_view kind_name(Kind k) { return k == Kind::qualitative ? "qualitative" : "quantitative"; }

Kind kind_of(toolbox::OutputKind k) {
  return toolbox::is_quantitative(k) ? Kind::quantitative : Kind::qualitative;
}

std::string_view prompt_label(agent::Strategy s) {
  return s == agent::Strategy::minimal ? "Minimal" : "Full";
}

std::vector<std::string> load_molecules(const std::string &path) {
  std::vector<std::string> out;
  for (auto &row : text::read_tsv(text::read_file(path))) {
    auto s = text::trim(row[0]);
    auto hash = s.find('#');
    if (hash != std::string_view::npos) s = text::trim(s.substr(0, hash));
    if (!s.empty()) out.emplace_back(s);
  }
  return out;
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

BenchmarkSet generate(SetName set, const std::vector<std::string> &molecules, std::uint64_t seed,
                      const toolbox::ToolRegistry &registry,
                      const agent::QuestionTemplates &templates, const GenerateOptions &opt) {
  // distinct molecules that parse
  std::vector<std::string> usable;
  std::set<std::string> seen;
  for (const auto &s : molecules) {
    if (!seen.insert(s).second) continue;
    try {
      molkit::parse_smiles(s);
    } catch (const std::exception &e) {
      spdlog::warn("benchmark: skipping molecule {}: {}", s, e.what());
      continue;
    }
    usable.push_back(s);
  }
  if (usable.size() < opt.min_molecules)
    throw std::runtime_error(fmt::format("benchmark needs at least {} usable molecules, got {}",
                                         opt.min_molecules, usable.size()));

  BenchmarkSet out;
  out.name = set;
  for (const auto &tool : registry.tools()) {
    const Kind k = kind_of(tool.kind);
    if (set == SetName::qualitative && k != Kind::qualitative) continue;
    if (set == SetName::quantitative && k != Kind::quantitative) continue;
    const auto phrasings = templates.for_tool(tool.name);
    if (phrasings.empty()) throw std::runtime_error("no question template for " + tool.name);

    const std::uint64_t h = fnv1a(tool.name);
    std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    std::mt19937_64 rng(sseq);
    std::uniform_int_distribution<std::size_t> pick_mol(0, usable.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_phrase(0, phrasings.size() - 1);
    int made = 0, failures = 0;
    while (made < opt.per_tool) {
      const std::string &smiles = usable[pick_mol(rng)];
      const auto *phrase = phrasings[pick_phrase(rng)];
      auto gold = registry.invoke(tool.name, smiles);
      if (!gold.ok) {
        spdlog::warn("benchmark: {} fails on {}: {}", tool.name, smiles, gold.text);
        if (++failures > 10 * opt.per_tool) throw std::runtime_error("too many failing molecules");
        continue;
      }
      ++made;
      out.questions.push_back({fmt::format("{}-{:03d}", tool.name, made), tool.name, smiles,
                               phrase->render(smiles), gold.text, k});
    }
  }
  return out;
}

// ---- scoring ----

namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Case-insensitive whole-word search.
std::size_t find_word(std::string_view hay, std::string_view word) {
  if (word.empty()) return std::string_view::npos;
  for (std::size_t i = 0; i + word.size() <= hay.size(); ++i) {
    bool eq = true;
    for (std::size_t k = 0; k < word.size() && eq; ++k)
      eq = std::tolower(static_cast<unsigned char>(hay[i + k])) ==
           std::tolower(static_cast<unsigned char>(word[k]));
    if (!eq) continue;
    if (i > 0 && word_char(hay[i - 1])) continue;
    if (i + word.size() < hay.size() && word_char(hay[i + word.size()])) continue;
    return i;
  }
  return std::string_view::npos;
}

std::optional<std::string> complement_word(std::string_view gold) {
  static const std::pair<const char *, const char *> pairs[] = {
      {"yes", "no"}, {"high", "low"}, {"true", "false"}};
  std::string g(gold);
  for (auto &c : g) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto [a, b] : pairs) {
    if (g == a) return std::string(b);
    if (g == b) return std::string(a);
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> first_number(std::string_view t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::size_t start = i;
    if ((t[i] == '-' || t[i] == '+') && i + 1 < t.size() &&
        std::isdigit(static_cast<unsigned char>(t[i + 1])))
      ++i;
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) continue;
    std::size_t j = i;
    while (j < t.size() && std::isdigit(static_cast<unsigned char>(t[j]))) ++j;
    if (j + 1 < t.size() && t[j] == '.' && std::isdigit(static_cast<unsigned char>(t[j + 1]))) {
      ++j;
      while (j < t.size() && std::isdigit(static_cast<unsigned char>(t[j]))) ++j;
    }
    const bool left_ok = start == 0 || (!word_char(t[start - 1]) && t[start - 1] != '.');
    const bool right_ok = j == t.size() || !word_char(t[j]);
    if (left_ok && right_ok) return std::stod(std::string(t.substr(start, j - start)));
    i = j;  // skip the rest of this run of digits
  }
  return std::nullopt;
}

bool score_answer(const std::optional<std::string> &answer, const std::string &gold, Kind kind) {
  if (!answer) return false;
  if (kind == Kind::quantitative) {
    auto x = first_number(*answer);
    return x && toolbox::format_2dp(*x) == gold;
  }
  const auto at = find_word(*answer, gold);
  if (at == std::string_view::npos) return false;
  if (auto c = complement_word(gold)) {
    const auto bad = find_word(*answer, *c);
    if (bad != std::string_view::npos && bad < at) return false;
  }
  return true;
}

// ---- running ----

BenchmarkRun run_benchmark(const BenchmarkSet &set, const agent::AgentConfig &cfg,
                           const toolbox::ToolRegistry &registry, int parallelism,
                           const Labels &labels) {
  cfg.backend.validate();
  BenchmarkRun out;
  const std::size_t n = set.questions.size();
  out.results.resize(n);
  const auto t0 = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto &q = set.questions[i];
      auto &r = out.results[i];
      r.question = q;
      r.outcome = agent::run(q.question, cfg, registry);
      r.correct = score_answer(r.outcome.final_answer, q.gold, q.kind);
    }
  };
  const int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  const double minutes =
      std::chrono::duration<double, std::ratio<60>>(std::chrono::steady_clock::now() - t0).count();

  int correct = 0;
  std::vector<std::string> order;
  std::map<std::string, ToolAccuracy> by_tool;
  for (const auto &r : out.results) {
    auto [it, fresh] = by_tool.try_emplace(r.question.tool, ToolAccuracy{r.question.tool});
    if (fresh) order.push_back(r.question.tool);
    ++it->second.asked;
    it->second.correct += r.correct;
    correct += r.correct;
    switch (r.outcome.termination) {
      case agent::Termination::answered: ++out.diagnostics.answered; break;
      case agent::Termination::max_steps: ++out.diagnostics.max_steps; break;
      case agent::Termination::parse_failure_limit: ++out.diagnostics.parse_failure_limit; break;
      case agent::Termination::backend_error: ++out.diagnostics.backend_errors; break;
    }
  }
  for (const auto &t : order) out.per_tool.push_back(by_tool[t]);

  out.summary.model = labels.model;
  out.summary.node = labels.node;
  out.summary.question_set = std::string(set_label(set.name));
  out.summary.prompt = std::string(prompt_label(cfg.prompt.strategy));
  out.summary.time_minutes = std::max(minutes, 1e-5);
  out.summary.accuracy = n ? 100.0 * correct / static_cast<double>(n) : 0.0;
  return out;
}

// ---- reports ----

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> parse_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// half-up like the tool output, not fmt's half-even
static std::string format_1dp(double x) {
  return fmt::format("{:.1f}", std::floor(x * 10 + 0.5 + 1e-7) / 10);
}

std::string SummaryRow::to_csv() const {
  const double t = std::round(time_minutes * 1e5) / 1e5;
  return fmt::format("{},{},{},{},{},{}", csv_field(model), csv_field(node),
                     csv_field(question_set), csv_field(prompt), t, format_1dp(accuracy));
}

SummaryRow SummaryRow::parse_csv(std::string_view line) {
  auto f = parse_csv_line(text::trim(line));
  if (f.size() != 6) throw std::runtime_error("summary row needs 6 fields, got " + std::to_string(f.size()));
  SummaryRow r;
  r.model = std::string(text::trim(f[0]));
  r.node = std::string(text::trim(f[1]));
  r.question_set = std::string(text::trim(f[2]));
  r.prompt = std::string(text::trim(f[3]));
  r.time_minutes = text::to_double(f[4]);
  r.accuracy = text::to_double(f[5]);
  if (!parse_set(r.question_set)) throw std::runtime_error("unknown question set " + r.question_set);
  if (r.prompt != "Full" && r.prompt != "Minimal") throw std::runtime_error("unknown prompt " + r.prompt);
  if (r.accuracy < 0 || r.accuracy > 100) throw std::runtime_error("accuracy out of range");
  if (!(r.time_minutes > 0)) throw std::runtime_error("time must be positive");
  return r;
}

std::string questions_csv(const std::vector<QuestionRecord> &qs) {
  std::string out = "id,tool,smiles,question,gold,kind\n";
  for (const auto &q : qs)
    out += fmt::format("{},{},{},{},{},{}\n", csv_field(q.id), csv_field(q.tool), csv_field(q.smiles),
                       csv_field(q.question), csv_field(q.gold), kind_name(q.kind));
  return out;
}

namespace {

void write_file(const std::filesystem::path &p, const std::string &content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
  if (!f) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

void write_reports(const BenchmarkRun &run, const std::string &dir) {
  std::filesystem::path d(dir);
  std::error_code ec;
  std::filesystem::create_directories(d, ec);
  if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());

  std::string summary = std::string(SummaryRow::header()) + "\n";
  if (!run.results.empty()) summary += run.summary.to_csv() + "\n";
  write_file(d / "summary.csv", summary);

  std::string per_tool = "tool,asked,correct,accuracy\n";
  for (const auto &t : run.per_tool)
    per_tool += fmt::format("{},{},{},{}\n", t.tool, t.asked, t.correct, format_1dp(t.accuracy()));
  write_file(d / "per_tool.csv", per_tool);

  std::string lines;
  std::vector<QuestionRecord> qs;
  for (const auto &r : run.results) {
    nlohmann::ordered_json j;
    j["id"] = r.question.id;
    j["gold"] = r.question.gold;
    j["correct"] = r.correct;
    const auto o = agent::outcome_json(r.outcome);
    for (auto &[k, v] : o.items()) j[k] = v;
    lines += j.dump() + "\n";
    qs.push_back(r.question);
  }
  write_file(d / "transcripts.jsonl", lines);
  write_file(d / "questions.csv", questions_csv(qs));
}

}  // namespace chemagent::benchmark
