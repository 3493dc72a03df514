// SPDX-License-Identifier: Apache-2.0
#include <random>
#include <set>

#include "chemagent/toolbox.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace chemagent::toolbox;

namespace {

const ToolRegistry &reg() {
  static auto r = default_registry(CHEMAGENT_DATA_DIR);
  return *r;
}

}  // namespace

TEST_CASE("default registry") {
  CHECK(reg().size() == 10);
  const char *names[] = {"calculate_molwt",    "calculate_logp",      "calculate_tpsa",
                         "calculate_qed",      "calculate_sa",        "check_bbb_permeant",
                         "check_gi_absorption", "check_druglikeness", "check_brenk",
                         "check_pains"};
  for (std::size_t i = 0; i < 10; ++i) CHECK(reg().tools()[i].name == names[i]);
  std::set<OutputKind> kinds;
  int quantitative = 0;
  for (const auto &t : reg().tools()) {
    CHECK_FALSE(t.description.empty());
    CHECK(t.description.find("SMILES") != std::string::npos);
    kinds.insert(t.kind);
    quantitative += is_quantitative(t.kind);
  }
  CHECK(kinds.size() == 4);
  CHECK(quantitative == 5);
  CHECK(reg().find("calculate_tpsa") != nullptr);
  CHECK(reg().find("nope") == nullptr);
}

TEST_CASE("duplicate names are rejected") {
  auto tools = reg().tools();
  tools.push_back(tools.front());
  CHECK_THROWS(ToolRegistry(nullptr, tools));
}

TEST_CASE("half-up formatting") {
  CHECK(format_2dp(20.23) == "20.23");
  CHECK(format_2dp(0.444345) == "0.44");
  CHECK(format_2dp(0.125) == "0.13");
  CHECK(format_2dp(2.675) == "2.68");  // 2.67499999... in binary
  CHECK(format_2dp(1.005) == "1.01");
  CHECK(format_2dp(-0.0915) == "-0.09");
  CHECK(format_2dp(-0.001) == "0.00");
  CHECK(format_2dp(0) == "0.00");
  CHECK(format_2dp(17.0353) == "17.04");
}

TEST_CASE("ground-truth answers") {
  CHECK(reg().invoke("calculate_tpsa", "C(CS)O").text == "20.23");
  CHECK(reg().invoke("calculate_qed", "CCCC=O").text == "0.44");
  CHECK(reg().invoke("check_bbb_permeant", "CCON=O").text == "Yes");
  CHECK(reg().invoke("check_gi_absorption", "C#C").text == "Low");
}

TEST_CASE("formats per kind") {
  CHECK(reg().invoke("calculate_molwt", "O").text == "18.02");
  CHECK(reg().invoke("calculate_logp", "C").text == "0.64");
  CHECK(reg().invoke("check_druglikeness", "CC(=O)Oc1ccccc1C(=O)O").text == "True");
  CHECK(reg().invoke("check_brenk", "CCO").text == "True");
  CHECK(reg().invoke("check_pains", "C1(=C)C(=O)NCNC1=O").text == "False");
  auto sa = reg().invoke("calculate_sa", "CCO");
  CHECK(sa.ok);
  CHECK(std::get<double>(sa.raw) >= 1.0);
}

TEST_CASE("inputs are trimmed and unquoted") {
  CHECK(reg().invoke("calculate_tpsa", "  C(CS)O \n").text == "20.23");
  CHECK(reg().invoke("calculate_tpsa", "\"C(CS)O\"").text == "20.23");
  CHECK(reg().invoke("calculate_tpsa", "`C(CS)O`").text == "20.23");
  CHECK(reg().invoke(" calculate_tpsa ", "C(CS)O").text == "20.23");
}

TEST_CASE("errors are observations") {
  auto bad = reg().invoke("calculate_qed", "not-a-smiles");
  CHECK_FALSE(bad.ok);
  CHECK(bad.text.rfind("invalid SMILES: ", 0) == 0);
  CHECK(std::holds_alternative<std::monostate>(bad.raw));
  auto unknown = reg().invoke("calculate_boiling_point", "CCO");
  CHECK_FALSE(unknown.ok);
  CHECK(unknown.text.rfind("unknown tool calculate_boiling_point; available: calculate_molwt, ", 0) ==
        0);
  CHECK(unknown.text.find("check_pains") != std::string::npos);
  CHECK(reg().invoke("calculate_molwt", "").text.rfind("invalid SMILES: ", 0) == 0);
}

TEST_CASE("invoke never throws on random bytes") {
  std::mt19937_64 rng(3);
  const std::string alphabet = "CNOSPFIclnosbr[]()=#-+:123%@/\\.H0 *\"'`";
  std::uniform_int_distribution<int> len(0, 24), any(0, 255),
      pick(0, static_cast<int>(alphabet.size()) - 1);
  for (int k = 0; k < 20000; ++k) {
    std::string s;
    int n = len(rng);
    for (int i = 0; i < n; ++i)
      s += k % 2 ? static_cast<char>(any(rng)) : alphabet[pick(rng)];
    const auto &tool = reg().tools()[k % 10].name;
    CHECK_NOTHROW(reg().invoke(tool, s));
  }
}

TEST_CASE("determinism over the corpus") {
  for (const auto &s : test_util::corpus()) {
    for (const auto &t : reg().tools()) {
      auto a = reg().invoke(t.name, s), b = reg().invoke(t.name, s);
      CHECK(a.ok);
      CHECK(a.text == b.text);
    }
  }
}

TEST_CASE("tool reference page matches the registry") {
  const auto doc = chemagent::text::read_file(std::string(CHEMAGENT_DATA_DIR) + "/../docs/tools.md");
  int rows = 0;
  for (const auto &line : chemagent::text::split(doc, '\n'))
    rows += chemagent::text::starts_with(line, "| `") && line.find("` | ") != std::string::npos &&
            line.find("(\"") == std::string::npos;
  CHECK(rows == static_cast<int>(reg().size()));
  for (const auto &t : reg().tools()) {
    CAPTURE(t.name);
    const std::string row = "| `" + t.name + "` | " + t.label + " | " + std::string(kind_name(t.kind)) + " |";
    CHECK(doc.find(row) != std::string::npos);
  }
}
