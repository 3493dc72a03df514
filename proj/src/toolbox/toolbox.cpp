// SPDX-License-Identifier: Apache-2.0
#include "chemagent/toolbox.hpp"

#include <fmt/format.h>

#include <cmath>
#include <set>

#include "chemagent/smiles.hpp"
#include "chemagent/text.hpp"

namespace chemagent::toolbox {

namespace d = chemagent::descriptors;
using molkit::Molecule;

std::string_view kind_name(OutputKind k) {
  switch (k) {
    case OutputKind::real2dp: return "real2dp";
    case OutputKind::yes_no: return "yes_no";
    case OutputKind::high_low: return "high_low";
    case OutputKind::true_false: return "true_false";
  }
  return "?";
}

bool is_quantitative(OutputKind k) { return k == OutputKind::real2dp; }

std::string format_2dp(double v) {
  if (!std::isfinite(v)) return fmt::format("{}", v);
  // the small nudge keeps 0.125-style ties that are stored as 0.12499999... rounding up
  double r = std::floor(std::abs(v) * 100.0 + 0.5 + 1e-7) / 100.0;
  if (v < 0 && r != 0) r = -r;
  return fmt::format("{:.2f}", r);
}

std::string format_value(OutputKind k, const RawValue &v) {
  if (std::holds_alternative<double>(v)) return format_2dp(std::get<double>(v));
  if (!std::holds_alternative<bool>(v)) return "";
  const bool b = std::get<bool>(v);
  switch (k) {
    case OutputKind::yes_no: return b ? "Yes" : "No";
    case OutputKind::high_low: return b ? "High" : "Low";
    case OutputKind::true_false: return b ? "True" : "False";
    case OutputKind::real2dp: return b ? "1.00" : "0.00";
  }
  return "";
}

ToolRegistry::ToolRegistry(std::shared_ptr<const d::Tables> tables, std::vector<ToolSpec> tools)
    : tables_(std::move(tables)), tools_(std::move(tools)) {
  std::set<std::string> seen;
  for (const auto &t : tools_) {
    if (t.description.empty()) throw std::invalid_argument("tool " + t.name + " has no description");
    if (!seen.insert(t.name).second) throw std::invalid_argument("duplicate tool " + t.name);
  }
}

const ToolSpec *ToolRegistry::find(std::string_view name) const {
  for (const auto &t : tools_)
    if (t.name == name) return &t;
  return nullptr;
}

std::string ToolRegistry::names_csv() const {
  std::string out;
  for (const auto &t : tools_) {
    if (!out.empty()) out += ", ";
    out += t.name;
  }
  return out;
}

namespace {

// Models like to quote the input or wrap it in backticks.
std::string_view clean_input(std::string_view s) {
  s = text::trim(s);
  while (s.size() >= 2 && s.front() == s.back() &&
         (s.front() == '"' || s.front() == '\'' || s.front() == '`'))
    s = text::trim(s.substr(1, s.size() - 2));
  return s;
}

}  // namespace

ToolResult ToolRegistry::invoke(std::string_view name, std::string_view input) const {
  ToolResult r;
  r.tool = std::string(name);
  r.input = std::string(input);
  const ToolSpec *spec = find(text::trim(name));
  if (!spec) {
    r.text = "unknown tool " + std::string(name) + "; available: " + names_csv();
    return r;
  }
  try {
    Molecule m = molkit::parse_smiles(clean_input(input));
    r.raw = spec->compute(m, *tables_);
    r.text = format_value(spec->kind, r.raw);
    r.ok = true;
  } catch (const molkit::SmilesError &e) {
    r.text = std::string("invalid SMILES: ") + e.what();
  } catch (const std::exception &e) {
    r.text = std::string("tool error: ") + e.what();
  }
  return r;
}

std::shared_ptr<const ToolRegistry> default_registry(std::shared_ptr<const d::Tables> tables) {
  std::vector<ToolSpec> t;
  t.push_back({"calculate_molwt",
               "Calculates the molecular weight (g/mol) of a molecule. Input is a SMILES string.",
               "Molecular weight", OutputKind::real2dp,
               [](const Molecule &m, const d::Tables &) -> RawValue { return d::mol_weight(m); }});
  t.push_back({"calculate_logp",
               "Calculates the Crippen predicted octanol/water partition coefficient (LogP) of a "
               "molecule. Input is a SMILES string.",
               "LogP", OutputKind::real2dp,
               [](const Molecule &m, const d::Tables &x) -> RawValue {
                 return d::crippen_logp(m, x.crippen);
               }});
  t.push_back({"calculate_tpsa",
               "Calculates the topological polar surface area (TPSA) of a molecule. Input is a "
               "SMILES string.",
               "TPSA", OutputKind::real2dp,
               [](const Molecule &m, const d::Tables &x) -> RawValue { return d::tpsa(m, x.tpsa); }});
  t.push_back({"calculate_qed",
               "Calculates the quantitative estimate of drug-likeness (QED) of a molecule. Input "
               "is a SMILES string.",
               "QED", OutputKind::real2dp,
               [](const Molecule &m, const d::Tables &x) -> RawValue { return d::qed(m, x); }});
  t.push_back({"calculate_sa",
               "Calculates the synthetic accessibility score (1 easy to 10 hard) of a molecule. "
               "Input is a SMILES string.",
               "SA score", OutputKind::real2dp,
               [](const Molecule &m, const d::Tables &x) -> RawValue {
                 return d::sa_score(m, x.sa);
               }});
  t.push_back({"check_bbb_permeant",
               "Checks whether a molecule passes the blood brain barrier (inside the BOILED-Egg "
               "yolk); answers Yes or No. Input is a SMILES string.",
               "BBB permeant", OutputKind::yes_no,
               [](const Molecule &m, const d::Tables &x) -> RawValue {
                 return d::boiled_egg(m, x).bbb;
               }});
  t.push_back({"check_gi_absorption",
               "Predicts gastrointestinal absorption of a molecule (inside the BOILED-Egg "
               "white); answers High or Low. Input is a SMILES string.",
               "GI absorption", OutputKind::high_low,
               [](const Molecule &m, const d::Tables &x) -> RawValue {
                 return d::boiled_egg(m, x).gi;
               }});
  t.push_back({"check_druglikeness",
               "Checks whether a molecule passes Lipinski's rule of five with no violations; "
               "answers True or False. Input is a SMILES string.",
               "Lipinski", OutputKind::true_false,
               [](const Molecule &m, const d::Tables &x) -> RawValue {
                 return d::lipinski_pass(m, x);
               }});
  t.push_back({"check_brenk",
               "Checks whether a molecule passes the Brenk structural alert filter; answers True "
               "or False. Input is a SMILES string.",
               "Brenk filter", OutputKind::true_false,
               [](const Molecule &m, const d::Tables &x) -> RawValue {
                 return d::alert_filter(m, x.brenk).passes;
               }});
  t.push_back({"check_pains",
               "Checks whether a molecule passes the PAINS assay-interference filter; answers "
               "True or False. Input is a SMILES string.",
               "PAINS filter", OutputKind::true_false,
               [](const Molecule &m, const d::Tables &x) -> RawValue {
                 return d::alert_filter(m, x.pains).passes;
               }});
  return std::make_shared<const ToolRegistry>(std::move(tables), std::move(t));
}

std::shared_ptr<const ToolRegistry> default_registry(const std::string &data_dir) {
  return default_registry(d::Tables::load(data_dir));
}

}  // namespace chemagent::toolbox
