// SPDX-License-Identifier: Apache-2.0
#include "chemagent/elements.hpp"

#include <charconv>
#include <stdexcept>

#include "chemagent/text.hpp"

namespace chemagent::molkit {

extern const char *const kElementsTsv;
extern const char *const kIsotopesTsv;

namespace {

int to_int(std::string_view s, std::string_view what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw std::runtime_error("bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

PeriodicTable PeriodicTable::from_text(std::string_view elements_tsv,
                                       std::string_view isotopes_tsv) {
  PeriodicTable t;
  for (auto &row : text::read_tsv(elements_tsv)) {
    if (row.size() < 4) throw std::runtime_error("elements table: short row");
    Element e;
    e.symbol = row[0];
    e.atomic_number = to_int(row[1], "atomic number");
    e.standard_weight = text::to_double(row[2]);
    if (row[3] != "-")
      for (auto &v : text::split(row[3], ','))
        e.default_valences.push_back(to_int(v, "valence"));
    e.organic_subset = row.size() > 4 && row[4] == "1";
    if (e.atomic_number != static_cast<int>(t.elements_.size()) + 1)
      throw std::runtime_error("elements table must be ordered by atomic number");
    if (e.standard_weight <= 0)
      throw std::runtime_error("elements table: non-positive weight for " + e.symbol);
    t.by_symbol_[e.symbol] = e.atomic_number;
    t.elements_.push_back(std::move(e));
  }
  for (auto &row : text::read_tsv(isotopes_tsv)) {
    if (row.size() < 4) throw std::runtime_error("isotope table: short row");
    int z = to_int(row[0], "atomic number");
    int a = to_int(row[2], "mass number");
    t.isotopes_[static_cast<long>(z) * 1000 + a] = text::to_double(row[3]);
  }
  return t;
}

const PeriodicTable &PeriodicTable::standard() {
  static const PeriodicTable table = from_text(kElementsTsv, kIsotopesTsv);
  return table;
}

const Element *PeriodicTable::by_symbol(std::string_view symbol) const {
  auto it = by_symbol_.find(std::string(symbol));
  return it == by_symbol_.end() ? nullptr : &elements_[it->second - 1];
}

const Element *PeriodicTable::by_number(int z) const {
  if (z < 1 || z > static_cast<int>(elements_.size())) return nullptr;
  return &elements_[z - 1];
}

std::optional<double> PeriodicTable::isotope_mass(int z, int mass_number) const {
  auto it = isotopes_.find(static_cast<long>(z) * 1000 + mass_number);
  if (it == isotopes_.end()) return std::nullopt;
  return it->second;
}

const std::vector<int> &PeriodicTable::charged_valences(const Element &e, int charge) const {
  if (charge == 0) return e.default_valences;
  const Element *iso = by_number(e.atomic_number - charge);
  if (iso && !iso->default_valences.empty()) return iso->default_valences;
  return e.default_valences;
}

}  // namespace chemagent::molkit
