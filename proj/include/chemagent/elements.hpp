// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace chemagent::molkit {

struct Element {
  std::string symbol;
  int atomic_number = 0;
  double standard_weight = 0.0;
  // Empty when the element has no fixed valence (metals, noble gases).
  std::vector<int> default_valences;
  bool organic_subset = false;
};

class PeriodicTable {
public:
  // Parse the tab-separated element and isotope tables.
  static PeriodicTable from_text(std::string_view elements_tsv,
                                 std::string_view isotopes_tsv);

  // Table compiled into the library from data/elements.tsv and data/isotopes.tsv.
  static const PeriodicTable &standard();

  const Element *by_symbol(std::string_view symbol) const;
  const Element *by_number(int z) const;
  std::optional<double> isotope_mass(int z, int mass_number) const;

  // Valences of the isoelectronic neutral element (N+ behaves like C, O- like F).
  const std::vector<int> &charged_valences(const Element &e, int charge) const;

  std::size_t size() const { return elements_.size(); }

private:
  std::vector<Element> elements_;  // index = atomic number - 1
  std::unordered_map<std::string, int> by_symbol_;
  std::unordered_map<long, double> isotopes_;
};

// Hydrogen mass used for implicit hydrogens.
inline constexpr double kHydrogenWeight = 1.008;

}  // namespace chemagent::molkit
