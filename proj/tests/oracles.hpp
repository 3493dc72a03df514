// SPDX-License-Identifier: Apache-2.0
// Reference implementations the fast code is checked against.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "chemagent/smarts.hpp"
#include "chemagent/text.hpp"

namespace oracle {

// Every injective node->atom assignment, filtered by node and edge predicates.
inline std::set<std::vector<int>> brute_force_matches(const chemagent::molkit::Pattern &p,
                                                      const chemagent::molkit::MatchTarget &t) {
  using namespace chemagent::molkit;
  std::set<std::vector<int>> out;
  const int k = static_cast<int>(p.size());
  const int n = static_cast<int>(t.mol().size());
  if (k == 0 || k > n) return out;
  std::vector<int> map(k, 0);
  while (true) {
    bool ok = true;
    for (int i = 0; i < k && ok; ++i)
      for (int j = 0; j < i && ok; ++j) ok = map[i] != map[j];
    for (int i = 0; i < k && ok; ++i) ok = atom_matches(p.nodes[i], t, map[i]);
    for (const auto &e : p.edges) {
      if (!ok) break;
      auto b = t.mol().bond_between(map[e.a], map[e.b]);
      ok = b && bond_matches(e.expr, t, *b);
    }
    if (ok) out.insert(map);
    int pos = 0;
    while (pos < k && ++map[pos] == n) map[pos++] = 0;
    if (pos == k) break;
  }
  return out;
}

// SMARTS strings from every shipped pattern table (second column).
inline std::vector<std::string> shipped_smarts(const std::string &data_dir) {
  std::vector<std::string> out;
  for (const char *f : {"crippen.tsv", "qed_hbond.tsv", "qed_alerts.smarts", "brenk.smarts",
                        "pains.smarts"})
    for (auto &row : chemagent::text::read_tsv(chemagent::text::read_file(data_dir + "/" + f)))
      if (row.size() >= 2) out.push_back(row[1]);
  return out;
}

// Hand-written patterns that exercise each primitive and operator.
inline const std::vector<std::string> &probe_smarts() {
  static const std::vector<std::string> v = {
      "*", "a", "A", "[#6]", "[#6]~[#8]", "[OH]", "[OH0]", "C=O", "[C;H2]", "[c,n]",
      "[!C;!c]", "[C&R]", "[R0]", "[r6]", "[r3]", "[x2]", "[X4]", "[D3]", "[h2]", "[v4]",
      "[+]", "[-]", "[+0]", "*@*", "*!@*", "*:*", "*-*", "*=*", "*#*", "[#6]1~*~*1",
      "C1CC1", "c1ccccc1", "[N,O;H1]", "[C,N&H1]", "[!#1]~[!#1]", "*~*~*~*", "C(C)(C)C",
      "[#7,#8]-,=[#6]", "[CX4][Cl,Br,I]", "[OH]C", "[#6;R1]", "[R2]", "[x3]",
      "N~*", "[n;H1]", "[13C]", "[2H]", "[H]", "[S;v6]", "O=*=O", "[CH3][CH2]", "[A;R]"};
  return v;
}

}  // namespace oracle
