// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <set>

#include "chemagent/descriptors.hpp"

namespace chemagent::descriptors {

using molkit::MatchTarget;

namespace {

int count_acceptors(const QedParams &q, const MatchTarget &t) {
  int n = 0;
  for (const auto &acc : q.acceptors) {
    std::set<std::vector<int>> images;
    for (auto &map : molkit::match(acc.pattern, t).mappings) {
      if (acc.exclude && molkit::match_anchored(*acc.exclude, t, map[0])) continue;
      std::sort(map.begin(), map.end());
      images.insert(map);
    }
    n += static_cast<int>(images.size());
  }
  return n;
}

// Ring count left after removing ring atoms that carry non-aromatic substituents.
int aromatic_systems(const Molecule &m, const MatchTarget &t) {
  static const molkit::Pattern aliphatic = molkit::parse_smarts("[A;R][!a]");
  const int n = static_cast<int>(m.size());
  std::vector<char> keep(n, 1);
  for (int i = 0; i < n; ++i)
    if (molkit::match_anchored(aliphatic, t, i)) keep[i] = 0;
  int atoms = 0, edges = 0, components = 0;
  std::vector<int> comp(n, -1);
  for (int i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    ++atoms;
    if (comp[i] >= 0) continue;
    ++components;
    std::vector<int> stack{i};
    comp[i] = components;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (const auto &nb : m.neighbors(u))
        if (keep[nb.atom] && comp[nb.atom] < 0) {
          comp[nb.atom] = components;
          stack.push_back(nb.atom);
        }
    }
  }
  for (const auto &b : m.bonds()) edges += keep[b.a] && keep[b.b];
  return edges - atoms + components;
}

}  // namespace

QedProperties qed_properties(const Molecule &m, const Tables &tables) {
  const MatchTarget t(m);
  QedProperties p;
  p.mw = mol_weight(m);
  p.alogp = crippen_logp(m, tables.crippen);
  p.hba = count_acceptors(tables.qed, t);
  for (const auto &d : tables.qed.donors)
    p.hbd += static_cast<double>(molkit::match(d, t).unique_atom_sets);
  p.psa = tpsa(m, tables.tpsa);
  p.rotb = rotatable_bonds(m);
  p.arom = aromatic_systems(m, t);
  p.alerts = static_cast<double>(alert_filter(m, tables.qed_alerts).matched_labels.size());
  return p;
}

double ads(const AdsParams &p, double x) {
  const double exp1 = 1 + std::exp(-(x - p.c + p.d / 2) / p.e);
  const double exp2 = 1 + std::exp(-(x - p.c - p.d / 2) / p.f);
  return (p.a + p.b / exp1 * (1 - 1 / exp2)) / p.dmax;
}

double qed_from_properties(const QedProperties &p, const QedParams &params) {
  const std::pair<const char *, double> values[] = {
      {"MW", p.mw},   {"ALOGP", p.alogp}, {"HBA", p.hba},   {"HBD", p.hbd},
      {"PSA", p.psa}, {"ROTB", p.rotb},   {"AROM", p.arom}, {"ALERTS", p.alerts}};
  double num = 0, wsum = 0;
  for (auto [name, x] : values) {
    const AdsParams &a = params.ads.at(name);
    const double d = ads(a, x);
    if (!(d > 0)) throw DescriptorError(std::string("desirability of ") + name + " is not positive");
    num += a.weight * std::log(d);
    wsum += a.weight;
  }
  return std::exp(num / wsum);
}

double qed(const Molecule &m, const Tables &t) {
  return qed_from_properties(qed_properties(m, t), t.qed);
}

}  // namespace chemagent::descriptors
