// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "chemagent/descriptors.hpp"

namespace chemagent::descriptors {

using molkit::BondOrder;
using molkit::MatchTarget;

double mol_weight(const Molecule &m) {
  const auto &pt = molkit::PeriodicTable::standard();
  double w = 0;
  for (const auto &a : m.atoms()) {
    if (a.isotope) {
      auto mass = pt.isotope_mass(a.atomic_number(), *a.isotope);
      if (!mass)
        throw DescriptorError("no mass for isotope " + std::to_string(*a.isotope) +
                              a.symbol());
      w += *mass;
    } else {
      w += a.element->standard_weight;
    }
    w += molkit::kHydrogenWeight * a.implicit_h;
  }
  return w;
}

double crippen_logp(const Molecule &m, const CrippenTable &table) {
  const Molecule h = molkit::add_hydrogens(m);
  const MatchTarget t(h);
  double sum = 0;
  for (int i = 0; i < static_cast<int>(h.size()); ++i) {
    bool typed = false;
    for (const auto &rule : table.rules) {
      if (!molkit::atom_matches(rule.pattern.nodes[0], t, i)) continue;
      if (rule.pattern.size() == 1 || molkit::match_anchored(rule.pattern, t, i)) {
        sum += rule.logp;
        typed = true;
        break;
      }
    }
    if (!typed)
      throw DescriptorError("no Crippen rule matches atom " + std::to_string(i) + " (" +
                            h.atom(i).symbol() + ")");
  }
  return sum;
}

TpsaResult tpsa_detail(const Molecule &m, const TpsaTable &table) {
  TpsaResult r;
  for (int i = 0; i < static_cast<int>(m.size()); ++i) {
    const auto &a = m.atom(i);
    const int z = a.atomic_number();
    if (z != 7 && z != 8 && !(table.include_s_p && (z == 15 || z == 16))) continue;
    int s = 0, d = 0, tr = 0, ar = 0;
    for (const auto &nb : m.neighbors(i)) {
      switch (m.bond(nb.bond).order) {
        case BondOrder::single: ++s; break;
        case BondOrder::double_: ++d; break;
        case BondOrder::triple: ++tr; break;
        case BondOrder::aromatic: ++ar; break;
      }
    }
    const int in3 = m.rings().atom_in_ring_of_size(i, 3) ? 1 : 0;
    const TpsaRow *hit = nullptr;
    for (const auto &row : table.rows) {
      if (row.atomic_number == z && row.aromatic == a.aromatic && row.hydrogens == a.implicit_h &&
          row.charge == a.formal_charge && row.single == s && row.double_ == d &&
          row.triple == tr && row.aromatic_bonds == ar &&
          (row.in_3_ring < 0 || row.in_3_ring == in3)) {
        hit = &row;
        break;
      }
    }
    if (hit) {
      r.value += hit->contribution;
      continue;
    }
    r.used_fallback = true;
    auto fb = table.fallback.find(z);
    if (fb != table.fallback.end()) {
      const auto &f = fb->second;
      r.value += std::max(0.0, f.base + f.per_neighbour * m.degree(i) +
                                   f.per_hydrogen * a.implicit_h);
    }
  }
  return r;
}

double tpsa(const Molecule &m, const TpsaTable &t) { return tpsa_detail(m, t).value; }

namespace {

bool n_or_o(const Molecule &m, int i) {
  const int z = m.atom(i).atomic_number();
  return z == 7 || z == 8;
}

struct RotorPatterns {
  std::vector<molkit::Pattern> common, amide;
  RotorPatterns() {
    for (const char *s : {"*#*", "C(F)(F)F", "C(Cl)(Cl)Cl", "C(Br)(Br)Br", "C([CH3])([CH3])[CH3]"})
      common.push_back(molkit::parse_smarts(s));
    for (const char *s : {"[CD3](=[N,O,S])-!@[#7,O,S&!D1]", "[#7,O,S&!D1]-!@[CD3]=[N,O,S]",
                          "[CD3](=[N+])-!@[#7&!D1]", "[#7&!D1]-!@[CD3]=[N+]"})
      amide.push_back(molkit::parse_smarts(s));
  }
};

bool any_anchored(const std::vector<molkit::Pattern> &ps, const MatchTarget &t, int atom) {
  for (const auto &p : ps)
    if (molkit::match_anchored(p, t, atom)) return true;
  return false;
}

}  // namespace

int hb_donors(const Molecule &m) {
  int n = 0;
  for (int i = 0; i < static_cast<int>(m.size()); ++i) n += n_or_o(m, i) && m.total_h(i) > 0;
  return n;
}

int hb_acceptors(const Molecule &m) {
  int n = 0;
  for (int i = 0; i < static_cast<int>(m.size()); ++i) n += n_or_o(m, i);
  return n;
}

int rotatable_bonds(const Molecule &m) {
  static const RotorPatterns rp;
  const MatchTarget t(m);
  const int n = static_cast<int>(m.size());
  std::vector<signed char> common(n, -1), first(n, -1);
  auto common_ok = [&](int a) {
    if (common[a] < 0) common[a] = m.degree(a) != 1 && !any_anchored(rp.common, t, a);
    return common[a] == 1;
  };
  auto first_ok = [&](int a) {
    if (first[a] < 0) first[a] = common_ok(a) && !any_anchored(rp.amide, t, a);
    return first[a] == 1;
  };
  int count = 0;
  for (int b = 0; b < static_cast<int>(m.bonds().size()); ++b) {
    const auto &bond = m.bond(b);
    if (bond.order != BondOrder::single && bond.order != BondOrder::aromatic) continue;
    if (m.bond_in_ring(b)) continue;
    if ((first_ok(bond.a) && common_ok(bond.b)) || (first_ok(bond.b) && common_ok(bond.a)))
      ++count;
  }
  return count;
}

int aromatic_ring_count(const Molecule &m) {
  int n = 0;
  for (const auto &ring : m.rings().rings) {
    bool all = true;
    for (int a : ring) all = all && m.atom(a).aromatic;
    n += all;
  }
  return n;
}

bool Ellipse::contains(double x, double y) const {
  const double t = theta_deg * std::numbers::pi / 180.0;
  const double dx = x - cx, dy = y - cy;
  const double u = dx * std::cos(t) + dy * std::sin(t);
  const double v = -dx * std::sin(t) + dy * std::cos(t);
  return (u / rx) * (u / rx) + (v / ry) * (v / ry) <= 1.0;
}

EggResult boiled_egg_point(double tpsa_value, double wlogp, const EggModel &egg) {
  EggResult r;
  r.tpsa = tpsa_value;
  r.wlogp = wlogp;
  r.bbb = egg.yolk.contains(tpsa_value, wlogp);
  r.gi = egg.white.contains(tpsa_value, wlogp);
  return r;
}

EggResult boiled_egg(const Molecule &m, const Tables &t) {
  return boiled_egg_point(tpsa(m, t.tpsa), crippen_logp(m, t.crippen), t.egg);
}

LipinskiResult lipinski(const Molecule &m, const Tables &t) {
  LipinskiResult r;
  r.mw = mol_weight(m);
  r.logp = crippen_logp(m, t.crippen);
  r.donors = hb_donors(m);
  r.acceptors = hb_acceptors(m);
  r.violations = (r.mw > 500) + (r.logp > 5) + (r.donors > 5) + (r.acceptors > 10);
  r.pass = r.violations == 0;
  return r;
}

AlertResult alert_filter(const Molecule &m, const AlertSet &set) {
  if (set.patterns.empty()) throw ConfigError("alert set '" + set.name + "' is empty");
  AlertResult r;
  const MatchTarget t(m);
  for (const auto &g : set.patterns)
    for (const auto &alt : g.alternatives)
      if (molkit::has_disjoint_matches(alt.pattern, t, alt.min_count)) {
        r.matched_labels.push_back(g.label);
        break;
      }
  r.passes = r.matched_labels.empty();
  return r;
}

}  // namespace chemagent::descriptors
