// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "chemagent/descriptors.hpp"

namespace chemagent::descriptors {

using molkit::BondOrder;

namespace {

std::uint32_t hash_combine(std::uint32_t seed, std::uint32_t v) {
  seed ^= v + 0x9e3779b9u + (seed << 6) + (seed >> 2);
  return seed;
}

std::uint32_t hash_values(std::initializer_list<std::uint32_t> vs) {
  std::uint32_t s = 0;
  for (auto v : vs) s = hash_combine(s, v);
  return s;
}

std::uint32_t bond_code(BondOrder o) {
  switch (o) {
    case BondOrder::single: return 1;
    case BondOrder::double_: return 2;
    case BondOrder::triple: return 3;
    case BondOrder::aromatic: return 12;
  }
  return 0;
}

// Bond set as little-endian 64-bit words; compared as one big integer.
using BondSet = std::vector<std::uint64_t>;

bool bondset_less(const BondSet &a, const BondSet &b) {
  for (std::size_t k = a.size(); k-- > 0;)
    if (a[k] != b[k]) return a[k] < b[k];
  return false;
}

std::uint32_t atom_invariant(const Molecule &m, int i) {
  const auto &a = m.atom(i);
  double mass = a.element->standard_weight;
  if (a.isotope)
    mass = molkit::PeriodicTable::standard().isotope_mass(a.atomic_number(), *a.isotope).value_or(mass);
  const int delta = static_cast<int>(mass - a.element->standard_weight);
  std::uint32_t s = 0;
  s = hash_combine(s, static_cast<std::uint32_t>(a.atomic_number()));
  s = hash_combine(s, static_cast<std::uint32_t>(m.degree(i) + a.implicit_h));
  s = hash_combine(s, static_cast<std::uint32_t>(m.total_h(i)));
  s = hash_combine(s, static_cast<std::uint32_t>(a.formal_charge));
  s = hash_combine(s, static_cast<std::uint32_t>(delta));
  if (m.rings().atom_ring_membership[i] > 0) s = hash_combine(s, 1);
  return s;
}

// Graph-symmetry classes by iterative neighbourhood refinement.
std::vector<std::uint64_t> symmetry_classes(const Molecule &m) {
  const int n = static_cast<int>(m.size());
  std::vector<std::uint64_t> cls(n);
  auto mix = [](std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 12) + (h >> 4);
    return h;
  };
  for (int i = 0; i < n; ++i) {
    const auto &a = m.atom(i);
    std::uint64_t h = 0;
    for (std::uint64_t v :
         {std::uint64_t(a.atomic_number()), std::uint64_t(m.degree(i)), std::uint64_t(m.total_h(i)),
          std::uint64_t(a.formal_charge + 16), std::uint64_t(a.isotope.value_or(0)),
          std::uint64_t(a.aromatic)})
      h = mix(h, v);
    cls[i] = h;
  }
  auto distinct = [](std::vector<std::uint64_t> v) {
    std::sort(v.begin(), v.end());
    return std::unique(v.begin(), v.end()) - v.begin();
  };
  auto count = distinct(cls);
  for (int round = 0; round < n; ++round) {
    std::vector<std::uint64_t> next(n);
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, std::uint64_t>> nb;
      for (const auto &x : m.neighbors(i))
        nb.emplace_back(static_cast<int>(m.bond(x.bond).order), cls[x.atom]);
      std::sort(nb.begin(), nb.end());
      std::uint64_t h = mix(0, cls[i]);
      for (auto &[o, c] : nb) h = mix(mix(h, o), c);
      next[i] = h;
    }
    auto c2 = distinct(next);
    cls.swap(next);
    if (c2 == count) break;
    count = c2;
  }
  return cls;
}

// Tetrahedral centres that could carry stereo: every substituent in its own
// symmetry class.
int potential_stereocentres(const Molecule &m) {
  const auto cls = symmetry_classes(m);
  int count = 0;
  for (int i = 0; i < static_cast<int>(m.size()); ++i) {
    const auto &a = m.atom(i);
    const int z = a.atomic_number();
    const int total_degree = m.degree(i) + a.implicit_h;
    if (a.implicit_h > 1 || a.aromatic) continue;
    bool all_single = true;
    for (const auto &x : m.neighbors(i))
      all_single = all_single && m.bond(x.bond).order == BondOrder::single;
    bool candidate = false;
    if (total_degree == 4) {
      candidate = all_single || z == 15 || z == 16 || z == 34;
    } else if (total_degree == 3) {
      if (z == 7 && all_single && a.formal_charge == 0)
        candidate = m.rings().atom_in_ring_of_size(i, 3);
      else if ((z == 15 || z == 33) && all_single && a.formal_charge == 0)
        candidate = true;
      else if (z == 16 || z == 34)
        candidate = !all_single || a.formal_charge == 1;
    }
    if (!candidate) continue;
    std::set<std::uint64_t> seen;
    bool distinct = true;
    for (const auto &x : m.neighbors(i)) distinct = distinct && seen.insert(cls[x.atom]).second;
    if (distinct) ++count;
  }
  return count;
}

std::pair<int, int> spiro_and_bridgeheads(const Molecule &m) {
  const auto &rings = m.rings().rings;
  std::vector<std::vector<int>> atom_sets, bond_sets;
  for (const auto &r : rings) {
    std::vector<int> atoms(r.begin(), r.end()), bonds;
    for (std::size_t k = 0; k < r.size(); ++k)
      bonds.push_back(*m.bond_between(r[k], r[(k + 1) % r.size()]));
    std::sort(atoms.begin(), atoms.end());
    std::sort(bonds.begin(), bonds.end());
    atom_sets.push_back(std::move(atoms));
    bond_sets.push_back(std::move(bonds));
  }
  std::vector<char> spiro(m.size(), 0), bridge(m.size(), 0);
  for (std::size_t i = 0; i < rings.size(); ++i)
    for (std::size_t j = i + 1; j < rings.size(); ++j) {
      std::vector<int> shared_atoms, shared_bonds;
      std::set_intersection(atom_sets[i].begin(), atom_sets[i].end(), atom_sets[j].begin(),
                            atom_sets[j].end(), std::back_inserter(shared_atoms));
      if (shared_atoms.size() == 1) spiro[shared_atoms[0]] = 1;
      std::set_intersection(bond_sets[i].begin(), bond_sets[i].end(), bond_sets[j].begin(),
                            bond_sets[j].end(), std::back_inserter(shared_bonds));
      if (shared_bonds.size() > 1) {
        std::vector<int> hits(m.size(), 0);
        for (int b : shared_bonds) {
          ++hits[m.bond(b).a];
          ++hits[m.bond(b).b];
        }
        for (std::size_t a = 0; a < hits.size(); ++a)
          if (hits[a] == 1) bridge[a] = 1;
      }
    }
  return {static_cast<int>(std::count(spiro.begin(), spiro.end(), 1)),
          static_cast<int>(std::count(bridge.begin(), bridge.end(), 1))};
}

}  // namespace

std::map<std::uint32_t, int> morgan_counts(const Molecule &m, int radius) {
  const int n = static_cast<int>(m.size());
  const std::size_t words = (m.bonds().size() + 63) / 64 + 1;
  std::map<std::uint32_t, int> out;
  std::vector<std::uint32_t> cur(n);
  for (int i = 0; i < n; ++i) {
    cur[i] = atom_invariant(m, i);
    ++out[cur[i]];
  }
  std::vector<BondSet> envs(n, BondSet(words, 0));
  std::vector<char> dead(n, 0);
  std::vector<BondSet> seen;
  for (int layer = 0; layer < radius; ++layer) {
    std::vector<std::uint32_t> next = cur;
    struct Entry {
      BondSet env;
      std::uint32_t hash;
      int atom;
    };
    std::vector<Entry> round;
    for (int i = 0; i < n; ++i) {
      if (dead[i]) continue;
      if (m.degree(i) == 0) {
        dead[i] = 1;
        continue;
      }
      std::vector<std::pair<std::uint32_t, std::uint32_t>> nbrs;
      BondSet env = envs[i];
      for (const auto &x : m.neighbors(i)) {
        nbrs.emplace_back(bond_code(m.bond(x.bond).order), cur[x.atom]);
        env[x.bond / 64] |= std::uint64_t(1) << (x.bond % 64);
        for (std::size_t w = 0; w < words; ++w) env[w] |= envs[x.atom][w];
      }
      std::sort(nbrs.begin(), nbrs.end());
      std::uint32_t s = static_cast<std::uint32_t>(layer);
      s = hash_combine(s, cur[i]);
      for (auto &[bt, inv] : nbrs) s = hash_combine(s, hash_values({bt, inv}));
      next[i] = s;
      round.push_back({std::move(env), s, i});
    }
    std::sort(round.begin(), round.end(), [](const Entry &a, const Entry &b) {
      if (a.env != b.env) return bondset_less(a.env, b.env);
      return std::tie(a.hash, a.atom) < std::tie(b.hash, b.atom);
    });
    for (auto &e : round) {
      bool dup = false;
      for (const auto &s : seen)
        if (s == e.env) {
          dup = true;
          break;
        }
      if (!dup) {
        seen.push_back(e.env);
        ++out[e.hash];
      } else {
        dead[e.atom] = 1;
      }
      envs[e.atom] = std::move(e.env);
    }
    cur.swap(next);
  }
  return out;
}

SaBreakdown sa_detail(const Molecule &m, const SaParams &p) {
  SaBreakdown r;
  const auto fps = morgan_counts(m, p.morgan_radius);
  r.fragment_table_empty = p.fragment_scores.empty();
  if (!r.fragment_table_empty) {
    double sum = 0;
    int nf = 0;
    for (auto [key, count] : fps) {
      auto it = p.fragment_scores.find(key);
      sum += (it == p.fragment_scores.end() ? p.unknown_fragment_score : it->second) * count;
      nf += count;
    }
    r.fragment_term = nf ? sum / nf : 0;
  }
  const double n_atoms = static_cast<double>(m.size());
  r.chiral_centres = potential_stereocentres(m);
  std::tie(r.spiro_atoms, r.bridgehead_atoms) = spiro_and_bridgeheads(m);
  bool macro = false;
  for (const auto &ring : m.rings().rings)
    macro = macro || static_cast<int>(ring.size()) >= p.macrocycle_min_size;

  r.size_penalty = std::pow(n_atoms, p.size_exponent) - n_atoms;
  r.stereo_penalty = std::log10(r.chiral_centres + 1.0);
  r.spiro_penalty = std::log10(r.spiro_atoms + 1.0);
  r.bridge_penalty = std::log10(r.bridgehead_atoms + 1.0);
  r.macrocycle_penalty = macro ? std::log10(2.0) : 0.0;
  const double bits = static_cast<double>(fps.size());
  if (n_atoms > bits && bits > 0) r.density_term = 0.5 * std::log(n_atoms / bits);

  double raw = r.fragment_term - r.size_penalty - r.stereo_penalty - r.spiro_penalty -
               r.bridge_penalty - r.macrocycle_penalty + r.density_term;
  double s = 11.0 - (raw - p.raw_min + 1) / (p.raw_max - p.raw_min) * 9.0;
  if (s > p.smooth_above) s = p.smooth_above + std::log(s - p.smooth_above);
  r.score = std::clamp(s, p.clamp_low, p.clamp_high);
  return r;
}

double sa_score(const Molecule &m, const SaParams &p) { return sa_detail(m, p).score; }

}  // namespace chemagent::descriptors
