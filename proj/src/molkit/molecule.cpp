// SPDX-License-Identifier: Apache-2.0
#include "chemagent/molecule.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace chemagent::molkit {

bool RingInfo::atom_in_ring_of_size(int atom, std::size_t size) const {
  for (auto &r : rings)
    if (r.size() == size && std::find(r.begin(), r.end(), atom) != r.end()) return true;
  return false;
}

Molecule::Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds, std::string source_text)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)), source_(std::move(source_text)) {
  const int n = static_cast<int>(atoms_.size());
  adjacency_.assign(n, {});
  for (int i = 0; i < n; ++i) {
    Atom &a = atoms_[i];
    a.index = i;
    if (!a.element) throw MoleculeError("atom " + std::to_string(i) + " has no element");
    if (a.implicit_h < 0) throw MoleculeError("negative hydrogen count");
    if (a.explicit_h && *a.explicit_h != a.implicit_h)
      throw MoleculeError("explicit and implicit hydrogen counts disagree");
  }
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < static_cast<int>(bonds_.size()); ++i) {
    const Bond &b = bonds_[i];
    if (b.a < 0 || b.b < 0 || b.a >= n || b.b >= n)
      throw MoleculeError("bond endpoint out of range");
    if (b.a == b.b) throw MoleculeError("bond joins an atom to itself");
    if (!seen.insert(std::minmax(b.a, b.b)).second)
      throw MoleculeError("duplicate bond between atoms " + std::to_string(b.a) + " and " +
                          std::to_string(b.b));
    if (b.order == BondOrder::aromatic && !(atoms_[b.a].aromatic && atoms_[b.b].aromatic))
      throw MoleculeError("aromatic bond between non-aromatic atoms");
    adjacency_[b.a].push_back({b.b, i});
    adjacency_[b.b].push_back({b.a, i});
  }
  for (auto &nb : adjacency_)
    std::sort(nb.begin(), nb.end(), [](auto &x, auto &y) { return x.atom < y.atom; });

  std::vector<int> comp(n, -1);
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = components_;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (auto &nb : adjacency_[u])
        if (comp[nb.atom] < 0) {
          comp[nb.atom] = components_;
          stack.push_back(nb.atom);
        }
    }
    ++components_;
  }
  rings_ = perceive_rings(*this);
}

std::optional<int> Molecule::bond_between(int a, int b) const {
  for (auto &nb : adjacency_[a])
    if (nb.atom == b) return nb.bond;
  return std::nullopt;
}

int Molecule::total_h(int atom) const {
  int h = atoms_[atom].implicit_h;
  for (auto &nb : adjacency_[atom])
    if (is_hydrogen(nb.atom)) ++h;
  return h;
}

int Molecule::heavy_degree(int atom) const {
  int d = 0;
  for (auto &nb : adjacency_[atom])
    if (!is_hydrogen(nb.atom)) ++d;
  return d;
}

// Smallest set of smallest rings from Horton candidate cycles, accepted greedily
// when independent over GF(2).
RingInfo perceive_rings(const Molecule &m) {
  const int n = static_cast<int>(m.size());
  const int nb = static_cast<int>(m.bonds().size());
  RingInfo info;
  info.atom_ring_membership.assign(n, 0);
  info.atom_smallest_ring.assign(n, 0);
  info.bond_ring_membership.assign(nb, 0);
  const int cyclomatic = nb - n + m.component_count();
  if (cyclomatic <= 0) return info;

  // 2-core: atoms that can lie on a cycle.
  std::vector<int> deg(n);
  std::vector<char> alive(n, 1);
  for (int i = 0; i < n; ++i) deg[i] = m.degree(i);
  std::vector<int> stack;
  for (int i = 0; i < n; ++i)
    if (deg[i] <= 1) stack.push_back(i);
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    if (!alive[u]) continue;
    alive[u] = 0;
    for (auto &x : m.neighbors(u))
      if (alive[x.atom] && --deg[x.atom] <= 1) stack.push_back(x.atom);
  }

  struct Candidate {
    std::vector<int> atoms;  // cycle order
    std::vector<int> sorted;
    std::vector<int> bonds;
  };
  std::vector<Candidate> cands;
  std::set<std::vector<int>> seen;
  std::vector<int> dist(n), parent(n), parent_bond(n);
  for (int v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    std::fill(dist.begin(), dist.end(), -1);
    dist[v] = 0;
    parent[v] = -1;
    std::vector<int> queue{v};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int u = queue[qi];
      for (auto &x : m.neighbors(u))
        if (alive[x.atom] && dist[x.atom] < 0) {
          dist[x.atom] = dist[u] + 1;
          parent[x.atom] = u;
          parent_bond[x.atom] = x.bond;
          queue.push_back(x.atom);
        }
    }
    auto path = [&](int t) {
      std::vector<int> p;
      for (int u = t; u != -1; u = parent[u]) p.push_back(u);
      std::reverse(p.begin(), p.end());
      return p;
    };
    for (int bi = 0; bi < nb; ++bi) {
      const Bond &b = m.bond(bi);
      if (!alive[b.a] || !alive[b.b] || dist[b.a] < 0 || dist[b.b] < 0) continue;
      if (parent_bond[b.a] == bi && parent[b.a] == b.b) continue;
      if (parent_bond[b.b] == bi && parent[b.b] == b.a) continue;
      auto px = path(b.a), py = path(b.b);
      std::vector<int> sx(px.begin() + 1, px.end()), sy(py.begin() + 1, py.end());
      std::sort(sx.begin(), sx.end());
      std::sort(sy.begin(), sy.end());
      std::vector<int> common;
      std::set_intersection(sx.begin(), sx.end(), sy.begin(), sy.end(), std::back_inserter(common));
      if (!common.empty()) continue;
      std::vector<int> cyc = px;
      for (auto it = py.rbegin(); it != py.rend() - 1; ++it) cyc.push_back(*it);
      // canonical orientation: lowest atom first, then the smaller neighbour
      auto mn = std::min_element(cyc.begin(), cyc.end());
      std::rotate(cyc.begin(), mn, cyc.end());
      if (cyc.size() > 2 && cyc.back() < cyc[1]) std::reverse(cyc.begin() + 1, cyc.end());
      std::vector<int> bonds;
      for (std::size_t i = 0; i < cyc.size(); ++i)
        bonds.push_back(*m.bond_between(cyc[i], cyc[(i + 1) % cyc.size()]));
      std::sort(bonds.begin(), bonds.end());
      if (!seen.insert(bonds).second) continue;
      std::vector<int> sorted = cyc;
      std::sort(sorted.begin(), sorted.end());
      cands.push_back({std::move(cyc), std::move(sorted), std::move(bonds)});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate &x, const Candidate &y) {
    if (x.atoms.size() != y.atoms.size()) return x.atoms.size() < y.atoms.size();
    return x.sorted < y.sorted;
  });

  const std::size_t words = (nb + 63) / 64;
  using Bits = std::vector<std::uint64_t>;
  std::vector<std::pair<int, Bits>> basis;  // (pivot bit, row) kept in echelon form
  auto lowest = [&](const Bits &b) {
    for (std::size_t w = 0; w < words; ++w)
      if (b[w]) return static_cast<int>(w * 64 + __builtin_ctzll(b[w]));
    return -1;
  };
  for (auto &c : cands) {
    if (static_cast<int>(info.rings.size()) == cyclomatic) break;
    Bits row(words, 0);
    for (int b : c.bonds) row[b / 64] |= 1ULL << (b % 64);
    for (auto &[pivot, brow] : basis)
      if (row[pivot / 64] >> (pivot % 64) & 1ULL)
        for (std::size_t w = 0; w < words; ++w) row[w] ^= brow[w];
    int p = lowest(row);
    if (p < 0) continue;
    for (auto &[pivot, brow] : basis)
      if (brow[p / 64] >> (p % 64) & 1ULL)
        for (std::size_t w = 0; w < words; ++w) brow[w] ^= row[w];
    basis.emplace_back(p, std::move(row));
    info.rings.push_back(c.atoms);
  }

  for (auto &r : info.rings) {
    const int size = static_cast<int>(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      int a = r[i];
      ++info.atom_ring_membership[a];
      if (info.atom_smallest_ring[a] == 0 || size < info.atom_smallest_ring[a])
        info.atom_smallest_ring[a] = size;
      ++info.bond_ring_membership[*m.bond_between(a, r[(i + 1) % r.size()])];
    }
  }
  return info;
}

int valence_sum(const Molecule &m, int atom) {
  int sum = m.atom(atom).implicit_h;
  for (auto &x : m.neighbors(atom)) {
    auto o = m.bond(x.bond).order;
    sum += o == BondOrder::aromatic ? 1 : static_cast<int>(o);
  }
  return sum;
}

bool needs_pi_bond(const Molecule &m, int atom) {
  const Atom &a = m.atom(atom);
  if (!a.aromatic) return false;
  const auto &vals = PeriodicTable::standard().charged_valences(*a.element, a.formal_charge);
  const int used = valence_sum(m, atom);
  for (int v : vals)
    if (v >= used) return v - used == 1;
  return false;
}

int total_valence(const Molecule &m, int atom) {
  return valence_sum(m, atom) + (needs_pi_bond(m, atom) ? 1 : 0);
}

namespace {

bool match_pi(const Molecule &m, const std::vector<int> &system, std::vector<int> &mate,
              const std::vector<char> &needs) {
  // Pick the unmatched atom with the fewest free partners.
  int best = -1;
  std::vector<int> best_opts;
  for (int a : system) {
    if (!needs[a] || mate[a] >= 0) continue;
    std::vector<int> opts;
    for (auto &x : m.neighbors(a))
      if (m.bond(x.bond).order == BondOrder::aromatic && needs[x.atom] && mate[x.atom] < 0)
        opts.push_back(x.atom);
    if (best < 0 || opts.size() < best_opts.size()) {
      best = a;
      best_opts = std::move(opts);
      if (best_opts.empty()) return false;
    }
  }
  if (best < 0) return true;
  for (int p : best_opts) {
    mate[best] = p;
    mate[p] = best;
    if (match_pi(m, system, mate, needs)) return true;
    mate[best] = mate[p] = -1;
  }
  return false;
}

}  // namespace

Molecule kekulize(const Molecule &m) {
  const int n = static_cast<int>(m.size());
  std::vector<char> needs(n, 0);
  for (int i = 0; i < n; ++i) needs[i] = needs_pi_bond(m, i);
  std::vector<int> mate(n, -1), system_of(n, -1);
  int systems = 0;
  for (int s = 0; s < n; ++s) {
    if (!m.atom(s).aromatic || system_of[s] >= 0) continue;
    std::vector<int> system{s};
    system_of[s] = systems;
    for (std::size_t i = 0; i < system.size(); ++i)
      for (auto &x : m.neighbors(system[i]))
        if (m.bond(x.bond).order == BondOrder::aromatic && system_of[x.atom] < 0) {
          system_of[x.atom] = systems;
          system.push_back(x.atom);
        }
    ++systems;
    std::sort(system.begin(), system.end());
    if (!match_pi(m, system, mate, needs)) {
      std::ostringstream msg;
      msg << "no Kekule structure for aromatic system with atoms";
      for (int a : system) msg << ' ' << a;
      throw KekuleError(msg.str(), system);
    }
  }
  std::vector<Atom> atoms = m.atoms();
  for (auto &a : atoms) a.aromatic = false;
  std::vector<Bond> bonds = m.bonds();
  for (auto &b : bonds)
    if (b.order == BondOrder::aromatic)
      b.order = mate[b.a] == b.b ? BondOrder::double_ : BondOrder::single;
  return Molecule(std::move(atoms), std::move(bonds), m.source_text());
}

Molecule add_hydrogens(const Molecule &m) {
  std::vector<Atom> atoms = m.atoms();
  std::vector<Bond> bonds = m.bonds();
  const Element *h = PeriodicTable::standard().by_number(1);
  const int n = static_cast<int>(atoms.size());
  for (int i = 0; i < n; ++i) {
    int count = atoms[i].implicit_h;
    atoms[i].implicit_h = 0;
    atoms[i].explicit_h = 0;
    for (int k = 0; k < count; ++k) {
      Atom ha;
      ha.element = h;
      ha.explicit_h = 0;
      bonds.push_back({i, static_cast<int>(atoms.size()), BondOrder::single});
      atoms.push_back(ha);
    }
  }
  return Molecule(std::move(atoms), std::move(bonds), m.source_text());
}

namespace {

std::vector<std::uint64_t> refined_classes(const Molecule &m) {
  const int n = static_cast<int>(m.size());
  std::vector<std::uint64_t> cls(n);
  auto mix = [](std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  };
  for (int i = 0; i < n; ++i) {
    const Atom &a = m.atom(i);
    std::uint64_t h = 1469598103934665603ULL;
    h = mix(h, a.atomic_number());
    h = mix(h, static_cast<std::uint64_t>(a.formal_charge + 64));
    h = mix(h, a.isotope.value_or(0));
    h = mix(h, a.aromatic);
    h = mix(h, a.implicit_h);
    h = mix(h, m.degree(i));
    cls[i] = h;
  }
  for (int round = 0; round < n; ++round) {
    std::vector<std::uint64_t> next(n);
    for (int i = 0; i < n; ++i) {
      std::vector<std::uint64_t> env;
      for (auto &x : m.neighbors(i))
        env.push_back(mix(static_cast<std::uint64_t>(m.bond(x.bond).order), cls[x.atom]));
      std::sort(env.begin(), env.end());
      std::uint64_t h = cls[i];
      for (auto e : env) h = mix(h, e);
      next[i] = h;
    }
    std::set<std::uint64_t> before(cls.begin(), cls.end()), after(next.begin(), next.end());
    cls = std::move(next);
    if (after.size() == before.size()) break;
  }
  return cls;
}

}  // namespace

bool isomorphic(const Molecule &a, const Molecule &b) {
  if (a.size() != b.size() || a.bonds().size() != b.bonds().size()) return false;
  const int n = static_cast<int>(a.size());
  auto ca = refined_classes(a), cb = refined_classes(b);
  {
    auto sa = ca, sb = cb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return false;
  }
  // Visit atoms of a in BFS order so each has a mapped neighbour where possible.
  std::vector<int> order;
  std::vector<char> seen(n, 0);
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    seen[s] = 1;
    order.push_back(s);
    for (std::size_t i = order.size() - 1; i < order.size(); ++i)
      for (auto &x : a.neighbors(order[i]))
        if (!seen[x.atom]) {
          seen[x.atom] = 1;
          order.push_back(x.atom);
        }
  }
  std::vector<int> map(n, -1), used(n, 0);
  std::function<bool(std::size_t)> extend = [&](std::size_t k) -> bool {
    if (k == order.size()) return true;
    int u = order[k];
    for (int v = 0; v < n; ++v) {
      if (used[v] || cb[v] != ca[u]) continue;
      bool ok = true;
      for (auto &x : a.neighbors(u)) {
        if (map[x.atom] < 0) continue;
        auto bb = b.bond_between(v, map[x.atom]);
        if (!bb || b.bond(*bb).order != a.bond(x.bond).order) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      map[u] = v;
      used[v] = 1;
      if (extend(k + 1)) return true;
      map[u] = -1;
      used[v] = 0;
    }
    return false;
  };
  return extend(0);
}

}  // namespace chemagent::molkit
