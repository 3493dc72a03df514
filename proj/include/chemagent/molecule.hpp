// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemagent/elements.hpp"

namespace chemagent::molkit {

enum class BondOrder : std::uint8_t { single = 1, double_ = 2, triple = 3, aromatic = 4 };

struct Atom {
  const Element *element = nullptr;
  int formal_charge = 0;
  std::optional<int> isotope;
  bool aromatic = false;
  std::optional<int> explicit_h;  // bracket-atom H count
  int implicit_h = 0;             // hydrogens carried by the atom (not H-atom neighbours)
  int index = 0;

  int atomic_number() const { return element->atomic_number; }
  const std::string &symbol() const { return element->symbol; }
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::single;

  int other(int atom) const { return atom == a ? b : a; }
};

struct Neighbor {
  int atom;
  int bond;
};

struct RingInfo {
  std::vector<std::vector<int>> rings;  // SSSR, atoms in cycle order
  std::vector<int> atom_ring_membership;
  std::vector<int> atom_smallest_ring;  // 0 when the atom is acyclic
  std::vector<int> bond_ring_membership;

  bool atom_in_ring_of_size(int atom, std::size_t size) const;
};

class MoleculeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class Molecule {
public:
  Molecule() = default;
  // Validates the graph and perceives rings.
  Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds, std::string source_text = {});

  const std::vector<Atom> &atoms() const { return atoms_; }
  const std::vector<Bond> &bonds() const { return bonds_; }
  const Atom &atom(int i) const { return atoms_[i]; }
  const Bond &bond(int i) const { return bonds_[i]; }
  const RingInfo &rings() const { return rings_; }
  const std::string &source_text() const { return source_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  std::span<const Neighbor> neighbors(int atom) const { return adjacency_[atom]; }
  int degree(int atom) const { return static_cast<int>(adjacency_[atom].size()); }
  std::optional<int> bond_between(int a, int b) const;

  // implicit_h plus explicit hydrogen-atom neighbours.
  int total_h(int atom) const;
  // Neighbours other than hydrogen atoms.
  int heavy_degree(int atom) const;
  bool is_hydrogen(int atom) const { return atoms_[atom].atomic_number() == 1; }
  bool bond_in_ring(int bond) const { return rings_.bond_ring_membership[bond] > 0; }
  int component_count() const { return components_; }

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  RingInfo rings_;
  std::string source_;
  int components_ = 0;
};

RingInfo perceive_rings(const Molecule &m);

class KekuleError : public std::runtime_error {
public:
  KekuleError(const std::string &what, std::vector<int> ring_system)
      : std::runtime_error(what), ring_system(std::move(ring_system)) {}
  std::vector<int> ring_system;
};

// Bond sum counting aromatic bonds as 1, plus implicit hydrogens.
int valence_sum(const Molecule &m, int atom);
// True when an aromatic atom must take one double bond in a Kekule structure.
bool needs_pi_bond(const Molecule &m, int atom);
// SMARTS-style total valence: Kekule bond orders plus hydrogens.
int total_valence(const Molecule &m, int atom);

Molecule kekulize(const Molecule &m);

// Every implicit hydrogen becomes an explicit H atom joined by a single bond.
Molecule add_hydrogens(const Molecule &m);

// Attribute-preserving graph isomorphism (element, charge, isotope, aromatic,
// total H, bond order).
bool isomorphic(const Molecule &a, const Molecule &b);

}  // namespace chemagent::molkit
