// SPDX-License-Identifier: Apache-2.0
// SMARTS subset: atom/bond primitives with ! & , ; logic, branches and ring
// closures. See docs/smarts-subset.md for the grammar.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chemagent/molecule.hpp"

namespace chemagent::molkit {

class SmartsError : public std::runtime_error {
public:
  SmartsError(const std::string &reason, std::size_t position)
      : std::runtime_error(reason + " at position " + std::to_string(position)),
        reason(reason),
        position(position) {}
  std::string reason;
  std::size_t position;
};

// Raised for syntax that is valid Daylight SMARTS but outside the subset.
class SmartsUnsupported : public SmartsError {
public:
  SmartsUnsupported(const std::string &feature, std::size_t position)
      : SmartsError("unsupported SMARTS feature: " + feature, position), feature(feature) {}
  std::string feature;
};

enum class AtomPrim : std::uint8_t {
  any,           // *
  aromatic,      // a
  aliphatic,     // A
  atomic_number, // #n, also bare element symbols
  element,       // symbol with aromaticity: value = Z, flag = aromatic
  degree,        // Dn
  total_h,       // Hn
  implicit_h,    // hn
  connectivity,  // Xn
  ring_count,    // Rn
  in_ring,       // R or r without a number
  smallest_ring, // rn
  ring_bonds,    // xn
  valence,       // vn
  charge,        // +n / -n
  isotope,       // leading mass number
};

struct AtomExpr {
  enum class Op : std::uint8_t { prim, not_, and_, or_ };
  Op op = Op::prim;
  AtomPrim prim = AtomPrim::any;
  int value = 0;
  bool flag = false;
  std::vector<AtomExpr> kids;
};

enum class BondPrim : std::uint8_t { single, double_, triple, aromatic, any, ring, implicit };

struct BondExpr {
  enum class Op : std::uint8_t { prim, not_, and_, or_ };
  Op op = Op::prim;
  BondPrim prim = BondPrim::implicit;
  std::vector<BondExpr> kids;
};

struct PatternEdge {
  int a;
  int b;
  BondExpr expr;
};

class Pattern {
public:
  std::vector<AtomExpr> nodes;
  std::vector<PatternEdge> edges;
  std::string source_text;

  std::size_t size() const { return nodes.size(); }
};

Pattern parse_smarts(std::string_view text);

// Per-atom values the primitives read, computed once per molecule.
class MatchTarget {
public:
  explicit MatchTarget(const Molecule &m);

  const Molecule &mol() const { return *mol_; }
  struct Facts {
    int degree, total_h, implicit_h, connectivity, ring_count, smallest_ring, ring_bonds,
        valence;
  };
  const Facts &facts(int atom) const { return facts_[atom]; }

private:
  const Molecule *mol_;
  std::vector<Facts> facts_;
};

struct MatchSet {
  std::vector<std::vector<int>> mappings;  // pattern node -> atom
  std::size_t unique_atom_sets = 0;
};

bool atom_matches(const AtomExpr &e, const MatchTarget &t, int atom);
bool bond_matches(const BondExpr &e, const MatchTarget &t, int bond);

MatchSet match(const Pattern &p, const MatchTarget &t);
MatchSet match(const Pattern &p, const Molecule &m);
bool matches_any(const Pattern &p, const MatchTarget &t);
// Mappings with pattern node 0 fixed on `atom`.
bool match_anchored(const Pattern &p, const MatchTarget &t, int atom);
std::vector<std::vector<int>> match_anchored_all(const Pattern &p, const MatchTarget &t,
                                                 int atom);
// True when `count` matches exist whose atom sets are pairwise disjoint.
bool has_disjoint_matches(const Pattern &p, const MatchTarget &t, int count);

}  // namespace chemagent::molkit
