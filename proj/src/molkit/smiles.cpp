// SPDX-License-Identifier: Apache-2.0
#include "chemagent/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <optional>
#include <vector>

namespace chemagent::molkit {

int default_implicit_h(const Element &e, bool aromatic, int bond_sum) {
  for (int v : e.default_valences)
    if (v >= bond_sum) {
      int h = v - bond_sum;
      if (aromatic) h = std::max(0, h - 1);
      return h;
    }
  return -1;
}

namespace {

struct RawAtom {
  Atom atom;
  bool bracket = false;
  std::size_t pos = 0;
};

struct RawBond {
  int a, b;
  BondOrder order;
  bool implicit;
};

// gcc 11 misreads copies of optional<enum> in the parser below
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"

struct RingOpen {
  int atom;
  std::optional<BondOrder> order;
  bool symbol = false;
  std::size_t pos;
};

class SmilesReader {
public:
  explicit SmilesReader(std::string_view s) : s_(s) {}

  Molecule read() {
    if (s_.empty()) throw SmilesError("empty SMILES", 0);
    const PeriodicTable &pt = PeriodicTable::standard();
    int prev = -1;
    std::vector<std::pair<int, std::size_t>> branches;
    std::map<int, RingOpen> rings;
    std::optional<BondOrder> bond;
    bool bond_symbol = false;
    std::size_t bond_pos = 0;

    auto take_bond = [&]() {
      auto b = bond;
      bool had = bond_symbol;
      bond.reset();
      bond_symbol = false;
      return std::pair{b, had};
    };

    while (i_ < s_.size()) {
      const char c = s_[i_];
      const std::size_t here = i_;
      if (c == '(') {
        if (prev < 0) throw SmilesError("branch without a preceding atom", here);
        if (bond_symbol) throw SmilesError("bond symbol before branch", bond_pos);
        branches.emplace_back(prev, here);
        ++i_;
      } else if (c == ')') {
        if (branches.empty()) throw SmilesError("unbalanced parenthesis", here);
        if (bond_symbol) throw SmilesError("bond symbol without a following atom", bond_pos);
        if (s_.substr(branches.back().second, here - branches.back().second) == "(")
          throw SmilesError("empty branch", here);
        prev = branches.back().first;
        branches.pop_back();
        ++i_;
      } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\' ||
                 c == '$') {
        if (bond_symbol) throw SmilesError("consecutive bond symbols", here);
        if (prev < 0) throw SmilesError("bond symbol without a preceding atom", here);
        if (c == '$') throw SmilesError("quadruple bonds are not supported", here);
        bond = c == '=' ? BondOrder::double_
             : c == '#' ? BondOrder::triple
             : c == ':' ? BondOrder::aromatic
                        : BondOrder::single;
        bond_symbol = true;
        bond_pos = here;
        ++i_;
      } else if (c == '.') {
        if (bond_symbol) throw SmilesError("bond symbol before '.'", bond_pos);
        if (prev < 0) throw SmilesError("'.' without a preceding atom", here);
        if (!branches.empty()) throw SmilesError("'.' inside a branch", here);
        prev = -1;
        ++i_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0) throw SmilesError("ring-closure digit without a preceding atom", here);
        int num = ring_number();
        auto [order, had] = take_bond();
        auto it = rings.find(num);
        if (it == rings.end()) {
          rings[num] = RingOpen{prev, order, had, here};
        } else {
          RingOpen open = it->second;
          rings.erase(it);
          if (open.atom == prev) throw SmilesError("ring closure to the same atom", here);
          if (had && open.symbol && order != open.order)
            throw SmilesError("conflicting ring-closure bond symbols", here);
          auto o = had ? order : open.order;
          add_bond(open.atom, prev, o, here);
        }
      } else if (c == '[') {
        int idx = add_atom(bracket_atom(pt), here);
        auto [order, had] = take_bond();
        if (prev >= 0) add_bond(prev, idx, had ? order : std::nullopt, here);
        prev = idx;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '*') {
        int idx = add_atom(organic_atom(pt), here);
        auto [order, had] = take_bond();
        if (prev >= 0) add_bond(prev, idx, had ? order : std::nullopt, here);
        prev = idx;
      } else {
        throw SmilesError(std::string("unexpected character '") + printable(c) + "'", here);
      }
    }
    if (!branches.empty()) throw SmilesError("unbalanced parenthesis", branches.back().second);
    if (bond_symbol) throw SmilesError("bond symbol without a following atom", bond_pos);
    if (!rings.empty()) {
      auto &[num, open] = *rings.begin();
      throw SmilesError("unmatched ring-closure digit " + std::to_string(num), open.pos);
    }
    return build();
  }

private:
  static std::string printable(char c) {
    if (std::isprint(static_cast<unsigned char>(c))) return std::string(1, c);
    char buf[8];
    std::snprintf(buf, sizeof buf, "\\x%02x", static_cast<unsigned char>(c));
    return buf;
  }

  int ring_number() {
    if (s_[i_] == '%') {
      std::size_t start = i_++;
      if (i_ + 1 < s_.size() + 0 && std::isdigit(static_cast<unsigned char>(s_[i_])) &&
          std::isdigit(static_cast<unsigned char>(s_[i_ + 1]))) {
        int v = (s_[i_] - '0') * 10 + (s_[i_ + 1] - '0');
        i_ += 2;
        return v;
      }
      throw SmilesError("'%' must be followed by two digits", start);
    }
    return s_[i_++] - '0';
  }

  int add_atom(Atom a, std::size_t pos) {
    atoms_.push_back({std::move(a), bracket_, pos});
    bracket_ = false;
    return static_cast<int>(atoms_.size()) - 1;
  }

  void add_bond(int a, int b, std::optional<BondOrder> order, std::size_t pos) {
    for (auto &x : bonds_)
      if ((x.a == a && x.b == b) || (x.a == b && x.b == a))
        throw SmilesError("duplicate bond", pos);
    if (order) {
      bonds_.push_back({a, b, *order, false});
    } else {
      bool arom = atoms_[a].atom.aromatic && atoms_[b].atom.aromatic;
      bonds_.push_back({a, b, arom ? BondOrder::aromatic : BondOrder::single, true});
    }
  }

  Atom organic_atom(const PeriodicTable &pt) {
    const std::size_t start = i_;
    const char c = s_[i_];
    std::string sym;
    bool aromatic = false;
    if (c == 'C' && i_ + 1 < s_.size() && s_[i_ + 1] == 'l') {
      sym = "Cl";
    } else if (c == 'B' && i_ + 1 < s_.size() && s_[i_ + 1] == 'r') {
      sym = "Br";
    } else if (std::string_view("BCNOPSFI").find(c) != std::string_view::npos) {
      sym = std::string(1, c);
    } else if (std::string_view("bcnops").find(c) != std::string_view::npos) {
      sym = std::string(1, static_cast<char>(std::toupper(c)));
      aromatic = true;
    } else {
      throw SmilesError(std::string("unknown atom symbol '") + printable(c) + "'", start);
    }
    i_ += sym.size();
    Atom a;
    a.element = pt.by_symbol(sym);
    a.aromatic = aromatic;
    return a;
  }

  std::optional<int> number() {
    if (i_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_]))) return std::nullopt;
    long v = 0;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      v = v * 10 + (s_[i_] - '0');
      if (v > 100000) throw SmilesError("number too large", i_);
      ++i_;
    }
    return static_cast<int>(v);
  }

  Atom bracket_atom(const PeriodicTable &pt) {
    const std::size_t open = i_++;
    bracket_ = true;
    Atom a;
    const std::size_t iso_pos = i_;
    if (auto iso = number()) {
      if (*iso == 0) throw SmilesError("isotope syntax error", iso_pos);
      a.isotope = *iso;
    }
    if (i_ >= s_.size()) throw SmilesError("unterminated bracket atom", open);
    const std::size_t sym_pos = i_;
    const char c = s_[i_];
    if (std::isupper(static_cast<unsigned char>(c))) {
      const Element *e = nullptr;
      if (i_ + 1 < s_.size() && std::islower(static_cast<unsigned char>(s_[i_ + 1])))
        e = pt.by_symbol(s_.substr(i_, 2));
      if (e) {
        i_ += 2;
      } else {
        e = pt.by_symbol(s_.substr(i_, 1));
        if (!e) throw SmilesError("unknown atom symbol", sym_pos);
        ++i_;
      }
      a.element = e;
    } else if (std::islower(static_cast<unsigned char>(c))) {
      static const char *two[] = {"se", "as", "te"};
      std::string sym;
      for (const char *t : two)
        if (s_.substr(i_, 2) == t) sym = t;
      if (sym.empty() && std::string_view("bcnops").find(c) != std::string_view::npos)
        sym = std::string(1, c);
      if (sym.empty()) throw SmilesError("unknown atom symbol", sym_pos);
      i_ += sym.size();
      sym[0] = static_cast<char>(std::toupper(sym[0]));
      a.element = pt.by_symbol(sym);
      a.aromatic = true;
    } else if (c == '*') {
      throw SmilesError("wildcard atoms are not supported", sym_pos);
    } else {
      throw SmilesError("unknown atom symbol", sym_pos);
    }
    if (a.isotope && !pt.isotope_mass(a.element->atomic_number, *a.isotope))
      throw SmilesError("isotope syntax error: unknown isotope", iso_pos);
    // chirality is accepted and dropped
    if (i_ < s_.size() && s_[i_] == '@') {
      ++i_;
      if (i_ < s_.size() && s_[i_] == '@') {
        ++i_;
      } else {
        while (i_ < s_.size() && std::isupper(static_cast<unsigned char>(s_[i_])) &&
               s_[i_] != 'H')
          ++i_;
        number();
      }
    }
    a.explicit_h = 0;
    if (i_ < s_.size() && s_[i_] == 'H') {
      ++i_;
      a.explicit_h = number().value_or(1);
    }
    if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) {
      const char sign = s_[i_];
      const std::size_t charge_pos = i_++;
      int mag = 1;
      if (auto n = number()) {
        mag = *n;
      } else {
        while (i_ < s_.size() && s_[i_] == sign) {
          ++mag;
          ++i_;
        }
      }
      if (mag > 15) throw SmilesError("charge syntax error: magnitude too large", charge_pos);
      a.formal_charge = sign == '+' ? mag : -mag;
    }
    if (i_ < s_.size() && s_[i_] == ':') {
      ++i_;
      if (!number()) throw SmilesError("atom class syntax error", i_);
    }
    if (i_ >= s_.size()) throw SmilesError("unterminated bracket atom", open);
    if (s_[i_] != ']') {
      const char bad = s_[i_];
      if (std::isdigit(static_cast<unsigned char>(bad)))
        throw SmilesError("isotope syntax error: mass number must precede the symbol", i_);
      if (bad == '+' || bad == '-') throw SmilesError("charge syntax error", i_);
      throw SmilesError("malformed bracket atom", i_);
    }
    ++i_;
    a.implicit_h = *a.explicit_h;
    return a;
  }

  Molecule build() {
    std::vector<int> sum(atoms_.size(), 0);
    for (auto &b : bonds_) {
      int o = b.order == BondOrder::aromatic ? 1 : static_cast<int>(b.order);
      sum[b.a] += o;
      sum[b.b] += o;
    }
    std::vector<Atom> atoms;
    atoms.reserve(atoms_.size());
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
      Atom a = atoms_[k].atom;
      if (!atoms_[k].bracket) {
        int h = default_implicit_h(*a.element, a.aromatic, sum[k]);
        if (h < 0)
          throw SmilesError("valence overflow on " + a.element->symbol + " (bond order sum " +
                                std::to_string(sum[k]) + ")",
                            atoms_[k].pos);
        a.implicit_h = h;
      }
      atoms.push_back(a);
    }
    std::vector<Bond> bonds;
    for (auto &b : bonds_) bonds.push_back({b.a, b.b, b.order});
    Molecule m = make(atoms, bonds);
    // Implicit bonds between aromatic atoms are aromatic only inside rings.
    bool changed = false;
    for (std::size_t k = 0; k < bonds_.size(); ++k)
      if (bonds_[k].implicit && bonds[k].order == BondOrder::aromatic &&
          !m.bond_in_ring(static_cast<int>(k))) {
        bonds[k].order = BondOrder::single;
        changed = true;
      }
    if (changed) m = make(atoms, bonds);
    for (int k = 0; k < static_cast<int>(m.size()); ++k)
      if (m.atom(k).aromatic && m.rings().atom_ring_membership[k] == 0)
        throw SmilesError("non-ring atom marked aromatic", atoms_[k].pos);
    return m;
  }

  Molecule make(const std::vector<Atom> &atoms, const std::vector<Bond> &bonds) {
    try {
      return Molecule(atoms, bonds, std::string(s_));
    } catch (const MoleculeError &e) {
      throw SmilesError(e.what(), s_.size());
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
  bool bracket_ = false;
  std::vector<RawAtom> atoms_;
  std::vector<RawBond> bonds_;
};

}  // namespace

Molecule parse_smiles(std::string_view text) { return SmilesReader(text).read(); }

namespace {

class SmilesWriter {
public:
  explicit SmilesWriter(const Molecule &m) : m_(m) {}

  std::string write() {
    const int n = static_cast<int>(m_.size());
    visited_.assign(n, 0);
    children_.assign(n, {});
    opens_.assign(n, {});
    closes_.assign(n, {});
    closure_bond_.assign(m_.bonds().size(), 0);
    std::vector<int> roots;
    for (int s = 0; s < n; ++s)
      if (!visited_[s]) {
        roots.push_back(s);
        plan(s, -1);
      }
    std::string out;
    for (std::size_t r = 0; r < roots.size(); ++r) {
      if (r) out += '.';
      emit(roots[r], out);
    }
    return out;
  }

private:
  void plan(int u, int parent_bond) {
    visited_[u] = 1;
    for (auto &x : m_.neighbors(u)) {
      if (x.bond == parent_bond || closure_bond_[x.bond]) continue;
      if (!visited_[x.atom]) {
        children_[u].push_back(x);
        plan(x.atom, x.bond);
      } else if (visited_[x.atom] == 1) {
        // back edge to an ancestor still on the stack
        closure_bond_[x.bond] = 1;
        opens_[x.atom].push_back(x.bond);
        closes_[u].push_back(x.bond);
      }
    }
    visited_[u] = 2;
  }

  std::string bond_symbol(int bond) const {
    const Bond &b = m_.bond(bond);
    const bool arom = m_.atom(b.a).aromatic && m_.atom(b.b).aromatic;
    switch (b.order) {
      case BondOrder::single: return arom ? "-" : "";
      case BondOrder::double_: return "=";
      case BondOrder::triple: return "#";
      case BondOrder::aromatic: return m_.bond_in_ring(bond) ? "" : ":";
    }
    return "";
  }

  std::string atom_text(int i) const {
    const Atom &a = m_.atom(i);
    std::string sym = a.symbol();
    if (a.aromatic) sym[0] = static_cast<char>(std::tolower(sym[0]));
    bool bare = a.element->organic_subset && a.formal_charge == 0 && !a.isotope;
    if (bare && a.aromatic && std::string_view("bcnops").find(sym) == std::string_view::npos)
      bare = false;
    if (bare) {
      int sum = 0;
      for (auto &x : m_.neighbors(i)) {
        auto o = m_.bond(x.bond).order;
        sum += o == BondOrder::aromatic ? 1 : static_cast<int>(o);
      }
      bare = default_implicit_h(*a.element, a.aromatic, sum) == a.implicit_h;
    }
    if (bare) return sym;
    std::string out = "[";
    if (a.isotope) out += std::to_string(*a.isotope);
    out += sym;
    if (a.implicit_h > 0) {
      out += 'H';
      if (a.implicit_h > 1) out += std::to_string(a.implicit_h);
    }
    if (a.formal_charge) {
      out += a.formal_charge > 0 ? '+' : '-';
      if (std::abs(a.formal_charge) > 1) out += std::to_string(std::abs(a.formal_charge));
    }
    out += ']';
    return out;
  }

  std::string ring_label(int num) const {
    if (num < 10) return std::to_string(num);
    return "%" + std::to_string(num);
  }

  int take_digit() {
    for (int d = 1;; ++d)
      if (!in_use_.count(d)) {
        in_use_.insert(d);
        return d;
      }
  }

  void emit(int u, std::string &out) {
    out += atom_text(u);
    for (int b : closes_[u]) {
      int d = digit_of_.at(b);
      out += ring_label(d);
      in_use_.erase(d);
    }
    for (int b : opens_[u]) {
      int d = take_digit();
      digit_of_[b] = d;
      out += bond_symbol(b) + ring_label(d);
    }
    const auto &kids = children_[u];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const bool branch = k + 1 < kids.size();
      if (branch) out += '(';
      out += bond_symbol(kids[k].bond);
      emit(kids[k].atom, out);
      if (branch) out += ')';
    }
  }

  const Molecule &m_;
  std::vector<int> visited_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<std::vector<int>> opens_, closes_;
  std::vector<char> closure_bond_;
  std::map<int, int> digit_of_;
  std::set<int> in_use_;
};

}  // namespace

std::string write_smiles(const Molecule &m) { return SmilesWriter(m).write(); }

}  // namespace chemagent::molkit
