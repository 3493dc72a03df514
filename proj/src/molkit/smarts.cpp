// SPDX-License-Identifier: Apache-2.0
#include "chemagent/smarts.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>

namespace chemagent::molkit {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }

AtomExpr prim(AtomPrim p, int value = 0, bool flag = false) {
  AtomExpr e;
  e.prim = p;
  e.value = value;
  e.flag = flag;
  return e;
}

BondExpr bprim(BondPrim p) {
  BondExpr e;
  e.prim = p;
  return e;
}

template <class Expr>
Expr combine(typename Expr::Op op, std::vector<Expr> kids) {
  if (kids.size() == 1) return std::move(kids.front());
  Expr e;
  e.op = op;
  e.kids = std::move(kids);
  return e;
}

constexpr std::string_view kBondChars = "-=#:~@!&,;/\\";

class SmartsReader {
public:
  explicit SmartsReader(std::string_view s) : s_(s), pt_(PeriodicTable::standard()) {}

  Pattern read() {
    if (s_.empty()) throw SmartsError("empty SMARTS", 0);
    if (s_[0] == '(') throw SmartsUnsupported("component grouping", 0);
    Pattern p;
    p.source_text = std::string(s_);
    int prev = -1;
    std::vector<std::pair<int, std::size_t>> branches;
    struct Open {
      int node;
      std::optional<BondExpr> bond;
      std::string bond_text;
      std::size_t pos;
    };
    std::map<int, Open> rings;
    std::optional<BondExpr> bond;
    std::string bond_text;
    std::size_t bond_pos = 0;

    auto link = [&](int a, int b, std::optional<BondExpr> e) {
      for (auto &x : p.edges)
        if ((x.a == a && x.b == b) || (x.a == b && x.b == a))
          throw SmartsError("duplicate bond", i_);
      p.edges.push_back({a, b, e ? std::move(*e) : bprim(BondPrim::implicit)});
    };

    while (i_ < s_.size()) {
      const char c = s_[i_];
      const std::size_t here = i_;
      if (c == '(') {
        if (prev < 0) throw SmartsError("branch without a preceding atom", here);
        if (bond) throw SmartsError("bond before branch", bond_pos);
        branches.emplace_back(prev, here);
        ++i_;
      } else if (c == ')') {
        if (branches.empty()) throw SmartsError("unbalanced parenthesis", here);
        if (bond) throw SmartsError("bond without a following atom", bond_pos);
        prev = branches.back().first;
        branches.pop_back();
        ++i_;
      } else if (c == '.') {
        throw SmartsUnsupported("disconnected patterns ('.')", here);
      } else if (c == '>') {
        throw SmartsUnsupported("reaction SMARTS", here);
      } else if (kBondChars.find(c) != std::string_view::npos) {
        if (prev < 0) throw SmartsError("bond without a preceding atom", here);
        if (bond) throw SmartsError("consecutive bond expressions", here);
        bond = bond_low();
        bond_text = std::string(s_.substr(here, i_ - here));
        bond_pos = here;
      } else if (is_digit(c) || c == '%') {
        if (prev < 0) throw SmartsError("ring closure without a preceding atom", here);
        int num = ring_number();
        auto it = rings.find(num);
        if (it == rings.end()) {
          rings[num] = Open{prev, std::move(bond), bond_text, here};
        } else {
          Open open = std::move(it->second);
          rings.erase(it);
          if (open.node == prev) throw SmartsError("ring closure to the same atom", here);
          if (bond && open.bond && bond_text != open.bond_text)
            throw SmartsError("conflicting ring-closure bonds", here);
          link(open.node, prev, bond ? std::move(bond) : std::move(open.bond));
        }
        bond.reset();
        bond_text.clear();
      } else if (c == '[' || c == '*' || std::isalpha(static_cast<unsigned char>(c))) {
        AtomExpr e = c == '[' ? bracket_atom() : bare_atom();
        p.nodes.push_back(std::move(e));
        int idx = static_cast<int>(p.nodes.size()) - 1;
        if (prev >= 0) link(prev, idx, std::move(bond));
        bond.reset();
        bond_text.clear();
        prev = idx;
      } else {
        throw SmartsError(std::string("unexpected character '") + c + "'", here);
      }
    }
    if (!branches.empty()) throw SmartsError("unbalanced parenthesis", branches.back().second);
    if (bond) throw SmartsError("bond without a following atom", bond_pos);
    if (!rings.empty())
      throw SmartsError("unmatched ring-closure digit " + std::to_string(rings.begin()->first),
                        rings.begin()->second.pos);
    return p;
  }

private:
  bool at_end() const { return i_ >= s_.size(); }
  char peek(std::size_t k = 0) const { return i_ + k < s_.size() ? s_[i_ + k] : '\0'; }

  int ring_number() {
    if (s_[i_] == '%') {
      std::size_t start = i_++;
      if (is_digit(peek()) && is_digit(peek(1))) {
        int v = (peek() - '0') * 10 + (peek(1) - '0');
        i_ += 2;
        return v;
      }
      throw SmartsError("'%' must be followed by two digits", start);
    }
    return s_[i_++] - '0';
  }

  std::optional<int> number() {
    if (!is_digit(peek())) return std::nullopt;
    int v = 0;
    while (is_digit(peek())) {
      v = v * 10 + (s_[i_++] - '0');
      if (v > 10000) throw SmartsError("number too large", i_);
    }
    return v;
  }

  AtomExpr bare_atom() {
    const std::size_t start = i_;
    const char c = s_[i_];
    if (c == '*') { ++i_; return prim(AtomPrim::any); }
    if (c == 'a') { ++i_; return prim(AtomPrim::aromatic); }
    if (c == 'A') { ++i_; return prim(AtomPrim::aliphatic); }
    if (c == 'C' && peek(1) == 'l') { i_ += 2; return element("Cl", false); }
    if (c == 'B' && peek(1) == 'r') { i_ += 2; return element("Br", false); }
    if (std::string_view("BCNOPSFI").find(c) != std::string_view::npos) {
      ++i_;
      return element(std::string(1, c), false);
    }
    if (std::string_view("bcnops").find(c) != std::string_view::npos) {
      ++i_;
      return element(std::string(1, static_cast<char>(std::toupper(c))), true);
    }
    throw SmartsError(std::string("unknown atom symbol '") + c + "'", start);
  }

  AtomExpr element(const std::string &sym, bool aromatic) {
    const Element *e = pt_.by_symbol(sym);
    if (!e) throw SmartsError("unknown element " + sym, i_);
    return prim(AtomPrim::element, e->atomic_number, aromatic);
  }

  AtomExpr bracket_atom() {
    open_ = i_++;
    first_prim_ = true;
    AtomExpr e = atom_low();
    if (at_end()) throw SmartsError("unterminated bracket atom", open_);
    if (peek() != ']') throw SmartsError("unexpected character in bracket atom", i_);
    ++i_;
    return e;
  }

  AtomExpr atom_low() {
    std::vector<AtomExpr> kids{atom_or()};
    while (peek() == ';') {
      ++i_;
      kids.push_back(atom_or());
    }
    return combine(AtomExpr::Op::and_, std::move(kids));
  }

  AtomExpr atom_or() {
    std::vector<AtomExpr> kids{atom_and()};
    while (peek() == ',') {
      ++i_;
      kids.push_back(atom_and());
    }
    return combine(AtomExpr::Op::or_, std::move(kids));
  }

  AtomExpr atom_and() {
    std::vector<AtomExpr> kids{atom_not()};
    while (!at_end()) {
      char c = peek();
      if (c == '&') {
        ++i_;
      } else if (c == ',' || c == ';' || c == ']') {
        break;
      }
      kids.push_back(atom_not());
    }
    return combine(AtomExpr::Op::and_, std::move(kids));
  }

  AtomExpr atom_not() {
    if (peek() == '!') {
      ++i_;
      AtomExpr e;
      e.op = AtomExpr::Op::not_;
      e.kids.push_back(atom_not());
      return e;
    }
    AtomExpr e = atom_prim();
    first_prim_ = false;
    return e;
  }

  // H directly after '[' (and an optional mass number) names the hydrogen atom
  // when nothing but a charge or ']' follows.
  bool hydrogen_atom_here() const {
    if (peek() != 'H' || !first_prim_) return false;
    const char n = peek(1);
    return n == ']' || n == '+' || n == '-' || n == ':';
  }

  AtomExpr counted(AtomPrim p, int bare) {
    ++i_;
    return prim(p, number().value_or(bare));
  }

  AtomExpr atom_prim() {
    if (at_end()) throw SmartsError("unterminated bracket atom", open_);
    const std::size_t here = i_;
    const char c = peek();
    if (c == '$') throw SmartsUnsupported("recursive SMARTS $(...)", here);
    if (c == '@') throw SmartsUnsupported("chirality", here);
    if (is_digit(c)) {
      int iso = *number();
      first_prim_ = true;  // [2H] keeps H as the element
      AtomExpr e = prim(AtomPrim::isotope, iso);
      if (hydrogen_atom_here()) {
        ++i_;
        return combine(AtomExpr::Op::and_,
                       std::vector<AtomExpr>{e, prim(AtomPrim::element, 1, false)});
      }
      return e;
    }
    if (c == '*') { ++i_; return prim(AtomPrim::any); }
    if (c == '#') {
      ++i_;
      auto n = number();
      if (!n) throw SmartsError("'#' needs an atomic number", here);
      return prim(AtomPrim::atomic_number, *n);
    }
    if (c == '+' || c == '-') {
      ++i_;
      int mag = 1;
      if (auto n = number()) {
        mag = *n;
      } else {
        while (peek() == c) {
          ++mag;
          ++i_;
        }
      }
      return prim(AtomPrim::charge, c == '+' ? mag : -mag);
    }
    if (c == ':') {
      ++i_;
      if (!number()) throw SmartsError("atom map needs a number", here);
      return prim(AtomPrim::any);
    }
    if (is_lower(c)) {
      for (std::string_view two : {"se", "as", "te"})
        if (s_.substr(i_, 2) == two) {
          i_ += 2;
          std::string sym(two);
          sym[0] = static_cast<char>(std::toupper(sym[0]));
          return element(sym, true);
        }
      switch (c) {
        case 'a': ++i_; return prim(AtomPrim::aromatic);
        case 'h': return counted(AtomPrim::implicit_h, -1);
        case 'x': return counted(AtomPrim::ring_bonds, -1);
        case 'v': return counted(AtomPrim::valence, 1);
        case 'r': {
          ++i_;
          if (auto n = number()) return prim(AtomPrim::smallest_ring, *n);
          return prim(AtomPrim::in_ring);
        }
        default: break;
      }
      if (std::string_view("bcnops").find(c) != std::string_view::npos) {
        ++i_;
        return element(std::string(1, static_cast<char>(std::toupper(c))), true);
      }
      throw SmartsError(std::string("unknown primitive '") + c + "'", here);
    }
    if (is_upper(c)) {
      if (hydrogen_atom_here()) {
        ++i_;
        return prim(AtomPrim::element, 1, false);
      }
      if (is_lower(peek(1))) {
        if (const Element *e = pt_.by_symbol(s_.substr(i_, 2))) {
          i_ += 2;
          return prim(AtomPrim::element, e->atomic_number, false);
        }
      }
      switch (c) {
        case 'A': ++i_; return prim(AtomPrim::aliphatic);
        case 'D': return counted(AtomPrim::degree, 1);
        case 'H': return counted(AtomPrim::total_h, 1);
        case 'X': return counted(AtomPrim::connectivity, 1);
        case 'R': {
          ++i_;
          if (auto n = number()) return prim(AtomPrim::ring_count, *n);
          return prim(AtomPrim::in_ring);
        }
        default: break;
      }
      if (const Element *e = pt_.by_symbol(s_.substr(i_, 1))) {
        ++i_;
        return prim(AtomPrim::element, e->atomic_number, false);
      }
      throw SmartsError(std::string("unknown atom symbol '") + c + "'", here);
    }
    throw SmartsError(std::string("unexpected character '") + c + "' in bracket atom", here);
  }

  bool bond_continues() const {
    return !at_end() && kBondChars.find(peek()) != std::string_view::npos;
  }

  BondExpr bond_low() {
    std::vector<BondExpr> kids{bond_or()};
    while (peek() == ';') {
      ++i_;
      kids.push_back(bond_or());
    }
    return combine(BondExpr::Op::and_, std::move(kids));
  }

  BondExpr bond_or() {
    std::vector<BondExpr> kids{bond_and()};
    while (peek() == ',') {
      ++i_;
      kids.push_back(bond_and());
    }
    return combine(BondExpr::Op::or_, std::move(kids));
  }

  BondExpr bond_and() {
    std::vector<BondExpr> kids{bond_not()};
    while (bond_continues()) {
      char c = peek();
      if (c == '&') {
        ++i_;
      } else if (c == ',' || c == ';') {
        break;
      }
      kids.push_back(bond_not());
    }
    return combine(BondExpr::Op::and_, std::move(kids));
  }

  BondExpr bond_not() {
    if (peek() == '!') {
      ++i_;
      BondExpr e;
      e.op = BondExpr::Op::not_;
      e.kids.push_back(bond_not());
      return e;
    }
    const std::size_t here = i_;
    switch (peek()) {
      case '-': ++i_; return bprim(BondPrim::single);
      case '=': ++i_; return bprim(BondPrim::double_);
      case '#': ++i_; return bprim(BondPrim::triple);
      case ':': ++i_; return bprim(BondPrim::aromatic);
      case '~': ++i_; return bprim(BondPrim::any);
      case '@': ++i_; return bprim(BondPrim::ring);
      case '/':
      case '\\': throw SmartsUnsupported("directional bonds", here);
      default: break;
    }
    throw SmartsError("bond expression expected", here);
  }

  std::string_view s_;
  const PeriodicTable &pt_;
  std::size_t i_ = 0;
  std::size_t open_ = 0;
  bool first_prim_ = false;
};

bool eval_prim(const AtomExpr &e, const MatchTarget &t, int atom) {
  const Atom &a = t.mol().atom(atom);
  const auto &f = t.facts(atom);
  switch (e.prim) {
    case AtomPrim::any: return true;
    case AtomPrim::aromatic: return a.aromatic;
    case AtomPrim::aliphatic: return !a.aromatic;
    case AtomPrim::atomic_number: return a.atomic_number() == e.value;
    case AtomPrim::element: return a.atomic_number() == e.value && a.aromatic == e.flag;
    case AtomPrim::degree: return f.degree == e.value;
    case AtomPrim::total_h: return f.total_h == e.value;
    case AtomPrim::implicit_h: return e.value < 0 ? f.implicit_h > 0 : f.implicit_h == e.value;
    case AtomPrim::connectivity: return f.connectivity == e.value;
    case AtomPrim::ring_count: return f.ring_count == e.value;
    case AtomPrim::in_ring: return f.ring_count > 0;
    case AtomPrim::smallest_ring: return f.smallest_ring == e.value;
    case AtomPrim::ring_bonds: return e.value < 0 ? f.ring_bonds > 0 : f.ring_bonds == e.value;
    case AtomPrim::valence: return f.valence == e.value;
    case AtomPrim::charge: return a.formal_charge == e.value;
    case AtomPrim::isotope: return a.isotope && *a.isotope == e.value;
  }
  return false;
}

}  // namespace

Pattern parse_smarts(std::string_view text) { return SmartsReader(text).read(); }

MatchTarget::MatchTarget(const Molecule &m) : mol_(&m) {
  facts_.resize(m.size());
  const auto &ri = m.rings();
  for (int i = 0; i < static_cast<int>(m.size()); ++i) {
    Facts &f = facts_[i];
    f.degree = m.degree(i);
    f.total_h = m.total_h(i);
    f.implicit_h = m.atom(i).implicit_h;
    f.connectivity = f.degree + f.implicit_h;
    f.ring_count = ri.atom_ring_membership[i];
    f.smallest_ring = ri.atom_smallest_ring[i];
    f.ring_bonds = 0;
    for (auto &x : m.neighbors(i))
      if (m.bond_in_ring(x.bond)) ++f.ring_bonds;
    f.valence = total_valence(m, i);
  }
}

bool atom_matches(const AtomExpr &e, const MatchTarget &t, int atom) {
  switch (e.op) {
    case AtomExpr::Op::prim: return eval_prim(e, t, atom);
    case AtomExpr::Op::not_: return !atom_matches(e.kids[0], t, atom);
    case AtomExpr::Op::and_:
      for (auto &k : e.kids)
        if (!atom_matches(k, t, atom)) return false;
      return true;
    case AtomExpr::Op::or_:
      for (auto &k : e.kids)
        if (atom_matches(k, t, atom)) return true;
      return false;
  }
  return false;
}

bool bond_matches(const BondExpr &e, const MatchTarget &t, int bond) {
  switch (e.op) {
    case BondExpr::Op::prim: {
      const BondOrder o = t.mol().bond(bond).order;
      switch (e.prim) {
        case BondPrim::single: return o == BondOrder::single;
        case BondPrim::double_: return o == BondOrder::double_;
        case BondPrim::triple: return o == BondOrder::triple;
        case BondPrim::aromatic: return o == BondOrder::aromatic;
        case BondPrim::any: return true;
        case BondPrim::ring: return t.mol().bond_in_ring(bond);
        case BondPrim::implicit: return o == BondOrder::single || o == BondOrder::aromatic;
      }
      return false;
    }
    case BondExpr::Op::not_: return !bond_matches(e.kids[0], t, bond);
    case BondExpr::Op::and_:
      for (auto &k : e.kids)
        if (!bond_matches(k, t, bond)) return false;
      return true;
    case BondExpr::Op::or_:
      for (auto &k : e.kids)
        if (bond_matches(k, t, bond)) return true;
      return false;
  }
  return false;
}

namespace {

class Matcher {
public:
  Matcher(const Pattern &p, const MatchTarget &t) : p_(p), t_(t) {
    const int n = static_cast<int>(p.size());
    std::vector<std::vector<std::pair<int, int>>> adj(n);
    for (int e = 0; e < static_cast<int>(p.edges.size()); ++e) {
      adj[p.edges[e].a].emplace_back(p.edges[e].b, e);
      adj[p.edges[e].b].emplace_back(p.edges[e].a, e);
    }
    // DFS order from node 0; each later node hangs off an earlier parent.
    std::vector<int> pos(n, -1);
    parent_.assign(n, -1);
    parent_edge_.assign(n, -1);
    checks_.assign(n, {});
    std::function<void(int)> dfs = [&](int u) {
      pos[u] = static_cast<int>(order_.size());
      order_.push_back(u);
      for (auto [v, e] : adj[u])
        if (pos[v] < 0 && parent_[v] < 0 && v != 0) {
          parent_[v] = u;
          parent_edge_[v] = e;
          dfs(v);
        }
    };
    dfs(0);
    for (int u = 0; u < n; ++u)
      for (auto [v, e] : adj[u])
        if (pos[v] < pos[u] && e != parent_edge_[u]) checks_[u].emplace_back(v, e);
    map_.assign(n, -1);
    used_.assign(t.mol().size(), 0);
    cache_.assign(static_cast<std::size_t>(n) * t.mol().size(), -1);
  }

  // Calls `sink` for each complete mapping; stops when it returns false.
  void run(std::optional<int> anchor, const std::function<bool(const std::vector<int> &)> &sink) {
    sink_ = &sink;
    stop_ = false;
    if (p_.size() == 0 || t_.mol().size() == 0) return;
    if (anchor) {
      try_atom(0, *anchor);
    } else {
      for (int a = 0; a < static_cast<int>(t_.mol().size()) && !stop_; ++a) try_atom(0, a);
    }
  }

private:
  bool node_ok(int node, int atom) {
    auto &c = cache_[static_cast<std::size_t>(node) * t_.mol().size() + atom];
    if (c < 0) c = atom_matches(p_.nodes[node], t_, atom) ? 1 : 0;
    return c == 1;
  }

  void try_atom(std::size_t depth, int atom) {
    const int node = order_[depth];
    if (used_[atom] || !node_ok(node, atom)) return;
    for (auto [other, e] : checks_[node]) {
      auto b = t_.mol().bond_between(atom, map_[other]);
      if (!b || !bond_matches(p_.edges[e].expr, t_, *b)) return;
    }
    map_[node] = atom;
    used_[atom] = 1;
    extend(depth + 1);
    used_[atom] = 0;
    map_[node] = -1;
  }

  void extend(std::size_t depth) {
    if (stop_) return;
    if (depth == order_.size()) {
      if (!(*sink_)(map_)) stop_ = true;
      return;
    }
    const int node = order_[depth];
    const int from = map_[parent_[node]];
    const BondExpr &be = p_.edges[parent_edge_[node]].expr;
    for (auto &x : t_.mol().neighbors(from)) {
      if (stop_) return;
      if (!bond_matches(be, t_, x.bond)) continue;
      try_atom(depth, x.atom);
    }
  }

  const Pattern &p_;
  const MatchTarget &t_;
  std::vector<int> order_, parent_, parent_edge_, map_;
  std::vector<std::vector<std::pair<int, int>>> checks_;
  std::vector<char> used_;
  std::vector<signed char> cache_;
  const std::function<bool(const std::vector<int> &)> *sink_ = nullptr;
  bool stop_ = false;
};

std::vector<int> sorted_image(const std::vector<int> &m) {
  std::vector<int> s = m;
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

MatchSet match(const Pattern &p, const MatchTarget &t) {
  MatchSet out;
  std::set<std::vector<int>> images;
  Matcher(p, t).run(std::nullopt, [&](const std::vector<int> &m) {
    out.mappings.push_back(m);
    images.insert(sorted_image(m));
    return true;
  });
  out.unique_atom_sets = images.size();
  return out;
}

MatchSet match(const Pattern &p, const Molecule &m) { return match(p, MatchTarget(m)); }

bool matches_any(const Pattern &p, const MatchTarget &t) {
  bool found = false;
  Matcher(p, t).run(std::nullopt, [&](const std::vector<int> &) {
    found = true;
    return false;
  });
  return found;
}

bool match_anchored(const Pattern &p, const MatchTarget &t, int atom) {
  bool found = false;
  Matcher(p, t).run(atom, [&](const std::vector<int> &) {
    found = true;
    return false;
  });
  return found;
}

std::vector<std::vector<int>> match_anchored_all(const Pattern &p, const MatchTarget &t,
                                                 int atom) {
  std::vector<std::vector<int>> out;
  Matcher(p, t).run(atom, [&](const std::vector<int> &m) {
    out.push_back(m);
    return true;
  });
  return out;
}

bool has_disjoint_matches(const Pattern &p, const MatchTarget &t, int count) {
  if (count <= 0) return true;
  if (count == 1) return matches_any(p, t);
  std::set<std::vector<int>> images;
  Matcher(p, t).run(std::nullopt, [&](const std::vector<int> &m) {
    images.insert(sorted_image(m));
    return true;
  });
  std::vector<std::vector<int>> sets(images.begin(), images.end());
  if (static_cast<int>(sets.size()) < count) return false;
  std::vector<char> taken(t.mol().size(), 0);
  std::function<bool(std::size_t, int)> pick = [&](std::size_t from, int need) {
    if (need == 0) return true;
    for (std::size_t k = from; k < sets.size(); ++k) {
      bool clash = false;
      for (int a : sets[k]) clash = clash || taken[a];
      if (clash) continue;
      for (int a : sets[k]) taken[a] = 1;
      bool ok = pick(k + 1, need - 1);
      for (int a : sets[k]) taken[a] = 0;
      if (ok) return true;
    }
    return false;
  };
  return pick(0, count);
}

}  // namespace chemagent::molkit
