// SPDX-License-Identifier: Apache-2.0
#include <random>
#include <string>

#include "chemagent/smiles.hpp"
#include "chemagent/text.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace chemagent::molkit;

namespace {

int count_order(const Molecule &m, BondOrder o) {
  int n = 0;
  for (auto &b : m.bonds()) n += b.order == o;
  return n;
}

std::string error_of(const std::string &s) {
  try {
    parse_smiles(s);
  } catch (const SmilesError &e) {
    return e.reason;
  }
  return {};
}

}  // namespace

TEST_CASE("methane and benzene") {
  auto m = parse_smiles("C");
  REQUIRE(m.size() == 1);
  CHECK(m.atom(0).implicit_h == 4);

  auto bz = parse_smiles("c1ccccc1");
  CHECK(bz.size() == 6);
  CHECK(count_order(bz, BondOrder::aromatic) == 6);
  REQUIRE(bz.rings().rings.size() == 1);
  CHECK(bz.rings().rings[0].size() == 6);
  for (auto &a : bz.atoms()) {
    CHECK(a.aromatic);
    CHECK(a.implicit_h == 1);
  }
}

TEST_CASE("C(CS)O valence rules") {
  // C0 bonds: C1, O -> 2 H; C1 bonds: C0, S -> 2 H; S and O one bond each -> 1 H
  auto m = parse_smiles("C(CS)O");
  REQUIRE(m.size() == 4);
  CHECK(m.bonds().size() == 3);
  CHECK(count_order(m, BondOrder::single) == 3);
  CHECK(m.atom(0).symbol() == "C");
  CHECK(m.atom(1).symbol() == "C");
  CHECK(m.atom(2).symbol() == "S");
  CHECK(m.atom(3).symbol() == "O");
  CHECK(m.atom(0).implicit_h == 2);
  CHECK(m.atom(1).implicit_h == 2);
  CHECK(m.atom(2).implicit_h == 1);
  CHECK(m.atom(3).implicit_h == 1);
}

TEST_CASE("higher valences and brackets") {
  CHECK(parse_smiles("CS(=O)(=O)C").atom(1).implicit_h == 0);   // S6
  CHECK(parse_smiles("CS(=O)C").atom(1).implicit_h == 0);       // S4
  CHECK(parse_smiles("CP(C)(C)=O").atom(1).implicit_h == 0);    // P5
  CHECK(parse_smiles("CN(=O)=O").atom(1).implicit_h == 0);      // N5
  CHECK(parse_smiles("c1cc[nH]c1").atom(3).implicit_h == 1);
  CHECK(parse_smiles("c1ccncc1").atom(3).implicit_h == 0);
  CHECK(parse_smiles("Cn1cccc1").atom(1).implicit_h == 0);
  CHECK(parse_smiles("[CH3]").atom(0).implicit_h == 3);
  CHECK(parse_smiles("[C]").atom(0).implicit_h == 0);

  auto nh4 = parse_smiles("[NH4+]");
  CHECK(nh4.atom(0).formal_charge == 1);
  CHECK(nh4.atom(0).implicit_h == 4);
  CHECK(nh4.atom(0).explicit_h == 4);

  auto iso = parse_smiles("[13CH4]");
  CHECK(iso.atom(0).isotope == 13);
  CHECK(parse_smiles("[O--]").atom(0).formal_charge == -2);
  CHECK(parse_smiles("[Fe+3]").atom(0).formal_charge == 3);
  CHECK(parse_smiles("[se]1cccc1").atom(0).aromatic);
  CHECK(parse_smiles("[Na+].[Cl-]").component_count() == 2);
}

TEST_CASE("stereo marks are discarded") {
  auto a = parse_smiles("F/C=C/F");
  auto b = parse_smiles("FC=CF");
  CHECK(isomorphic(a, b));
  CHECK(isomorphic(parse_smiles("N[C@@H](C)C(=O)O"), parse_smiles("NC(C)C(=O)O")));
}

TEST_CASE("ring closures") {
  CHECK(parse_smiles("C%10CC%10").rings().rings.size() == 1);
  CHECK(count_order(parse_smiles("C=1CC1"), BondOrder::double_) == 1);
  auto m = parse_smiles("C1CC=1");
  CHECK(count_order(m, BondOrder::double_) == 1);
  // biphenyl link is a plain single bond
  auto bp = parse_smiles("c1ccccc1c1ccccc1");
  CHECK(count_order(bp, BondOrder::single) == 1);
  CHECK(count_order(bp, BondOrder::aromatic) == 12);
}

TEST_CASE("parse errors carry a reason and position") {
  CHECK(error_of("C(") == "unbalanced parenthesis");
  CHECK(error_of("C)") == "unbalanced parenthesis");
  CHECK(error_of("C1CC").find("unmatched ring-closure digit") == 0);
  CHECK(error_of("Xy").find("unknown atom symbol") == 0);
  CHECK(error_of("[Xx]") == "unknown atom symbol");
  CHECK(error_of("[C13]").find("isotope syntax error") == 0);
  CHECK(error_of("[C+-]").find("charge syntax error") == 0);
  CHECK(error_of("C(C)(C)(C)(C)C").find("valence overflow") == 0);
  CHECK(error_of("FF(F)").find("valence overflow") == 0);
  CHECK(error_of("C11").find("same atom") != std::string::npos);
  CHECK(error_of("C12CC12").find("duplicate bond") == 0);
  CHECK(error_of("") == "empty SMILES");
  CHECK(error_of("cc") == "non-ring atom marked aromatic");
  try {
    parse_smiles("CC(C");
    FAIL("expected an error");
  } catch (const SmilesError &e) {
    CHECK(e.position == 2);
  }
}

TEST_CASE("ring perception") {
  CHECK(parse_smiles("CCO").rings().rings.empty());
  auto m = parse_smiles("C1CC1C1CC1");
  REQUIRE(m.rings().rings.size() == 2);
  CHECK(m.rings().rings[0].size() == 3);
  CHECK(m.rings().rings[1].size() == 3);
  auto nap = parse_smiles("c1ccc2ccccc2c1");
  REQUIRE(nap.rings().rings.size() == 2);
  CHECK(nap.rings().rings[0].size() == 6);
  CHECK(nap.rings().rings[1].size() == 6);
  // cubane: 12 bonds - 8 atoms + 1 = 5 rings
  auto cub = parse_smiles("C12C3C4C1C5C2C3C45");
  CHECK(cub.rings().rings.size() == 5);
}

TEST_CASE("kekulize") {
  auto k = kekulize(parse_smiles("c1ccccc1"));
  CHECK(count_order(k, BondOrder::double_) == 3);
  CHECK(count_order(k, BondOrder::single) == 3);
  for (auto &a : k.atoms()) CHECK_FALSE(a.aromatic);

  auto e = kekulize(parse_smiles("CCO"));
  CHECK(isomorphic(e, parse_smiles("CCO")));

  auto py = kekulize(parse_smiles("c1ccncc1"));
  int n_double = 0;
  for (auto &nb : py.neighbors(3))
    n_double += py.bond(nb.bond).order == BondOrder::double_;
  CHECK(n_double == 1);

  auto pyrrole = kekulize(parse_smiles("c1cc[nH]c1"));
  CHECK(count_order(pyrrole, BondOrder::double_) == 2);

  CHECK_THROWS_AS(kekulize(parse_smiles("c1cccc1")), KekuleError);
}

TEST_CASE("corpus: round trip, ring consistency, hydrogen conservation") {
  auto corpus = test_util::corpus();
  REQUIRE(corpus.size() >= 200);
  for (const auto &s : corpus) {
    CAPTURE(s);
    Molecule m = parse_smiles(s);
    std::string w = write_smiles(m);
    CAPTURE(w);
    Molecule back = parse_smiles(w);
    CHECK(isomorphic(m, back));

    const auto &ri = m.rings();
    std::size_t cycles = m.bonds().size() - m.size() + m.component_count();
    CHECK(ri.rings.size() == cycles);
    int members = 0, sizes = 0;
    for (int v : ri.atom_ring_membership) members += v;
    for (auto &r : ri.rings) sizes += static_cast<int>(r.size());
    CHECK(members == sizes);

    Molecule k = kekulize(m);
    int h0 = 0, h1 = 0;
    for (int i = 0; i < static_cast<int>(m.size()); ++i) {
      h0 += m.total_h(i);
      h1 += k.total_h(i);
    }
    CHECK(h0 == h1);
  }
}

TEST_CASE("corpus spellings are isomorphic") {
  for (auto &[a, b] : test_util::spellings()) {
    CAPTURE(a);
    CAPTURE(b);
    CHECK(isomorphic(parse_smiles(a), parse_smiles(b)));
  }
}

TEST_CASE("round trip of special cases") {
  for (std::string s : {"CCO", "[NH4+]", "c1ccccc1", "[2H]C([2H])([2H])O", "C1CC2(CC1)CC2",
                        "c1ccc2c(c1)[nH]c1ccccc12", "[O-][n+]1ccccc1", "C=1CCCCC=1",
                        "c1cc-2ccc1-c1ccccc-21", "[Na+].[Cl-]", "[H][H]", "[CH2]",
                        "C12C3C4C1C5C2C3C45"}) {
    CAPTURE(s);
    auto m = parse_smiles(s);
    CHECK(isomorphic(m, parse_smiles(write_smiles(m))));
  }
}

TEST_CASE("fuzz: parser is total on random strings") {
  std::mt19937_64 rng(20261016);
  const std::string alphabet = "CNOSPFIBrclnosp()[]=#-:+.@/\\%0123456789Hse* ";
  std::uniform_int_distribution<int> len(0, 24), byte(0, 255), pick(0, 9);
  std::uniform_int_distribution<std::size_t> sym(0, alphabet.size() - 1);
  int ok = 0, rejected = 0;
  for (int n = 0; n < 100000; ++n) {
    std::string s;
    int l = len(rng);
    for (int k = 0; k < l; ++k)
      s += pick(rng) == 0 ? static_cast<char>(byte(rng)) : alphabet[sym(rng)];
    try {
      Molecule m = parse_smiles(s);
      ++ok;
      // anything accepted must survive a write/parse cycle
      if (!isomorphic(m, parse_smiles(write_smiles(m)))) FAIL("round trip failed: " << s);
    } catch (const SmilesError &e) {
      ++rejected;
      if (e.position > s.size()) FAIL("position out of range for " << s);
    }
  }
  CHECK(ok + rejected == 100000);
  CHECK(ok > 0);
}
