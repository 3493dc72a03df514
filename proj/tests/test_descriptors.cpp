// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>

#include "chemagent/descriptors.hpp"
#include "chemagent/smarts.hpp"
#include "chemagent/smiles.hpp"
#include "chemagent/text.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace chemagent;
using namespace chemagent::descriptors;
using molkit::parse_smiles;

namespace {

const Tables &tables() {
  static auto t = Tables::load(CHEMAGENT_DATA_DIR);
  return *t;
}

double logp(const std::string &s) { return crippen_logp(parse_smiles(s), tables().crippen); }
double psa(const std::string &s) { return tpsa(parse_smiles(s), tables().tpsa); }

}  // namespace

TEST_CASE("molecular weight") {
  // hand sums from the element table
  CHECK(mol_weight(parse_smiles("O")) == doctest::Approx(2 * 1.008 + 15.999).epsilon(1e-12));
  CHECK(mol_weight(parse_smiles("C")) == doctest::Approx(12.011 + 4 * 1.008).epsilon(1e-12));
  CHECK(std::round(mol_weight(parse_smiles("O")) * 100) / 100 == doctest::Approx(18.02));
  CHECK(std::round(mol_weight(parse_smiles("C")) * 100) / 100 == doctest::Approx(16.04));
  // isotope mass from the isotope table: 13.0033548 + 4 x 1.008
  CHECK(mol_weight(parse_smiles("[13CH4]")) == doctest::Approx(13.00335484 + 4 * 1.008));
  CHECK(mol_weight(parse_smiles("[2H]O[2H]")) > mol_weight(parse_smiles("O")));
}

TEST_CASE("crippen logp") {
  CHECK(logp("C") == doctest::Approx(0.1441 + 4 * 0.123));
  CHECK(logp("CC") == doctest::Approx(2 * 0.1441 + 6 * 0.123));
  // helium is only covered by the wildcard row, which contributes 0
  CHECK(logp("[He]") == doctest::Approx(0.0));

  CrippenTable custom;
  custom.rules.push_back({"C", molkit::parse_smarts("[#6]"), 1.0});
  custom.rules.push_back({"default", molkit::parse_smarts("*"), 0.25});
  // C: 1.0; O and four H fall to the default
  CHECK(crippen_logp(parse_smiles("CO"), custom) == doctest::Approx(1.0 + 5 * 0.25));

  CrippenTable none;
  none.rules.push_back({"C", molkit::parse_smarts("[#6]"), 1.0});
  CHECK_THROWS_AS(crippen_logp(parse_smiles("CO"), none), DescriptorError);
}

TEST_CASE("tpsa") {
  CHECK(psa("CCCC") == 0.0);
  CHECK(psa("C(CS)O") == doctest::Approx(20.23));
  CHECK(psa("CCO") == doctest::Approx(20.23));

  TpsaTable with_sp = tables().tpsa;
  with_sp.include_s_p = true;
  // thiol S row is 38.80
  CHECK(tpsa(parse_smiles("C(CS)O"), with_sp) == doctest::Approx(20.23 + 38.80));

  TpsaTable bare;
  bare.fallback[7] = {30.5, -8.2, 1.5};
  auto r = tpsa_detail(parse_smiles("N"), bare);
  CHECK(r.used_fallback);
  CHECK(r.value == doctest::Approx(30.5 + 3 * 1.5));
  auto r2 = tpsa_detail(parse_smiles("O"), bare);
  CHECK(r2.used_fallback);
  CHECK(r2.value == 0.0);
  CHECK_FALSE(tpsa_detail(parse_smiles("CCO"), tables().tpsa).used_fallback);
}

TEST_CASE("lipinski counts") {
  CHECK(hb_donors(parse_smiles("CCO")) == 1);
  CHECK(hb_acceptors(parse_smiles("CCO")) == 1);
  CHECK(hb_donors(parse_smiles("CCCC")) == 0);
  CHECK(hb_acceptors(parse_smiles("CCCC")) == 0);
  CHECK(hb_donors(parse_smiles("CC(=O)Oc1ccccc1C(=O)O")) == 1);
  CHECK(hb_acceptors(parse_smiles("CC(=O)Oc1ccccc1C(=O)O")) == 4);
}

TEST_CASE("rotatable bonds") {
  CHECK(rotatable_bonds(parse_smiles("CCCC")) == 1);
  CHECK(rotatable_bonds(parse_smiles("c1ccccc1")) == 0);
  CHECK(rotatable_bonds(parse_smiles("CC(=O)NC")) == 0);
  CHECK(rotatable_bonds(parse_smiles("CCCCC")) == 2);
  CHECK(rotatable_bonds(parse_smiles("c1ccccc1-c1ccccc1")) == 1);
  CHECK(rotatable_bonds(parse_smiles("CC(C)(C)CC")) == 0);   // t-butyl bond excluded
  CHECK(rotatable_bonds(parse_smiles("CC(C)(C)CCC")) == 1);
  CHECK(rotatable_bonds(parse_smiles("CCC#CC")) == 0);       // triple-bond atoms excluded
  CHECK(rotatable_bonds(parse_smiles("FC(F)(F)CC")) == 0);
}

TEST_CASE("aromatic ring count") {
  CHECK(aromatic_ring_count(parse_smiles("c1ccccc1")) == 1);
  CHECK(aromatic_ring_count(parse_smiles("CCO")) == 0);
  CHECK(aromatic_ring_count(parse_smiles("c1ccccc1-c1ccccc1")) == 2);
  CHECK(aromatic_ring_count(parse_smiles("c1ccc2c(c1)CCCC2")) == 1);
}

TEST_CASE("qed") {
  CHECK(qed(parse_smiles("CCCC=O"), tables()) == doctest::Approx(0.44).epsilon(0.02 / 0.44));
  for (const auto &s : test_util::corpus()) {
    double q = qed(parse_smiles(s), tables());
    CHECK(q > 0.0);
    CHECK(q <= 1.0);
  }
}

TEST_CASE("qed of benzene by hand") {
  // properties: MW 6 x 12.011 + 6 x 1.008; ALOGP 6 x (aromatic CH 0.1581 + H 0.123);
  // no donors, acceptors, polar area, rotors or alerts; one aromatic ring
  const double hand[8] = {6 * 12.011 + 6 * 1.008, 6 * (0.1581 + 0.123), 0, 0, 0, 0, 1, 0};
  auto p = qed_properties(parse_smiles("c1ccccc1"), tables());
  CHECK(p.mw == doctest::Approx(hand[0]));
  CHECK(p.alogp == doctest::Approx(hand[1]));
  CHECK(p.hba == 0);
  CHECK(p.hbd == 0);
  CHECK(p.psa == 0);
  CHECK(p.rotb == 0);
  CHECK(p.arom == 1);
  CHECK(p.alerts == 0);

  // desirabilities straight from the parameter file
  std::map<std::string, std::vector<double>> params;
  for (auto &row :
       text::read_tsv(text::read_file(test_util::data_path("qed_params.tsv")))) {
    std::vector<double> v;
    for (std::size_t k = 1; k < row.size(); ++k) v.push_back(std::stod(row[k]));
    params[row[0]] = v;
  }
  const char *names[8] = {"MW", "ALOGP", "HBA", "HBD", "PSA", "ROTB", "AROM", "ALERTS"};
  double wlog = 0, wsum = 0;
  for (int k = 0; k < 8; ++k) {
    const auto &v = params.at(names[k]);
    const double a = v[0], b = v[1], c = v[2], d = v[3], e = v[4], f = v[5], dmax = v[6],
                 w = v[7];
    const double x = hand[k];
    const double rise = 1.0 / (1.0 + std::exp(-(x - c + d / 2) / e));
    const double fall = 1.0 - 1.0 / (1.0 + std::exp(-(x - c - d / 2) / f));
    wlog += w * std::log((a + b * rise * fall) / dmax);
    wsum += w;
  }
  CHECK(qed(parse_smiles("c1ccccc1"), tables()) == doctest::Approx(std::exp(wlog / wsum)));
}

TEST_CASE("sa score") {
  for (const auto &s : test_util::corpus()) {
    double v = sa_score(parse_smiles(s), tables().sa);
    CHECK(v >= 1.0);
    CHECK(v <= 10.0);
  }
  const double aspirin = sa_score(parse_smiles("CC(=O)Oc1ccccc1C(=O)O"), tables().sa);
  const double steroid =
      sa_score(parse_smiles("CC(C)CCCC(C)C1CCC2C3CC=C4CC(O)CCC4(C)C3CCC12C"), tables().sa);
  CHECK(aspirin < 2.0);
  CHECK(aspirin < steroid);

  // methane scores high overall (its lone fragment is rare in the fragment table), so
  // the ordering against a fused polycyclic holds on the complexity penalties
  auto penalties = [](const SaBreakdown &b) {
    return b.size_penalty + b.stereo_penalty + b.spiro_penalty + b.bridge_penalty +
           b.macrocycle_penalty;
  };
  auto c1 = sa_detail(parse_smiles("C"), tables().sa);
  auto fused = sa_detail(parse_smiles("CC12CCC(=O)C=C1CCC1C2CCC2(C)C(O)CCC12"), tables().sa);
  CHECK(penalties(c1) == doctest::Approx(0.0));
  // 21 atoms, 6 stereo candidates: 21^1.005 - 21 + log10(7)
  CHECK(fused.chiral_centres == 6);
  CHECK(penalties(fused) == doctest::Approx(std::pow(21.0, 1.005) - 21.0 + std::log10(7.0)));
  CHECK(penalties(c1) < penalties(fused));

  // norbornane: 7 atoms, two bridgeheads, bridgehead neighbours pairwise symmetric
  auto d = sa_detail(parse_smiles("C1CC2CCC1C2"), tables().sa);
  CHECK(d.bridgehead_atoms == 2);
  CHECK(d.spiro_atoms == 0);
  CHECK(d.chiral_centres == 0);
  CHECK(d.bridge_penalty == doctest::Approx(std::log10(3.0)));
  CHECK(d.size_penalty == doctest::Approx(std::pow(7.0, 1.005) - 7.0));
  auto sp = sa_detail(parse_smiles("C1CCC2(C1)CCCC2"), tables().sa);
  CHECK(sp.spiro_atoms == 1);
  CHECK(sp.spiro_penalty == doctest::Approx(std::log10(2.0)));
  auto chiral = sa_detail(parse_smiles("CC(O)CC"), tables().sa);
  CHECK(chiral.chiral_centres == 1);
  auto macro = sa_detail(parse_smiles("C1CCCCCCCCCCC1"), tables().sa);
  CHECK(macro.macrocycle_penalty == doctest::Approx(std::log10(2.0)));

  SaParams empty = tables().sa;
  empty.fragment_scores.clear();
  auto e = sa_detail(parse_smiles("CCO"), empty);
  CHECK(e.fragment_table_empty);
  CHECK(e.fragment_term == 0.0);
  CHECK(e.score >= 1.0);
  CHECK(e.score <= 10.0);
}

TEST_CASE("boiled egg") {
  CHECK(boiled_egg(parse_smiles("CCON=O"), tables()).bbb);
  CHECK_FALSE(boiled_egg(parse_smiles("C#C"), tables()).gi);
  auto far = boiled_egg_point(300, -5, tables().egg);
  CHECK_FALSE(far.bbb);
  CHECK_FALSE(far.gi);
  auto centre = boiled_egg_point(tables().egg.yolk.cx, tables().egg.yolk.cy, tables().egg);
  CHECK(centre.bbb);
  CHECK(centre.gi);
}

TEST_CASE("ellipse test agrees with the unrotated conic form") {
  // (u/rx)^2 + (v/ry)^2 <= 1 expands to A dx^2 + B dx dy + C dy^2 <= 1 with
  // A = cos^2/rx^2 + sin^2/ry^2, B = 2 sin cos (1/rx^2 - 1/ry^2), C = sin^2/rx^2 + cos^2/ry^2
  std::mt19937_64 rng(7);
  for (const Ellipse &e : {tables().egg.yolk, tables().egg.white}) {
    const double t = e.theta_deg * std::numbers::pi / 180.0, c = std::cos(t), s = std::sin(t);
    const double A = c * c / (e.rx * e.rx) + s * s / (e.ry * e.ry);
    const double B = 2 * s * c * (1 / (e.rx * e.rx) - 1 / (e.ry * e.ry));
    const double C = s * s / (e.rx * e.rx) + c * c / (e.ry * e.ry);
    std::uniform_real_distribution<double> x(e.cx - 1.5 * e.rx, e.cx + 1.5 * e.rx);
    std::uniform_real_distribution<double> y(e.cy - 1.5 * e.ry - 3, e.cy + 1.5 * e.ry + 3);
    int agree = 0, inside = 0;
    for (int k = 0; k < 20000; ++k) {
      const double px = x(rng), py = y(rng), dx = px - e.cx, dy = py - e.cy;
      const double q = A * dx * dx + B * dx * dy + C * dy * dy;
      if (std::abs(q - 1) < 1e-9) continue;
      agree += e.contains(px, py) == (q <= 1);
      inside += q <= 1;
    }
    CHECK(agree > 19990);
    CHECK(inside > 1000);
  }
}

TEST_CASE("lipinski") {
  CHECK(lipinski_pass(parse_smiles("CC(=O)Oc1ccccc1C(=O)O"), tables()));
  CHECK(lipinski_pass(parse_smiles("C"), tables()));
  auto c40 = lipinski(parse_smiles(std::string(40, 'C')), tables());
  CHECK_FALSE(c40.pass);
  CHECK(c40.logp > 5);
  CHECK(c40.mw > 500);
  CHECK(c40.violations == 2);
}

TEST_CASE("alert filters") {
  CHECK(alert_filter(parse_smiles("CCO"), tables().brenk).passes);
  CHECK(alert_filter(parse_smiles("CCO"), tables().pains).passes);

  // three esters for the first Brenk entry
  const auto &b0 = tables().brenk.patterns.front();
  auto tri = alert_filter(parse_smiles("CC(=O)OCC(OC(C)=O)COC(C)=O"), tables().brenk);
  CHECK_FALSE(tri.passes);
  CHECK(std::find(tri.matched_labels.begin(), tri.matched_labels.end(), b0.label) !=
        tri.matched_labels.end());
  auto two = alert_filter(parse_smiles("CC(=O)OCCOC(C)=O"), tables().brenk);
  CHECK(std::find(two.matched_labels.begin(), two.matched_labels.end(), b0.label) ==
        two.matched_labels.end());

  // written from the first PAINS pattern: six-ring C1-C(=X)-X-C-X-C1(=X) with exocyclic =CH2
  const auto &p0 = tables().pains.patterns.front();
  auto hit = alert_filter(parse_smiles("C1(=C)C(=O)NCNC1=O"), tables().pains);
  CHECK_FALSE(hit.passes);
  CHECK(hit.matched_labels.front() == p0.label);

  CHECK(tables().pains.skipped_count == 61);
  CHECK(tables().brenk.skipped_count == 0);
  CHECK_FALSE(tables().qed_alerts_from_brenk);

  const std::string path = "alerts_unsupported.smarts";
  {
    std::ofstream f(path);
    f << "only\t[$(C)]\t1\n";
  }
  CHECK_THROWS_AS(AlertSet::load("broken", path), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("missing data directory is a configuration error") {
  CHECK_THROWS_AS(Tables::load("/nonexistent"), ConfigError);
}

TEST_CASE("reference corpus agreement") {
  auto rows = text::read_tsv(text::read_file(test_util::data_path("reference_values.csv")));
  REQUIRE(rows.size() > 200);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto f = text::split(rows[r][0], ',');
    REQUIRE(f.size() == 15);
    CAPTURE(f[0]);
    auto m = parse_smiles(f[0]);
    CHECK(std::abs(mol_weight(m) - std::stod(f[1])) <= 0.01);
    CHECK(std::abs(crippen_logp(m, tables().crippen) - std::stod(f[2])) <= 0.01);
    CHECK(std::abs(tpsa(m, tables().tpsa) - std::stod(f[3])) <= 0.01);
    CHECK(std::abs(qed(m, tables()) - std::stod(f[4])) <= 0.02);
    CHECK(std::abs(sa_score(m, tables().sa) - std::stod(f[5])) <= 0.05);
    CHECK(hb_donors(m) == std::stoi(f[6]));
    CHECK(hb_acceptors(m) == std::stoi(f[7]));
    CHECK(rotatable_bonds(m) == std::stoi(f[8]));
    CHECK(aromatic_ring_count(m) == std::stoi(f[9]));
    auto egg = boiled_egg(m, tables());
    CHECK((egg.bbb ? "Yes" : "No") == f[10]);
    CHECK((egg.gi ? "High" : "Low") == f[11]);
    CHECK((lipinski_pass(m, tables()) ? "True" : "False") == f[12]);
    CHECK((alert_filter(m, tables().brenk).passes ? "True" : "False") == f[13]);
    CHECK((alert_filter(m, tables().pains).passes ? "True" : "False") == f[14]);
  }
}

TEST_CASE("spelling invariance") {
  const auto &t = tables();
  for (auto &[a, b] : test_util::spellings()) {
    CAPTURE(a);
    CAPTURE(b);
    auto x = parse_smiles(a), y = parse_smiles(b);
    CHECK(std::abs(mol_weight(x) - mol_weight(y)) < 1e-9);
    CHECK(std::abs(crippen_logp(x, t.crippen) - crippen_logp(y, t.crippen)) < 1e-9);
    CHECK(std::abs(tpsa(x, t.tpsa) - tpsa(y, t.tpsa)) < 1e-9);
    CHECK(std::abs(qed(x, t) - qed(y, t)) < 1e-9);
    CHECK(std::abs(sa_score(x, t.sa) - sa_score(y, t.sa)) < 1e-9);
    CHECK(rotatable_bonds(x) == rotatable_bonds(y));
    CHECK(boiled_egg(x, t).bbb == boiled_egg(y, t).bbb);
    CHECK(alert_filter(x, t.brenk).matched_labels.size() ==
          alert_filter(y, t.brenk).matched_labels.size());
  }
}

TEST_CASE("additivity over disconnected unions") {
  auto corpus = test_util::corpus();
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
  const auto &t = tables();
  for (int k = 0; k < 100; ++k) {
    const auto &a = corpus[pick(rng)], &b = corpus[pick(rng)];
    CAPTURE(a);
    CAPTURE(b);
    auto x = parse_smiles(a), y = parse_smiles(b), xy = parse_smiles(a + "." + b);
    CHECK(mol_weight(xy) == doctest::Approx(mol_weight(x) + mol_weight(y)));
    CHECK(crippen_logp(xy, t.crippen) ==
          doctest::Approx(crippen_logp(x, t.crippen) + crippen_logp(y, t.crippen)));
    CHECK(tpsa(xy, t.tpsa) == doctest::Approx(tpsa(x, t.tpsa) + tpsa(y, t.tpsa)));
  }
}
