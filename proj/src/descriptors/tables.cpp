// SPDX-License-Identifier: Apache-2.0
#include <spdlog/spdlog.h>
#include <zlib.h>

#include <charconv>
#include <cmath>
#include <filesystem>

#include "chemagent/descriptors.hpp"
#include "chemagent/text.hpp"

namespace chemagent::descriptors {

namespace {

using Rows = std::vector<std::vector<std::string>>;

Rows load_rows(const std::string &path) {
  try {
    return text::read_tsv(text::read_file(path));
  } catch (const std::runtime_error &e) {
    throw ConfigError(std::string("data asset: ") + e.what());
  }
}

void need_cols(const std::vector<std::string> &row, std::size_t n, const std::string &path) {
  if (row.size() < n)
    throw ConfigError(path + ": expected " + std::to_string(n) + " columns, got " +
                      std::to_string(row.size()));
}

double num(const std::string &s, const std::string &path) {
  try {
    return text::to_double(s);
  } catch (const std::runtime_error &e) {
    throw ConfigError(path + ": " + e.what());
  }
}

int inum(const std::string &s, const std::string &path) {
  double v = num(s, path);
  if (v != std::floor(v)) throw ConfigError(path + ": expected an integer, got " + s);
  return static_cast<int>(v);
}

molkit::Pattern pattern(const std::string &s, const std::string &path) {
  try {
    return molkit::parse_smarts(s);
  } catch (const molkit::SmartsError &e) {
    throw ConfigError(path + ": pattern '" + s + "': " + e.what());
  }
}

}  // namespace

CrippenTable CrippenTable::load(const std::string &path) {
  CrippenTable t;
  for (auto &row : load_rows(path)) {
    need_cols(row, 3, path);
    t.rules.push_back({row[0], pattern(row[1], path), num(row[2], path)});
  }
  if (t.rules.empty()) throw ConfigError(path + ": no rules");
  return t;
}

TpsaTable TpsaTable::load(const std::string &path) {
  TpsaTable t;
  const auto &pt = molkit::PeriodicTable::standard();
  auto element = [&](const std::string &sym) {
    const auto *e = pt.by_symbol(sym);
    if (!e) throw ConfigError(path + ": unknown element " + sym);
    return e->atomic_number;
  };
  for (auto &row : load_rows(path)) {
    if (row[0] == "fallback") {
      need_cols(row, 5, path);
      t.fallback[element(row[1])] = {num(row[2], path), num(row[3], path), num(row[4], path)};
      continue;
    }
    need_cols(row, 10, path);
    TpsaRow r;
    r.atomic_number = element(row[0]);
    r.aromatic = inum(row[1], path) != 0;
    r.hydrogens = inum(row[2], path);
    r.charge = inum(row[3], path);
    r.single = inum(row[4], path);
    r.double_ = inum(row[5], path);
    r.triple = inum(row[6], path);
    r.aromatic_bonds = inum(row[7], path);
    r.in_3_ring = row[8] == "*" ? -1 : inum(row[8], path);
    r.contribution = num(row[9], path);
    if (r.contribution < 0) throw ConfigError(path + ": negative contribution");
    t.rows.push_back(r);
  }
  return t;
}

QedParams QedParams::load(const std::string &params_path, const std::string &hbond_path) {
  QedParams q;
  for (auto &row : load_rows(params_path)) {
    need_cols(row, 9, params_path);
    AdsParams p{num(row[1], params_path), num(row[2], params_path), num(row[3], params_path),
                num(row[4], params_path), num(row[5], params_path), num(row[6], params_path),
                num(row[7], params_path), num(row[8], params_path)};
    if (p.weight <= 0) throw ConfigError(params_path + ": weights must be positive");
    q.ads[row[0]] = p;
  }
  for (const char *k : {"MW", "ALOGP", "HBA", "HBD", "PSA", "ROTB", "AROM", "ALERTS"})
    if (!q.ads.count(k)) throw ConfigError(params_path + ": missing property " + k);
  for (auto &row : load_rows(hbond_path)) {
    need_cols(row, 2, hbond_path);
    if (row[0] == "acceptor") {
      Acceptor a{pattern(row[1], hbond_path), std::nullopt};
      if (row.size() > 2 && row[2] != "-") a.exclude = pattern(row[2], hbond_path);
      q.acceptors.push_back(std::move(a));
    } else if (row[0] == "donor") {
      q.donors.push_back(pattern(row[1], hbond_path));
    } else {
      throw ConfigError(hbond_path + ": unknown role " + row[0]);
    }
  }
  return q;
}

SaParams SaParams::load(const std::string &params_path, const std::string &data_dir) {
  SaParams p;
  std::map<std::string, std::string> kv;
  for (auto &row : load_rows(params_path)) {
    need_cols(row, 2, params_path);
    kv[row[0]] = row[1];
  }
  auto get = [&](const char *k, double &dst) {
    if (kv.count(k)) dst = num(kv[k], params_path);
  };
  double radius = p.morgan_radius, macro = p.macrocycle_min_size;
  get("unknown_fragment_score", p.unknown_fragment_score);
  get("morgan_radius", radius);
  get("size_exponent", p.size_exponent);
  get("macrocycle_min_size", macro);
  get("raw_min", p.raw_min);
  get("raw_max", p.raw_max);
  get("smooth_above", p.smooth_above);
  get("clamp_low", p.clamp_low);
  get("clamp_high", p.clamp_high);
  p.morgan_radius = static_cast<int>(radius);
  p.macrocycle_min_size = static_cast<int>(macro);

  // the fragment table is optional
  if (!kv.count("fragment_table") || kv["fragment_table"] == "-") return p;
  const std::string path = data_dir + "/" + kv["fragment_table"];
  if (!std::filesystem::exists(path)) {
    spdlog::warn("SA fragment table {} not found; fragment term is 0", path);
    return p;
  }
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw ConfigError("cannot open " + path);
  gzbuffer(f, 1 << 16);
  std::string line;
  char buf[8192];
  p.fragment_scores.reserve(1 << 20);
  while (gzgets(f, buf, sizeof buf)) {
    line += buf;
    if (line.empty() || (line.back() != '\n' && !gzeof(f))) continue;
    std::string_view l = text::trim(line);
    if (!l.empty() && l.front() != '#') {
      auto tab = l.find('\t');
      if (tab == std::string_view::npos) {
        gzclose(f);
        throw ConfigError(path + ": malformed line");
      }
      double score = num(std::string(l.substr(0, tab)), path);
      const char *c = l.data() + tab + 1;
      const char *end = l.data() + l.size();
      while (c < end) {
        while (c < end && *c == ' ') ++c;
        if (c >= end) break;
        std::uint32_t key = 0;
        auto [next, ec] = std::from_chars(c, end, key);
        if (ec != std::errc{}) {
          gzclose(f);
          throw ConfigError(path + ": bad fragment key");
        }
        p.fragment_scores.emplace(key, score);
        c = next;
      }
    }
    line.clear();
  }
  gzclose(f);
  return p;
}

EggModel EggModel::load(const std::string &path) {
  EggModel m;
  bool yolk = false, white = false;
  for (auto &row : load_rows(path)) {
    need_cols(row, 6, path);
    Ellipse e{num(row[1], path), num(row[2], path), num(row[3], path), num(row[4], path),
              num(row[5], path)};
    if (e.rx <= 0 || e.ry <= 0) throw ConfigError(path + ": semi-axes must be positive");
    if (row[0] == "yolk") {
      m.yolk = e;
      yolk = true;
    } else if (row[0] == "white") {
      m.white = e;
      white = true;
    }
  }
  if (!yolk || !white) throw ConfigError(path + ": needs yolk and white rows");
  return m;
}

AlertSet AlertSet::load(const std::string &name, const std::string &path) {
  AlertSet s;
  s.name = name;
  std::map<std::string, std::size_t> index;
  for (auto &row : load_rows(path)) {
    need_cols(row, 2, path);
    int count = row.size() > 2 ? inum(row[2], path) : 1;
    molkit::Pattern p;
    try {
      p = molkit::parse_smarts(row[1]);
    } catch (const molkit::SmartsError &e) {
      ++s.skipped_count;
      spdlog::debug("{}: skipping {}: {}", name, row[0], e.what());
      continue;
    }
    auto it = index.find(row[0]);
    if (it == index.end()) {
      it = index.emplace(row[0], s.patterns.size()).first;
      s.patterns.push_back({row[0], {}});
    }
    s.patterns[it->second].alternatives.push_back({std::move(p), count});
  }
  if (s.skipped_count)
    spdlog::info("{}: {} patterns outside the SMARTS subset skipped", name, s.skipped_count);
  if (s.patterns.empty()) throw ConfigError(path + ": alert set is empty");
  return s;
}

std::shared_ptr<const Tables> Tables::load(const std::string &data_dir) {
  auto t = std::make_shared<Tables>();
  t->data_dir = data_dir;
  auto at = [&](const char *f) { return data_dir + "/" + f; };
  t->crippen = CrippenTable::load(at("crippen.tsv"));
  t->tpsa = TpsaTable::load(at("tpsa.tsv"));
  t->qed = QedParams::load(at("qed_params.tsv"), at("qed_hbond.tsv"));
  t->sa = SaParams::load(at("sa_params.tsv"), data_dir);
  t->egg = EggModel::load(at("egg.tsv"));
  t->brenk = AlertSet::load("brenk", at("brenk.smarts"));
  t->pains = AlertSet::load("pains", at("pains.smarts"));
  if (std::filesystem::exists(at("qed_alerts.smarts"))) {
    t->qed_alerts = AlertSet::load("qed-alerts", at("qed_alerts.smarts"));
  } else {
    spdlog::info("qed_alerts.smarts not found; QED ALERTS uses the brenk set");
    t->qed_alerts = t->brenk;
    t->qed_alerts_from_brenk = true;
  }
  return t;
}

}  // namespace chemagent::descriptors
