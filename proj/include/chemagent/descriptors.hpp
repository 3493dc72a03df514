// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "chemagent/molecule.hpp"
#include "chemagent/smarts.hpp"

namespace chemagent::descriptors {

using molkit::Molecule;

class DescriptorError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Missing or unusable data asset.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct CrippenRule {
  std::string type;
  molkit::Pattern pattern;  // node 0 is the typed atom
  double logp = 0;
};

struct CrippenTable {
  std::vector<CrippenRule> rules;  // first match wins
  static CrippenTable load(const std::string &path);
};

struct TpsaRow {
  int atomic_number = 0;
  bool aromatic = false;
  int hydrogens = 0;
  int charge = 0;
  int single = 0, double_ = 0, triple = 0, aromatic_bonds = 0;
  int in_3_ring = -1;  // -1 matches either
  double contribution = 0;
};

struct TpsaFallback {
  double base = 0, per_neighbour = 0, per_hydrogen = 0;
};

struct TpsaTable {
  std::vector<TpsaRow> rows;
  std::map<int, TpsaFallback> fallback;  // keyed by atomic number
  bool include_s_p = false;
  static TpsaTable load(const std::string &path);
};

struct AdsParams {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0, dmax = 1, weight = 0;
};

struct QedParams {
  // MW ALOGP HBA HBD PSA ROTB AROM ALERTS
  std::map<std::string, AdsParams> ads;
  struct Acceptor {
    molkit::Pattern pattern;
    std::optional<molkit::Pattern> exclude;  // anchored on the same atom
  };
  std::vector<Acceptor> acceptors;
  std::vector<molkit::Pattern> donors;
  static QedParams load(const std::string &params_path, const std::string &hbond_path);
};

struct SaParams {
  std::unordered_map<std::uint32_t, double> fragment_scores;
  double unknown_fragment_score = -4;
  int morgan_radius = 2;
  double size_exponent = 1.005;
  int macrocycle_min_size = 9;
  double raw_min = -4, raw_max = 2.5, smooth_above = 8, clamp_low = 1, clamp_high = 10;
  static SaParams load(const std::string &params_path, const std::string &data_dir);
};

struct Ellipse {
  double cx = 0, cy = 0, rx = 1, ry = 1, theta_deg = 0;
  bool contains(double x, double y) const;
};

struct EggModel {
  Ellipse yolk, white;
  static EggModel load(const std::string &path);
};

struct AlertGroup {
  std::string label;
  struct Alternative {
    molkit::Pattern pattern;
    int min_count = 1;
  };
  std::vector<Alternative> alternatives;  // any one hitting raises the alert
};

struct AlertSet {
  std::string name;
  std::vector<AlertGroup> patterns;
  int skipped_count = 0;
  static AlertSet load(const std::string &name, const std::string &path);
};

// Every asset the descriptors read, loaded once from the data directory.
struct Tables {
  std::string data_dir;
  CrippenTable crippen;
  TpsaTable tpsa;
  QedParams qed;
  SaParams sa;
  EggModel egg;
  AlertSet brenk, pains, qed_alerts;
  bool qed_alerts_from_brenk = false;

  static std::shared_ptr<const Tables> load(const std::string &data_dir);
};

double mol_weight(const Molecule &m);
double crippen_logp(const Molecule &m, const CrippenTable &t);

struct TpsaResult {
  double value = 0;
  bool used_fallback = false;
};
TpsaResult tpsa_detail(const Molecule &m, const TpsaTable &t);
double tpsa(const Molecule &m, const TpsaTable &t);

// Lipinski counts: N/O atoms with at least one H, and all N/O atoms.
int hb_donors(const Molecule &m);
int hb_acceptors(const Molecule &m);
int rotatable_bonds(const Molecule &m);
int aromatic_ring_count(const Molecule &m);

struct QedProperties {
  double mw = 0, alogp = 0, hba = 0, hbd = 0, psa = 0, rotb = 0, arom = 0, alerts = 0;
};
QedProperties qed_properties(const Molecule &m, const Tables &t);
double ads(const AdsParams &p, double x);
double qed_from_properties(const QedProperties &p, const QedParams &params);
double qed(const Molecule &m, const Tables &t);

struct SaBreakdown {
  double score = 0;
  double fragment_term = 0;
  double size_penalty = 0, stereo_penalty = 0, spiro_penalty = 0, bridge_penalty = 0,
         macrocycle_penalty = 0, density_term = 0;
  int chiral_centres = 0, spiro_atoms = 0, bridgehead_atoms = 0;
  bool fragment_table_empty = false;
};
SaBreakdown sa_detail(const Molecule &m, const SaParams &p);
double sa_score(const Molecule &m, const SaParams &p);
// Radius-limited circular fragment keys with counts.
std::map<std::uint32_t, int> morgan_counts(const Molecule &m, int radius);

struct EggResult {
  bool bbb = false;  // inside the yolk
  bool gi = false;   // inside the white
  double tpsa = 0, wlogp = 0;
};
EggResult boiled_egg(const Molecule &m, const Tables &t);
EggResult boiled_egg_point(double tpsa, double wlogp, const EggModel &egg);

struct LipinskiResult {
  bool pass = false;
  double mw = 0, logp = 0;
  int donors = 0, acceptors = 0, violations = 0;
};
LipinskiResult lipinski(const Molecule &m, const Tables &t);
inline bool lipinski_pass(const Molecule &m, const Tables &t) { return lipinski(m, t).pass; }

struct AlertResult {
  bool passes = true;
  std::vector<std::string> matched_labels;
};
AlertResult alert_filter(const Molecule &m, const AlertSet &set);

}  // namespace chemagent::descriptors
