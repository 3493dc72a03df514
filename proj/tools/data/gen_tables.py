#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Regenerate the static chemistry tables under data/ from an RDKit install.

Usage: python3 tools/data/gen_tables.py [DATA_DIR]

RDKit is only needed here; the C++ build reads the emitted text files.
"""
import gzip
import os
import pickle
import re
import sys

from rdkit import Chem, RDConfig
from rdkit.Chem import FilterCatalog as FC
from rdkit.Chem import QED

DATA = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "..", "data")
PT = Chem.GetPeriodicTable()

ORGANIC = {"B": [3], "C": [4], "N": [3, 5], "O": [2], "P": [3, 5], "S": [2, 4, 6],
           "F": [1], "Cl": [1], "Br": [1], "I": [1]}


def write(name, text):
    path = os.path.join(DATA, name)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        f.write(text)
    print("wrote", path)


def elements():
    rows = ["# symbol\tatomic_number\tstandard_weight\tvalences\torganic_subset",
            "# valences: comma list, '-' when unconstrained"]
    iso = ["# atomic_number\tsymbol\tmass_number\tmass"]
    for z in range(1, 119):
        sym = PT.GetElementSymbol(z)
        if sym in ORGANIC:
            vals = ORGANIC[sym]
        else:
            vals = [v for v in PT.GetValenceList(z) if v >= 0]
        vs = ",".join(str(v) for v in vals) if vals else "-"
        rows.append(f"{sym}\t{z}\t{PT.GetAtomicWeight(z):.6g}\t{vs}\t{1 if sym in ORGANIC else 0}")
        for a in range(1, 300):
            m = PT.GetMassForIsotope(z, a)
            if m > 0 and abs(m - a) < 1.0:
                iso.append(f"{z}\t{sym}\t{a}\t{m:.8g}")
    write("elements.tsv", "\n".join(rows) + "\n")
    write("isotopes.tsv", "\n".join(iso) + "\n")


# The compiled-in parameter set used by MolLogP spells these two hydrogen rows
# with atomic numbers, so aromatic n/o neighbours are excluded as well.
CRIPPEN_FIXES = {
    "[#1][!C;!N;!O]": "[#1][!#6;!#7;!#8]",
    "[#1]O[!C;!N;!O;!S]": "[#1]O[!#6;!#7;!#8;!#16]",
}


def crippen():
    src = os.path.join(RDConfig.RDDataDir, "Crippen.txt")
    rows = ["# type\tsmarts\tlogp",
            "# Wildman-Crippen atom types; first matching row wins, typed atom is the first pattern atom.",
            "# Patterns are matched on the hydrogen-expanded graph."]
    for line in open(src):
        if line.startswith("#") or not line.strip():
            continue
        f = line.rstrip("\n").split("\t")
        if len(f) < 3 or not f[0].strip():
            continue
        rows.append(f"{f[0]}\t{CRIPPEN_FIXES.get(f[1], f[1])}\t{f[2]}")
    rows.append("default\t*\t0")
    write("crippen.tsv", "\n".join(rows) + "\n")


def qed_params():
    rows = ["# property\ta\tb\tc\td\te\tf\tdmax\tweight"]
    for i, name in enumerate(QED.QEDproperties._fields):
        p = QED.adsParameters[name]
        w = QED.WEIGHT_MEAN[i]
        rows.append("\t".join([name] + [repr(v) for v in (p.A, p.B, p.C, p.D, p.E, p.F, p.DMAX)] + [repr(w)]))
    write("qed_params.tsv", "\n".join(rows) + "\n")
    hb = ["# role\tsmarts\texclude",
          "# acceptors: every pattern contributes its unique-match count; exclude is anchored on the same atom"]
    for s in QED.AcceptorSmarts:
        if s.startswith("[$("):
            m = re.fullmatch(r"\[\$\((.*)\);!\$\((.*)\)\]", s)
            inner, excl = m.group(1), m.group(2)
            hb.append(f"acceptor\t{inner}\t{excl}")
        else:
            hb.append(f"acceptor\t{s}\t-")
    hb.append("donor\t[N&!H0&v3,N&!H0&+1&v4,O&H1&+0,S&H1&+0,n&H1&+0]\t-")
    write("qed_hbond.tsv", "\n".join(hb) + "\n")


# Recursive and disconnected alerts expressed inside the supported subset.
ALKENE_SIDES = [("[CH2]", "[CH2]"), ("[CH]([CX4])", "[CH][CX4]"), ("C([CX4])([CX4])", "C([CX4])[CX4]")]
ALKENE_SIDES_EXPL = [("[C&H2]", "[C&H2]"), ("[C&H1]([C&X4])", "[C&H1][C&X4]"),
                     ("C([C&X4])([C&X4])", "C([C&X4])[C&X4]")]


def alkene(sides):
    return [l + "=" + r for l, _ in sides for _, r in sides]


REWRITES = {
    "[$([CH]),$(CC)]#CC(=O)[#6]": ["[CH]#CC(=O)[#6]", "C(C)#CC(=O)[#6]"],
    "[$([CH]),$(CC)]#CC(=O)O[#6]": ["[CH]#CC(=O)O[#6]", "C(C)#CC(=O)O[#6]"],
    "[$([CH]),$(CC)]#CS(=O)(=O)[#6]": ["[CH]#CS(=O)(=O)[#6]", "C(C)#CS(=O)(=O)[#6]"],
    "[$([CH2]),$([CH][CX4]),$(C([CX4])[CX4])]=[$([CH2]),$([CH][CX4]),$(C([CX4])[CX4])]": alkene(ALKENE_SIDES),
    "[$([N+R]),$([n+R]),$([N+]=C)][O-]": ["[N+R][O-]", "[n+R][O-]", "C=[N+][O-]"],
    "[$([C&H2]),$([C&H1][C&X4]),$(C([C&X4])[C&X4])]=[$([C&H2]),$([C&H1][C&X4]),$(C([C&X4])[C&X4])]":
        alkene(ALKENE_SIDES_EXPL),
    "[$([C&H1]),$(CC)]#CC(=O)[C,c]": ["[C&H1]#CC(=O)[C,c]", "C(C)#CC(=O)[C,c]"],
    "[$([C&H1]),$(CC)]#CS(=O)(=O)[C,c]": ["[C&H1]#CS(=O)(=O)[C,c]", "C(C)#CS(=O)(=O)[C,c]"],
    "[$([C&H1]),$(CC)]#CC(=O)O[C,c]": ["[C&H1]#CC(=O)O[C,c]", "C(C)#CC(=O)O[C,c]"],
}


def disconnected(s):
    parts = s.split(".")
    if len(set(parts)) == 1:
        return parts[0], len(parts)
    return None


def expand(label, smarts):
    """Yield (label, smarts, min_count) rows; None smarts marks a skip."""
    if smarts in REWRITES:
        for alt in REWRITES[smarts]:
            yield label, alt, 1
        return
    if "." in smarts:
        d = disconnected(smarts)
        if d:
            yield label, d[0], d[1]
            return
    yield label, smarts, 1


def alert_file(name, header, entries):
    rows = [f"# {header}", "# label\tsmarts\tmin_count",
            "# repeated labels are alternatives; min_count asks for that many atom-disjoint matches"]
    for label, smarts in entries:
        for lab, s, n in expand(label, smarts):
            rows.append(f"{lab}\t{s}\t{n}")
    write(name, "\n".join(rows) + "\n")


def catalog(which):
    p = FC.FilterCatalogParams()
    p.AddCatalog(which)
    c = FC.FilterCatalog(p)
    out = []
    for i in range(c.GetNumEntries()):
        e = c.GetEntryWithIdx(i)
        s = e.Serialize()
        k = s.find(b"\xef\xbe\xad\xde")
        n = int(re.search(rb" (\d+) $", s[:k]).group(1))
        mol = Chem.Mol(s[k:k + n])
        out.append((e.GetDescription(), Chem.MolToSmarts(mol)))
    return out


def alerts():
    qed = list(QED.StructuralAlertSmarts)
    alert_file("qed_alerts.smarts", "Bickerton et al. 2012 unwanted-group alerts",
               [(f"qed_{k + 1:03d}", s) for k, s in enumerate(qed)])
    alert_file("brenk.smarts", "Brenk et al. 2008 unwanted-functionality filters",
               catalog(FC.FilterCatalogParams.FilterCatalogs.BRENK))
    alert_file("pains.smarts", "Baell & Holloway 2010 PAINS families A-C",
               catalog(FC.FilterCatalogParams.FilterCatalogs.PAINS))


def egg():
    # Daina & Zoete 2016; theta rotates the ellipse axes counter-clockwise (degrees).
    rows = ["# ellipse\tcx\tcy\trx\try\ttheta_deg",
            "# x axis TPSA (A^2), y axis WLOGP; inside iff (u/rx)^2 + (v/ry)^2 <= 1",
            f"yolk\t38.117\t3.177\t{82.061 / 2!r}\t{5.557 / 2!r}\t-0.066235",
            f"white\t71.051\t2.292\t{142.081 / 2!r}\t{8.740 / 2!r}\t-1.031325"]
    write("egg.tsv", "\n".join(rows) + "\n")


def sa():
    rows = ["# key\tvalue",
            "fragment_table\tsa_fragments.tsv.gz",
            "unknown_fragment_score\t-4",
            "morgan_radius\t2",
            "size_exponent\t1.005",
            "macrocycle_min_size\t9",
            "raw_min\t-4.0",
            "raw_max\t2.5",
            "smooth_above\t8.0",
            "clamp_low\t1.0",
            "clamp_high\t10.0"]
    write("sa_params.tsv", "\n".join(rows) + "\n")
    src = os.path.join(RDConfig.RDContribDir, "SA_Score", "fpscores.pkl.gz")
    data = pickle.load(gzip.open(src))
    path = os.path.join(DATA, "sa_fragments.tsv.gz")
    with gzip.GzipFile(path, "wb", mtime=0) as f:
        f.write(b"# score\tmorgan keys (radius 2, unfolded 32-bit)\n")
        for group in data:
            f.write((repr(float(group[0])) + "\t" + " ".join(str(k) for k in group[1:]) + "\n").encode())
    print("wrote", path)


if __name__ == "__main__":
    elements()
    crippen()
    qed_params()
    alerts()
    egg()
    sa()
