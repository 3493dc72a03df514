#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Compute reference descriptor values for data/molecules.txt with RDKit.

Writes data/reference_values.csv and data/spellings.tsv. Alert columns use the
shipped brenk/pains pattern files (as RDKit reads them), so they check the
matcher rather than the curation.

Usage: python3 tools/data/gen_reference.py [DATA_DIR]
"""
import csv
import math
import os
import random
import sys

from rdkit import Chem, RDConfig
from rdkit.Chem import Crippen, Descriptors, QED
from rdkit.Chem import rdMolDescriptors as rdmd

sys.path.append(os.path.join(RDConfig.RDContribDir, "SA_Score"))
import sascorer  # noqa: E402

DATA = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "..", "data")


def read_lines(name):
    out = []
    for line in open(os.path.join(DATA, name)):
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def load_alerts(name):
    groups = {}
    for line in open(os.path.join(DATA, name)):
        if line.startswith("#") or not line.strip():
            continue
        label, smarts, count = line.rstrip("\n").split("\t")
        q = Chem.MolFromSmarts(smarts)
        if q is None or "$(" in smarts:
            continue
        groups.setdefault(label, []).append((q, int(count)))
    return groups


def disjoint(sets, need, start=0, used=frozenset()):
    if need == 0:
        return True
    for i in range(start, len(sets)):
        if not (sets[i] & used) and disjoint(sets, need - 1, i + 1, used | sets[i]):
            return True
    return False


def alert_hit(mol, alts):
    for q, n in alts:
        if n == 1:
            if mol.HasSubstructMatch(q):
                return True
        else:
            sets = [frozenset(m) for m in mol.GetSubstructMatches(q, maxMatches=100000)]
            if disjoint(sets, n):
                return True
    return False


def egg_inside(x, y, cx, cy, rx, ry, theta_deg):
    t = math.radians(theta_deg)
    dx, dy = x - cx, y - cy
    u = dx * math.cos(t) + dy * math.sin(t)
    v = -dx * math.sin(t) + dy * math.cos(t)
    return (u / rx) ** 2 + (v / ry) ** 2 <= 1.0


def load_egg():
    e = {}
    for line in open(os.path.join(DATA, "egg.tsv")):
        if line.startswith("#"):
            continue
        f = line.split()
        e[f[0]] = [float(v) for v in f[1:]]
    return e


def lipinski_counts(m):
    donors = sum(1 for a in m.GetAtoms() if a.GetSymbol() in ("N", "O") and a.GetTotalNumHs() > 0)
    acceptors = sum(1 for a in m.GetAtoms() if a.GetSymbol() in ("N", "O"))
    return donors, acceptors


def aromatic_rings(m):
    return sum(1 for r in Chem.GetSSSR(m) if all(m.GetAtomWithIdx(i).GetIsAromatic() for i in r))


def main():
    mols = read_lines("molecules.txt")
    egg = load_egg()
    brenk = load_alerts("brenk.smarts")
    pains = load_alerts("pains.smarts")
    rows = []
    for s in mols:
        m = Chem.MolFromSmiles(s)
        tpsa = rdmd.CalcTPSA(m)
        logp = Crippen.MolLogP(m)
        mw = Descriptors.MolWt(m)
        donors, acceptors = lipinski_counts(m)
        lip = mw <= 500 and logp <= 5 and donors <= 5 and acceptors <= 10
        rows.append({
            "smiles": s,
            "mw": f"{mw:.6f}",
            "logp": f"{logp:.6f}",
            "tpsa": f"{tpsa:.6f}",
            "qed": f"{QED.qed(m):.6f}",
            "sa": f"{sascorer.calculateScore(m):.6f}",
            "hbd": donors,
            "hba": acceptors,
            "rotb": rdmd.CalcNumRotatableBonds(m, rdmd.NumRotatableBondsOptions.Strict),
            "arom": aromatic_rings(m),
            "bbb": "Yes" if egg_inside(tpsa, logp, *egg["yolk"]) else "No",
            "gi": "High" if egg_inside(tpsa, logp, *egg["white"]) else "Low",
            "lipinski": "True" if lip else "False",
            "brenk": "False" if any(alert_hit(m, a) for a in brenk.values()) else "True",
            "pains": "False" if any(alert_hit(m, a) for a in pains.values()) else "True",
        })
    with open(os.path.join(DATA, "reference_values.csv"), "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    print("reference rows", len(rows))

    rng = random.Random(20240607)
    with open(os.path.join(DATA, "spellings.tsv"), "w") as f:
        f.write("# smiles\talternative spelling of the same graph\n")
        for s in mols:
            m = Chem.MolFromSmiles(s)
            perm = list(range(m.GetNumAtoms()))
            rng.shuffle(perm)
            alt = Chem.MolToSmiles(Chem.RenumberAtoms(m, perm), canonical=False)
            if alt == s and m.GetNumAtoms() > 1:
                alt = Chem.MolToSmiles(m, canonical=False, rootedAtAtom=m.GetNumAtoms() - 1)
            f.write(f"{s}\t{alt}\n")


if __name__ == "__main__":
    main()
