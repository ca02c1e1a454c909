#!/usr/bin/env python3
#
# opforge - fragment-seeded molecule generation toolkit
# SPDX-License-Identifier: Apache-2.0
#
"""Exports the published parameter tables shipped in data/.

Writes atomic_weights.tsv, crippen.tsv, acceptors.tsv and qed_params.tsv
from the tables distributed with RDKit. tpsa.tsv and alerts.tsv are
maintained by hand.

Requires RDKit; it is an offline data tool, not a build dependency.
"""

import argparse
import os

from rdkit import Chem, RDConfig
from rdkit.Chem import QED

ELEMENTS = ["H", "B", "C", "N", "O", "F", "P", "S", "Cl", "Br", "I"]
VERSION = "2026.1"


def header(fh, what, columns):
    fh.write(f"#version\t{VERSION}\n")
    fh.write(f"# {what}\n")
    fh.write(f"# columns: {columns}\n")


def atomic_weights(out):
    pt = Chem.GetPeriodicTable()
    with open(os.path.join(out, "atomic_weights.tsv"), "w") as fh:
        header(fh, "standard atomic weights (g/mol)", "element weight")
        for e in ELEMENTS:
            fh.write(f"{e}\t{pt.GetAtomicWeight(e):.6g}\n")


# The compiled default table behind MolLogP writes these two H2 rows by
# atomic number, so H on aromatic N stays H3; Crippen.txt spells them with
# aliphatic symbols. Ship the compiled form.
H2_ROWS = {
    "[#1]O[!C;!N;!O;!S]": "[#1]O[!#6;!#7;!#8;!#16]",
    "[#1][!C;!N;!O]": "[#1][!#6;!#7;!#8]",
}


def crippen(out):
    src = os.path.join(RDConfig.RDDataDir, "Crippen.txt")
    with open(src) as fin, open(os.path.join(out, "crippen.tsv"), "w") as fh:
        header(fh, "Wildman-Crippen atom types; first matching row wins, "
               "the first query atom is the typed atom",
               "type query logp_contribution")
        for line in fin:
            if line.startswith("#") or not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) < 3 or not fields[0]:
                continue
            query = H2_ROWS.get(fields[1], fields[1])
            fh.write(f"{fields[0]}\t{query}\t{fields[2]}\n")


def acceptors(out):
    with open(os.path.join(out, "acceptors.tsv"), "w") as fh:
        header(fh, "hydrogen-bond acceptor queries; HBA sums the atoms "
               "matched by each row", "name query")
        for i, smarts in enumerate(QED.AcceptorSmarts, start=1):
            fh.write(f"A{i}\t{smarts}\n")


def qed_params(out):
    with open(os.path.join(out, "qed_params.tsv"), "w") as fh:
        header(fh, "asymmetric double sigmoid desirability parameters",
               "descriptor a b c d e f dmax")
        for name, p in QED.adsParameters.items():
            fh.write("\t".join([name] + [repr(v) for v in p]) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data")
    args = ap.parse_args()
    atomic_weights(args.out)
    crippen(args.out)
    acceptors(args.out)
    qed_params(args.out)


if __name__ == "__main__":
    main()
