#!/usr/bin/env python3
#
# opforge - fragment-seeded molecule generation toolkit
# SPDX-License-Identifier: Apache-2.0
#
"""Builds the synthetic desk corpus (data/desk_corpus.smi).

Molecules are assembled from drug-like ring cores, linkers and terminal
substituents, sanitized and written as RDKit canonical aromatic SMILES
without stereo. About 3% are organophosphorus esters written with the
"COP(=O)(F)" / "COP(=O)(OC)" prefix so the model sees P/F/O/C chemistry.

Requires RDKit; it is an offline data tool, not a build dependency.
"""

import argparse
import random
import re

from rdkit import Chem, RDLogger

RDLogger.DisableLog("rdApp.*")

# "{}" marks an attachment point; unused points become [H].
CORES = [
    "c1cc{}c{}cc1{}",
    "c1ccc{}cc1",
    "c1cc{}ncc1{}",
    "c1cnc{}nc1{}",
    "c1ccc2c(c1{})cc{}[nH]2",
    "c1ccc2nc{}[nH]c2c1{}",
    "c1cc2ccc{}cc2nc1{}",
    "c1cc{}sc1{}",
    "c1cc{}oc1{}",
    "c1nc{}sc1{}",
    "c1nc{}oc1{}",
    "c1cc{}n{}n1",
    "c1nc{}n{}c1",
    "C1CCN({})CC1{}",
    "C1CN({})CCN1{}",
    "C1COCCN1{}",
    "C1CCC{}CC1{}",
    "C1CCN{}C1{}",
    "C1CCOC1{}",
    "O=C1CCC{}N1{}",
    "C1CC1{}",
    "c1ccc2c(c1)OCO2{}",
    "O=c1cc{}oc2ccccc12",
    "c1cc{}c2ccccc2n1",
]

LINKERS = [
    "C(=O)N{}",
    "NC(=O){}",
    "C{}",
    "CC{}",
    "O{}",
    "OC{}",
    "S(=O)(=O)N{}",
    "N{}",
    "C(=O){}",
    "CN{}",
    "CO{}",
    "NC(=O)N{}",
    "C(C)N{}",
    "",
]

TERMINALS = [
    "F", "Cl", "Br", "C", "CC", "OC", "C(F)(F)F", "C#N", "O", "N",
    "C(=O)O", "C(N)=O", "C(C)C", "OCC", "S(C)(=O)=O", "N(C)C", "C(C)=O",
    "NC(C)=O", "OC(F)(F)F", "CO", "CCN(C)C", "C1CC1", "SC", "CCC",
]

P_PREFIXES = ["COP(=O)(F)", "COP(=O)(OC)", "CCOP(=O)(OCC)", "CC(C)OP(C)(=O)"]
P_TAILS = [
    "C", "CC", "Cc1ccccc1", "CCc1ccccc1", "Oc1ccccc1", "OCc1ccccc1",
    "OCCN(C)C", "CCC(C)C", "Cc1ccc(Cl)cc1", "OCC1CCCCC1", "OC1CCCCC1",
    "Cc1ccccn1", "CCCCC", "OCCOC", "Cc1ccc(F)cc1", "CC(=O)N", "OCC(C)C",
    "Cc1cccs1", "CCOc1ccccc1", "Oc1ccc(C)cc1", "CC1CCNCC1", "F",
    "C(C)c1ccccc1", "OCCc1ccccc1", "CC#N",
]


_labels = iter(range(10, 10**9))


def relabel(fragment):
    # Fresh ring labels so nested fragments never close each other's rings.
    fresh = {}
    return re.sub(r"\d", lambda m: fresh.setdefault(m.group(), f"%{next(_labels) % 90 + 10}"),
                  fragment)


def fill(template, rng, depth):
    parts = relabel(template).split("{}")
    out = [parts[0]]
    for tail in parts[1:]:
        out.append(f"({substituent(rng, depth)})" if rng.random() < 0.55 else "([H])")
        out.append(tail)
    return "".join(out)


def substituent(rng, depth):
    if depth > 0 and rng.random() < 0.45:
        linker = rng.choice(LINKERS)
        ring = fill(rng.choice(CORES), rng, depth - 1)
        return linker.replace("{}", "") + ring if linker else ring
    return relabel(rng.choice(TERMINALS))


def canonical(smiles):
    mol = Chem.MolFromSmiles(smiles)
    if mol is None:
        return None
    out = Chem.MolToSmiles(mol, isomericSmiles=False)
    # ring label 0 and multi-fragment output are outside the grammar
    if "." in out or re.search(r"(?<!%)0", out):
        return None
    return out


def p_ester(rng):
    prefix = rng.choice(P_PREFIXES)
    if rng.random() < 0.4:
        tail = rng.choice(P_TAILS)
    else:
        tail = rng.choice(["C", "O", "CC", "OC", "CCC"]) + fill(rng.choice(CORES), rng, 0)
    tail_mol = Chem.MolFromSmiles(tail)
    if tail_mol is None:
        return None
    # rooted at the attachment atom, with plain ring digits
    smiles = prefix + Chem.MolToSmiles(tail_mol, isomericSmiles=False, rootedAtAtom=0)
    return smiles if canonical(smiles) is not None else None


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=20240613)
    ap.add_argument("--p-fraction", type=float, default=0.03)
    ap.add_argument("--out", default="data/desk_corpus.smi")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    n_p = round(args.count * args.p_fraction)
    seen = set()
    rows = []
    while len(rows) < args.count - n_p:
        smi = canonical(fill(rng.choice(CORES), rng, 2))
        if smi is None or smi in seen:
            continue
        heavy = Chem.MolFromSmiles(smi).GetNumHeavyAtoms()
        if not 8 <= heavy <= 38:
            continue
        seen.add(smi)
        rows.append(smi)
    attempts = 0
    while len(rows) < args.count and attempts < 100000:
        attempts += 1
        smi = p_ester(rng)
        if smi is None or smi in seen:
            continue
        seen.add(smi)
        rows.append(smi)
    # fill any remainder with organic molecules if the ester space runs out
    while len(rows) < args.count:
        smi = canonical(fill(rng.choice(CORES), rng, 2))
        if smi and smi not in seen:
            seen.add(smi)
            rows.append(smi)
    rng.shuffle(rows)

    with open(args.out, "w") as fh:
        fh.write("# opforge desk corpus: synthetic drug-like molecules, "
                 f"seed {args.seed}\n")
        for i, smi in enumerate(rows):
            fh.write(f"{smi} desk-{i:05d}\n")


if __name__ == "__main__":
    main()
