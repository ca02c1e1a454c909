#!/usr/bin/env python3
#
# opforge - fragment-seeded molecule generation toolkit
# SPDX-License-Identifier: Apache-2.0
#
"""Freezes reference descriptor and QED values computed with RDKit.

Writes tests/data/qed_reference.tsv (curated molecule list) and
tests/data/sarin_descriptors.tsv. ALERTS is recomputed with the shipped
alert set (data/alerts.tsv) so both sides score the same patterns; the
unweighted QED is reported with that alert count and with ALERTS = 0.

Requires RDKit; it is an offline oracle, not a build dependency.
"""

import argparse
import math

from rdkit import Chem
from rdkit.Chem import QED

# Marketed drugs, agrochemicals and organophosphorus compounds.
CURATED = [
    ("sarin", "CC(C)OP(C)(=O)F"),
    ("soman", "CC(OP(C)(=O)F)C(C)(C)C"),
    ("paraoxon", "CCOP(=O)(OCC)Oc1ccc(cc1)[N+](=O)[O-]"),
    ("dichlorvos", "COP(=O)(OC)OC=C(Cl)Cl"),
    ("trimethyl_phosphate", "COP(=O)(OC)OC"),
    ("fosfomycin", "CC1OC1P(=O)(O)O"),
    ("aspirin", "CC(=O)Oc1ccccc1C(=O)O"),
    ("paracetamol", "CC(=O)Nc1ccc(O)cc1"),
    ("ibuprofen", "CC(C)Cc1ccc(cc1)C(C)C(=O)O"),
    ("caffeine", "Cn1cnc2c1c(=O)n(C)c(=O)n2C"),
    ("nicotine", "CN1CCCC1c1cccnc1"),
    ("diazepam", "CN1C(=O)CN=C(c2ccccc2)c2cc(Cl)ccc21"),
    ("fluoxetine", "CNCCC(Oc1ccc(cc1)C(F)(F)F)c1ccccc1"),
    ("sertraline", "CNC1CCC(c2ccc(Cl)c(Cl)c2)c2ccccc21"),
    ("metformin", "CN(C)C(=N)NC(=N)N"),
    ("atenolol", "CC(C)NCC(O)COc1ccc(CC(N)=O)cc1"),
    ("propranolol", "CC(C)NCC(O)COc1cccc2ccccc12"),
    ("omeprazole", "COc1ccc2[nH]c(nc2c1)S(=O)Cc1ncc(C)c(OC)c1C"),
    ("ciprofloxacin", "OC(=O)c1cn(C2CC2)c2cc(N3CCNCC3)c(F)cc2c1=O"),
    ("lidocaine", "CCN(CC)CC(=O)Nc1c(C)cccc1C"),
    ("procaine", "CCN(CC)CCOC(=O)c1ccc(N)cc1"),
    ("haloperidol", "OC1(CCN(CCCC(=O)c2ccc(F)cc2)CC1)c1ccc(Cl)cc1"),
    ("chlorpromazine", "CN(C)CCCN1c2ccccc2Sc2ccc(Cl)cc21"),
    ("imatinib", "Cc1ccc(NC(=O)c2ccc(CN3CCN(C)CC3)cc2)cc1Nc1nccc(n1)-c1cccnc1"),
    ("celecoxib", "Cc1ccc(cc1)-c1cc(nn1-c1ccc(cc1)S(N)(=O)=O)C(F)(F)F"),
    ("sildenafil", "CCCc1nn(C)c2c1nc([nH]c2=O)-c1cc(ccc1OCC)S(=O)(=O)N1CCN(C)CC1"),
    ("warfarin", "CC(=O)CC(c1ccccc1)c1c(O)c2ccccc2oc1=O"),
    ("naproxen", "COc1ccc2cc(ccc2c1)C(C)C(=O)O"),
    ("diclofenac", "OC(=O)Cc1ccccc1Nc1c(Cl)cccc1Cl"),
    ("loratadine", "CCOC(=O)N1CCC(=C2c3ccc(Cl)cc3CCc3cccnc32)CC1"),
    ("cetirizine", "OC(=O)COCCN1CCN(CC1)C(c1ccccc1)c1ccc(Cl)cc1"),
    ("metoprolol", "COCCc1ccc(OCC(O)CNC(C)C)cc1"),
    ("furosemide", "NS(=O)(=O)c1cc(C(=O)O)c(NCc2ccco2)cc1Cl"),
    ("hydrochlorothiazide", "NS(=O)(=O)c1cc2c(cc1Cl)NCNS2(=O)=O"),
    ("carbamazepine", "NC(=O)N1c2ccccc2C=Cc2ccccc21"),
    ("phenytoin", "O=C1NC(=O)C(N1)(c1ccccc1)c1ccccc1"),
    ("theophylline", "Cn1c2nc[nH]c2c(=O)n(C)c1=O"),
    ("isoniazid", "NNC(=O)c1ccncc1"),
    ("pyrazinamide", "NC(=O)c1cnccn1"),
    ("metronidazole", "Cc1ncc(n1CCO)[N+](=O)[O-]"),
    ("trimethoprim", "COc1cc(Cc2cnc(N)nc2N)cc(OC)c1OC"),
    ("sulfamethoxazole", "Cc1cc(NS(=O)(=O)c2ccc(N)cc2)no1"),
    ("chloramphenicol", "OCC(NC(=O)C(Cl)Cl)C(O)c1ccc(cc1)[N+](=O)[O-]"),
    ("tamoxifen", "CCC(=C(c1ccccc1)c1ccc(OCCN(C)C)cc1)c1ccccc1"),
    ("verapamil", "COc1ccc(CCN(C)CCCC(C#N)(C(C)C)c2ccc(OC)c(OC)c2)cc1OC"),
    ("amlodipine", "CCOC(=O)C1=C(COCCN)NC(C)=C(C1c1ccccc1Cl)C(=O)OC"),
    ("glyphosate", "OC(=O)CNCP(=O)(O)O"),
    ("malathion_oxon", "CCOC(=O)CC(SP(=O)(OC)OC)C(=O)OCC"),
    ("benzene", "c1ccccc1"),
    ("ethanol", "CCO"),
]


def alert_query(smiles):
    """SMARTS matching element, aromaticity and bond order only."""
    mol = Chem.MolFromSmiles(smiles, sanitize=False)
    Chem.SanitizeMol(mol, Chem.SANITIZE_SETAROMATICITY | Chem.SANITIZE_SYMMRINGS)
    for atom in mol.GetAtoms():
        spec = "a" if atom.GetIsAromatic() else "A"
        atom_query = Chem.AtomFromSmarts(f"[#{atom.GetAtomicNum()}&{spec}]")
        mol = Chem.RWMol(mol)
        mol.ReplaceAtom(atom.GetIdx(), atom_query)
    symbols = {Chem.BondType.SINGLE: "-", Chem.BondType.DOUBLE: "=",
               Chem.BondType.TRIPLE: "#", Chem.BondType.AROMATIC: ":"}
    for bond in mol.GetBonds():
        mol.ReplaceBond(bond.GetIdx(),
                        Chem.BondFromSmarts(symbols[bond.GetBondType()]))
    return Chem.MolFromSmarts(Chem.MolToSmarts(mol))


def load_alerts(path):
    alerts = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            name, smiles = line.rstrip("\n").split("\t")[:2]
            alerts.append((name, alert_query(smiles)))
    return alerts


def unweighted_qed(props):
    values = [QED.ads(x, p) for x, p in zip(props, QED.adsParameters.values())]
    # same floor as the library
    return math.exp(sum(math.log(max(v, 1e-6)) for v in values) / len(values))


def row(smiles, alerts):
    mol = Chem.MolFromSmiles(smiles)
    p = QED.properties(mol)
    shipped = sum(1 for _, q in alerts if mol.HasSubstructMatch(q))
    with_alerts = p._replace(ALERTS=shipped)
    return {
        "smiles": Chem.MolToSmiles(mol, isomericSmiles=False),
        "mw": f"{p.MW:.6f}",
        "alogp": f"{p.ALOGP:.6f}",
        "hba": str(p.HBA),
        "hbd": str(p.HBD),
        "psa": f"{p.PSA:.6f}",
        "rotb": str(p.ROTB),
        "arom": str(p.AROM),
        "alerts": str(shipped),
        "qed": f"{unweighted_qed(with_alerts):.8f}",
        "qed_no_alerts": f"{unweighted_qed(p._replace(ALERTS=0)):.8f}",
    }


COLUMNS = ["name", "smiles", "mw", "alogp", "hba", "hbd", "psa", "rotb",
           "arom", "alerts", "qed", "qed_no_alerts"]


def write(path, rows):
    with open(path, "w") as fh:
        fh.write("#version\t2026.1\n")
        fh.write("# reference values from RDKit QED.properties; alerts use "
                 "data/alerts.tsv; qed is unweighted\n")
        fh.write("\t".join(COLUMNS) + "\n")
        for r in rows:
            fh.write("\t".join(r[c] for c in COLUMNS) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alerts", default="data/alerts.tsv")
    ap.add_argument("--out-dir", default="tests/data")
    args = ap.parse_args()
    alerts = load_alerts(args.alerts)
    rows = [dict(name=name, **row(smi, alerts)) for name, smi in CURATED]
    write(f"{args.out_dir}/qed_reference.tsv", rows)
    write(f"{args.out_dir}/sarin_descriptors.tsv", rows[:1])


if __name__ == "__main__":
    main()
