"""Fits data/crippen_lite.tsv against RDKit's per-atom Crippen contributions.

Usage: fit_crippen.py <atom-type dumper> [out.tsv]

The dumper reads SMILES lines on stdin and prints, per molecule, "OK" then
one "heavy_type,h_type,total_h" field per atom (or "ERR\tmessage"). The
chemreward CLI provides it as `chemreward describe --atom-types`.
Training set: RDKit-aromatized NCI first_5K. Each atom is one least-squares
row: contribution = value[heavy_type] + total_h * value[h_type].
"""
import os
import subprocess
import sys

import numpy as np
from rdkit import Chem, RDConfig
from rdkit.Chem import rdMolDescriptors


def heavy_contributions(mol):
    """Per heavy atom: its own Crippen value plus those of its hydrogens."""
    withh = Chem.AddHs(mol)
    contribs = rdMolDescriptors._CalcCrippenContribs(withh)
    out = [contribs[i][0] for i in range(mol.GetNumAtoms())]
    for atom in withh.GetAtoms():
        if atom.GetIdx() >= mol.GetNumAtoms():
            out[atom.GetNeighbors()[0].GetIdx()] += contribs[atom.GetIdx()][0]
    return out


def main():
    dumper = sys.argv[1].split()
    out_path = sys.argv[2] if len(sys.argv) > 2 else None
    nci = os.path.join(RDConfig.RDDataDir, "NCI", "first_5K.smi")
    mols = []
    for line in open(nci):
        if not line.strip():
            continue
        mol = Chem.MolFromSmiles(line.split()[0])
        if mol is None or any(a.GetAtomicNum() in (0, 1) for a in mol.GetAtoms()):
            continue
        mols.append((Chem.MolToSmiles(mol), None))
    smiles = [s for s, _ in mols]
    proc = subprocess.run(dumper, input="\n".join(smiles) + "\n", capture_output=True, text=True, check=True)
    lines = proc.stdout.splitlines()
    assert len(lines) == len(smiles)

    rows, targets = [], []
    h_mismatch = parse_errors = 0
    for smi, line in zip(smiles, lines):
        fields = line.split("\t")
        if fields[0] != "OK":
            parse_errors += 1
            continue
        mol = Chem.MolFromSmiles(smi)
        contribs = heavy_contributions(mol)
        atoms = [f.split(",") for f in fields[1:]]
        if len(atoms) != mol.GetNumAtoms() or any(
            int(h) != a.GetTotalNumHs() for (_, _, h), a in zip(atoms, mol.GetAtoms())
        ):
            h_mismatch += 1
            continue
        for (heavy, htype, h), logp in zip(atoms, contribs):
            rows.append((heavy, htype, int(h)))
            targets.append(logp)

    names = sorted({r[0] for r in rows} | {r[1] for r in rows})
    col = {n: i for i, n in enumerate(names)}
    a = np.zeros((len(rows), len(names)))
    for i, (heavy, htype, h) in enumerate(rows):
        a[i, col[heavy]] += 1.0
        if h:
            a[i, col[htype]] += h
    y = np.array(targets)
    x, *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = a @ x - y
    counts = a.astype(bool).sum(axis=0)
    print(f"molecules={len(smiles)} parse_errors={parse_errors} h_mismatch={h_mismatch} atoms={len(rows)}",
          file=sys.stderr)
    print(f"per-atom rmse={np.sqrt(np.mean(resid ** 2)):.4f}", file=sys.stderr)

    out = ["#version=crippen-lite-1",
           "# Reduced Crippen-style LogP atom contributions (type, value, atoms in fit).",
           "# Fitted by tools/scripts/fit_crippen.py to RDKit per-atom Crippen values on",
           "# RDKit-aromatized NCI first_5K; regenerate whenever atom typing changes.",
           "# Hydrogens: total_h times the H_* value of their heavy atom."]
    for n in names:
        out.append(f"{n}\t{x[col[n]]:.4f}\t{int(counts[col[n]])}")
    # element defaults: mean of that element's fitted types
    by_el = {}
    for n in names:
        el = n.split("_")[0]
        if not n.startswith("H_") and not n.startswith("default"):
            by_el.setdefault(el, []).append(x[col[n]])
    for el in ("C", "N", "O", "S"):
        if el in by_el and f"default_{el}" not in col:
            out.append(f"default_{el}\t{np.mean(by_el[el]):.4f}\t0")
    if "default" not in col:
        out.append("default\t0.0000\t0")
    text = "\n".join(out) + "\n"
    if out_path:
        open(out_path, "w").write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
