"""Generate the FCIDUMP fixtures under data/fcidump with PySCF.

Writes one FCIDUMP per geometry plus reference.json holding the FCI (or
CASCI, for active-space files) energy in the file's electron/spin sector.
Run from the repository root: python3 scripts/gen_fixtures.py
"""
import json
import os

from pyscf import fci, gto, mcscf, scf
from pyscf.tools import fcidump

OUT = os.path.join("data", "fcidump")
FLOAT = " %.17g"


def chain(n, spacing):
    return [("H", (0.0, 0.0, i * spacing)) for i in range(n)]


def full_space(name, atoms, charge=0):
    mol = gto.M(atom=atoms, basis="sto-3g", charge=charge, spin=0, unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    path = os.path.join(OUT, name)
    fcidump.from_scf(mf, path, tol=1e-15, float_format=FLOAT)
    e_fci = fci.FCI(mf).kernel()[0]
    return path, e_fci


def active_space(name, atoms, ncas, nelecas):
    mol = gto.M(atom=atoms, basis="sto-3g", spin=0, unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    mc = mcscf.CASCI(mf, ncas, nelecas)
    e_cas = mc.kernel()[0]
    path = os.path.join(OUT, name)
    fcidump.from_mcscf(mc, path, tol=1e-15, float_format=FLOAT)
    return path, e_cas


def main():
    refs = {}
    for r in [0.5, 1.0, 1.5, 2.0, 2.5]:
        path, e = full_space(os.path.join("h2_scan", "r%.2f.fcidump" % r), chain(2, r))
        refs[os.path.relpath(path, OUT)] = e
    for name, atoms, charge in [
        ("h2_0.7414.fcidump", chain(2, 0.7414), 0),
        ("h3p_chain_0.90.fcidump", chain(3, 0.90), 1),
        ("h4_chain_0.90.fcidump", chain(4, 0.90), 0),
        ("h5p_chain_0.90.fcidump", chain(5, 0.90), 1),
    ]:
        path, e = full_space(name, atoms, charge)
        refs[os.path.relpath(path, OUT)] = e
    # 12-qubit stand-ins for a reactant / transition-state pair
    for r in [0.90, 1.10]:
        path, e = full_space("h6_chain_%.2f.fcidump" % r, chain(6, r))
        refs[os.path.relpath(path, OUT)] = e
    beh2 = [("Be", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 1.33)), ("H", (0.0, 0.0, -1.33))]
    path, e = active_space("beh2_cas4e5o_1.33.fcidump", beh2, 5, 4)
    refs[os.path.relpath(path, OUT)] = e
    with open(os.path.join(OUT, "reference.json"), "w") as f:
        json.dump(dict(sorted(refs.items())), f, indent=2)
        f.write("\n")
    for k, v in sorted(refs.items()):
        print(k, repr(v))


if __name__ == "__main__":
    main()
