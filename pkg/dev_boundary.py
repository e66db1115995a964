"""Dev: pin the boundary-structure signs by exact constraint search."""
import itertools
import sys
sys.path.insert(0, "src")

from lhk import corpus
from lhk.intmat import IntMat
from lhk.chain import ChainComplex, ChainMap, homology, dualize, cone, suspend
from lhk.complexes import derived_subdivision, cellular_chain_complex, split_flag_id
from lhk.structures import (
    TensorChain, SymmetricStructure, symmetric_construction, slant,
    is_poincare, quadratic_from_form, symmetrize,
)
from dev_structures import subdivided_with_class, vertex_of


def try_boundary(C, phi, params):
    (g0, g1, g2, useT, c_sign, kap_c, e_sign, kap_e) = params
    n = phi.n
    f = slant(phi.phi(0), C)
    dC_full = cone(f)
    basis = {r - 1: dC_full.labels(r) for r in dC_full.degrees()}
    d = {r - 1: dC_full.diff(r).scaled(-1) for r in dC_full.d}
    dC = ChainComplex(basis, d, check=True)

    def lab_embed(src, tgt, r, shift, fn):
        m = IntMat(tgt.rank(r + shift), src.rank(r))
        for j, lbl in enumerate(src.labels(r)):
            m.set(tgt.index(r + shift, fn(lbl)), j, 1)
        return m

    iota_C = ChainMap(C, dC, -1, {
        r: lab_embed(C, dC, r, -1, lambda l: (0, l))
        for r in C.degrees()}, check=False)
    TC = dualize(C)
    # j is not a chain map; build unchecked
    iota_T = ChainMap(TC, dC, n, {
        r: lab_embed(TC, dC, r, n, lambda l: (1, l))
        for r in TC.degrees()}, check=False)

    kappas = {
        0: lambda p: 1,
        1: lambda p: (-1) ** p,
        2: lambda p: (-1) ** (p * (p - 1) // 2),
        3: lambda p: (-1) ** (p * (p + 1) // 2),
    }

    k_out = max(n - 1 + 1, 1)
    phis = []
    for s in range(k_out + 1):
        nxt = phi.phi(s + 1)
        if useT:
            nxt = nxt.switch()
        term = nxt.transport(iota_C, iota_C)
        term = term.scaled((-1) ** (g0 + g1 * n + g2 * s))
        if s == 0:
            if c_sign:
                theta = TensorChain(C, TC, 0)
                for p in C.degrees():
                    for lbl in C.labels(p):
                        theta.add_entry(p, lbl, ("*", lbl), kappas[kap_c](p))
                term = term.add(theta.transport(iota_C, iota_T),
                                scale=c_sign)
            if e_sign:
                theta2 = TensorChain(TC, C, 0)
                for p in C.degrees():
                    for lbl in C.labels(p):
                        theta2.add_entry(-p, ("*", lbl), lbl,
                                         kappas[kap_e](p))
                term = term.add(theta2.transport(iota_T, iota_C),
                                scale=e_sign)
        phis.append(term)
    dphi = SymmetricStructure(dC, n - 1, phis)  # raises if relations fail
    return dC, dphi


def main():
    cases = []
    C2, psi2 = quadratic_from_form([[2]])
    cases.append((C2, symmetrize(psi2)))
    Ch, psih = quadratic_from_form([[0, 1], [0, 0]])
    cases.append((Ch, symmetrize(psih)))
    S1, z1, _ = subdivided_with_class("circle")
    cases.append((S1, symmetric_construction(S1, vertex_of, z1, 1)))
    Si, zi, _ = subdivided_with_class("octahedron")
    cases.append((Si, symmetric_construction(Si, vertex_of, zi, 2)))

    survivors = []
    grid = itertools.product((0, 1), (0, 1), (0, 1), (0, 1),
                             (0, 1, -1), (0, 1, 2, 3), (0, 1, -1),
                             (0, 1, 2, 3))
    for params in grid:
        ok = True
        results = []
        for C, phi in cases:
            try:
                dC, dphi = try_boundary(C, phi, params)
                pok, cert = is_poincare(dC, dphi)
                results.append(pok)
            except ValueError:
                ok = False
                break
        if ok:
            survivors.append((params, results))
    for p, r in survivors:
        print("SURVIVES", p, "boundary-poincare:", r)
    print("total:", len(survivors))


if __name__ == "__main__":
    main()
