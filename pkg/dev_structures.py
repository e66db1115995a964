"""Dev: verify/pin structure-level signs (products, boundary)."""
import sys
sys.path.insert(0, "src")

from lhk import corpus
from lhk.intmat import IntMat
from lhk.chain import ChainComplex, homology
from lhk.complexes import derived_subdivision, cellular_chain_complex, split_flag_id
from lhk.structures import (
    TensorChain, SymmetricStructure, symmetric_construction, slant,
    is_poincare, quadratic_from_form, symmetrize, product_sym_sym,
    product_sym_quad, boundary_construction, signature_of_form,
    _model_diagonal,
)


def subdivided_with_class(name):
    X = corpus.CORPUS_BUILDERS[name]()
    sd = derived_subdivision(X)
    S = cellular_chain_complex(sd.complex)
    n = X.dim()
    # fundamental cycle of the subdivision by orientation propagation
    import lhk.intmat as im
    top = S.labels(n)
    d = S.diff(n)
    # propagate: coefficients +-1 with d z = 0
    coeff = {top[0]: 1}
    frontier = [top[0]]
    adj = {}
    for i in range(S.rank(n - 1)):
        nz = [(j, d.get(i, j)) for j in range(S.rank(n)) if d.get(i, j)]
        if len(nz) == 2:
            (j1, v1), (j2, v2) = nz
            adj.setdefault(top[j1], []).append((top[j2], -v1 * v2))
            adj.setdefault(top[j2], []).append((top[j1], -v1 * v2))
    while frontier:
        cur = frontier.pop()
        for (nxt, rel) in adj.get(cur, ()):
            if nxt not in coeff:
                coeff[nxt] = coeff[cur] * rel
                frontier.append(nxt)
    z = coeff
    # check cycle
    bd = {}
    for lbl, c in z.items():
        j = S.index(n, lbl)
        for i in range(S.rank(n - 1)):
            v = d.get(i, j)
            if v:
                bd[i] = bd.get(i, 0) + v * c
    assert not any(bd.values()), f"{name}: propagation gave a non-cycle"
    return S, z, n


def vertex_of(lbl):
    return split_flag_id(lbl)


def main():
    # 1. diagonal on the 1-simplex
    M1 = _model_diagonal(1, 0)
    print("Delta_0([01]) =", sorted(M1.entries.items()))

    # 2. symmetric construction: circle and octahedron Poincare
    for name in ("circle", "octahedron"):
        S, z, n = subdivided_with_class(name)
        phi = symmetric_construction(S, vertex_of, z, n)
        ok, cert = is_poincare(S, phi)
        print(name, "poincare:", ok, cert)
        # doubled class fails
        z2 = {l: 2 * c for l, c in z.items()}
        phi2 = symmetric_construction(S, vertex_of, z2, n)
        ok2, cert2 = is_poincare(S, phi2)
        print(name, "doubled:", ok2, cert2)

    # 3. forms
    for name, Q, expect in (
            ("<1>", [[1]], False),
            ("hyperbolic", [[0, 1], [0, 0]], True),
    ):
        C, psi = quadratic_from_form(Q)
        ok, cert = is_poincare(C, psi)
        print(name, "quad poincare:", ok, cert)
        assert ok == expect
        phi = symmetrize(psi)
        print(name, "symmetrized ok")

    # 4. product sym x sym: point x circle, circle x circle
    Sp = ChainComplex({0: ["pt"]}, {})
    phi_pt = SymmetricStructure(Sp, 0, [TensorChain(Sp, Sp, 0, {(0, "pt", "pt"): 1})])
    S1, z1, _ = subdivided_with_class("circle")
    phi1 = symmetric_construction(S1, vertex_of, z1, 1)
    try:
        CD, pp = product_sym_sym((Sp, phi_pt), (S1, phi1))
        print("point x circle: relations OK; poincare:",
              is_poincare(CD, pp)[0])
    except ValueError as e:
        print("point x circle FAILS:", e)
    try:
        CD, pp = product_sym_sym((S1, phi1), (Sp, phi_pt))
        print("circle x point: relations OK")
    except ValueError as e:
        print("circle x point FAILS:", e)
    try:
        CD, pp = product_sym_sym((S1, phi1), (S1, phi1))
        ok, cert = is_poincare(CD, pp)
        print("circle x circle: relations OK; poincare:", ok, cert)
    except ValueError as e:
        print("circle x circle FAILS:", e)

    # 5. product sym x quad
    C8, psi8 = quadratic_from_form([[1]])
    try:
        CD, pq = product_sym_quad((S1, phi1), (C8, psi8))
        print("circle x <1>-quad: relations OK")
    except ValueError as e:
        print("circle x quad FAILS:", e)
    try:
        CD, pq = product_sym_quad((Sp, phi_pt), (C8, psi8))
        ok = pq.psi(0).entries == psi8.psi(0).entries
        print("point x quad unit exact:", ok)
    except ValueError as e:
        print("point x quad FAILS:", e)

    # 6. boundary construction
    for name, Q, expect_h in (
            ("<2>", [[2]], "Z/2"),
            ("hyp", [[0, 1], [0, 0]], "acyclic"),
    ):
        C, psi = quadratic_from_form(Q)
        phi = symmetrize(psi)
        try:
            dC, dphi = boundary_construction(C, phi)
            h = homology(dC)
            ok, cert = is_poincare(dC, dphi)
            print(f"boundary {name}: H = {h}, poincare: {ok}")
        except ValueError as e:
            print(f"boundary {name} FAILS:", e)
    # boundary of the circle structure (Poincare: acyclic boundary)
    try:
        dC, dphi = boundary_construction(S1, phi1)
        print("boundary(circle): H =", homology(dC),
              "poincare:", is_poincare(dC, dphi)[0])
    except ValueError as e:
        print("boundary circle FAILS:", e)

    # 7. E8
    E8 = [[2, -1, 0, 0, 0, 0, 0, 0],
          [-1, 2, -1, 0, 0, 0, 0, 0],
          [0, -1, 2, -1, 0, 0, 0, 0],
          [0, 0, -1, 2, -1, 0, 0, 0],
          [0, 0, 0, -1, 2, -1, 0, -1],
          [0, 0, 0, 0, -1, 2, -1, 0],
          [0, 0, 0, 0, 0, -1, 2, 0],
          [0, 0, 0, 0, -1, 0, 0, 2]]
    print("sig(E8) =", signature_of_form(E8))


if __name__ == "__main__":
    main()
