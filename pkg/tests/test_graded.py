import random

import pytest

from lhk import corpus
from lhk.intmat import IntMat
from lhk.chain import (
    ChainComplex, homology, dualize, suspend, is_chain_equivalence,
)
from lhk.complexes import derived_subdivision, cellular_chain_complex, \
    dual_cell, ValidationError
from lhk.graded import (
    GradedComplex, GradedMorphism, GradedHomChain, LOWER, UPPER,
    assemble, dissected_subdivision, dissected_cosubdivision,
    componentwise_dual, restrict, embed_I, dual_functor, graded_tensor,
    shift, chain_dual, chain_dual_map, identity_hom_chain, switch, counit,
    interval_functor, redistribution_iso, local_equivalence_check,
    random_graded_complex, FunctorOverX,
)


def labeled_same(A, B, map_lbl):
    """Equality of labelled complexes under a label bijection A -> B."""
    for n in set(A.degrees()) | set(B.degrees()):
        la = [map_lbl(lbl) for lbl in A.labels(n)]
        if sorted(map(repr, la)) != sorted(map(repr, B.labels(n))):
            return False
    for n in set(A.d) | set(B.d):
        dA = A.diff(n)
        for j, lbl in enumerate(A.labels(n)):
            cb = B.index(n, map_lbl(lbl))
            for i, lbl2 in enumerate(A.labels(n - 1)):
                rb = B.index(n - 1, map_lbl(lbl2))
                if dA.get(i, j) != B.diff(n).get(rb, cb):
                    return False
    return True


def test_assembly_identity_interval():
    X = corpus.interval()
    sd = derived_subdivision(X)
    D = dissected_subdivision(X, sd)
    A = assemble(D)
    Cp = cellular_chain_complex(sd.complex)
    assert labeled_same(A, Cp, lambda lbl: lbl[1])
    # explicit 3x2 check of the assembled differential
    assert Cp.rank(0) == 3 and Cp.rank(1) == 2
    d1 = Cp.diff(1)
    col = Cp.index(1, "v0<e")
    assert d1.get(Cp.index(0, "e"), col) == 1
    assert d1.get(Cp.index(0, "v0"), col) == -1


def test_assembly_identity_corpus():
    for name in ("point", "interval", "circle", "square", "octahedron"):
        X = corpus.CORPUS_BUILDERS[name]()
        sd = derived_subdivision(X)
        D = dissected_subdivision(X, sd)
        assert labeled_same(assemble(D), cellular_chain_complex(sd.complex),
                            lambda lbl: lbl[1])


def test_dissected_pieces_interval():
    X = corpus.interval()
    D = dissected_subdivision(X)
    assert {n: D.component("e").rank(n) for n in
            D.component("e").degrees()} == {0: 1}
    for v in ("v0", "v1"):
        comp = D.component(v)
        assert {n: comp.rank(n) for n in comp.degrees()} == {0: 1, 1: 1}
        h = homology(comp)
        assert h.is_trivial()


def test_dissected_torus_local_homology():
    X = corpus.torus()
    D = dissected_subdivision(X)
    for sigma in X.sorted_ids():
        h = homology(D.component(sigma))
        d = 2 - X.cells[sigma].dim
        assert h.betti(d) == 1 and h.degrees() == [d], sigma


def test_cosubdivision():
    X = corpus.square()
    sd = derived_subdivision(X)
    Dc = dissected_cosubdivision(X, sd)
    assert Dc.variance == UPPER
    from lhk.complexes import cochain_complex
    Cc = cochain_complex(sd.complex)
    assert labeled_same(assemble(Dc), Cc, lambda lbl: ("*", lbl[1][1]))


def test_restrict():
    X = corpus.square()
    D = dissected_subdivision(X)
    full = restrict(D, set(X.cells))
    assert assemble(full) == assemble(D)
    open_star = restrict(D, {"f"})
    assert assemble(open_star).rank(2) == \
        D.component("f").rank(2)
    # restriction to the star pair of eb assembles to C of the dual cone
    st = restrict(D, {"eb", "f"})
    DC = dual_cell(X, "eb")
    CD = cellular_chain_complex(DC.total)
    assert labeled_same(assemble(st), CD, lambda lbl: lbl[1])


def test_embed_I():
    X = corpus.square()
    D = dissected_subdivision(X)
    F = embed_I(D)
    F.assert_functorial()
    sd = derived_subdivision(X)
    for sigma in X.sorted_ids():
        DC = dual_cell(X, sigma, sd)
        CD = cellular_chain_complex(DC.total)
        assert labeled_same(F.value(sigma), CD, lambda lbl: lbl[1]), sigma


def test_embed_I_single_ball():
    # single-ball support at rho: I(C)(sigma) = C(rho) for sigma <= rho
    # in the LOWER case, else 0
    X = corpus.interval()
    comp = ChainComplex({0: ["x"], 1: ["y"]}, {1: IntMat.from_rows([[3]])})
    C = GradedComplex(X, LOWER, {"e": comp}, {})
    F = embed_I(C)
    assert F.value("e").rank(0) == 1 and F.value("e").rank(1) == 1
    assert F.value("v0").rank(0) == 1  # star of v0 contains e
    assert F.value("v0").diff(1).get(0, 0) == 3


def test_graded_tensor_with_constant_Z_is_identity():
    X = corpus.square()
    C = dissected_subdivision(X)
    values = {s: ChainComplex({0: ["z"]}, {}) for s in X.sorted_ids()}
    maps = {}
    for t in X.sorted_ids():
        for s in X.sorted_ids():
            if X.leq(t, s):
                maps[(t, s)] = None
    from lhk.chain import ChainMap
    maps = {k: ChainMap(values[k[1]], values[k[0]], 0,
                        {0: IntMat.identity(1)}, check=False)
            for k in maps}
    F = FunctorOverX(X, UPPER, values, maps, check=True)
    T = graded_tensor(C, F)
    assert labeled_same(assemble(T), assemble(C),
                        lambda lbl: (lbl[0], lbl[1][0]))


def test_shift_of_constant_functor():
    # constant Z as a LOWER functor: sh gives C_*(X) as a graded complex
    X = corpus.square()
    values = {s: ChainComplex({0: [s]}, {}) for s in X.sorted_ids()}
    from lhk.chain import ChainMap
    maps = {}
    for t in X.sorted_ids():
        for s in X.sorted_ids():
            if X.leq(t, s):
                maps[(t, s)] = ChainMap(values[s], values[t], 0,
                                        {0: IntMat.identity(1)}, check=False)
    F = FunctorOverX(X, LOWER, values, maps, check=True)
    sh = shift(F)
    assert sh.variance == UPPER
    CX = cellular_chain_complex(X)
    assert labeled_same(assemble(sh), CX, lambda lbl: lbl[0])
    for sigma in X.sorted_ids():
        k = X.cells[sigma].dim
        assert sh.component(sigma).rank(k) == 1


def test_shift_point_identity():
    X = corpus.point()
    comp = ChainComplex({0: ["a"], 1: ["b"]}, {1: IntMat.from_rows([[5]])})
    C = GradedComplex(X, LOWER, {"p": comp}, {})
    F = embed_I(C)
    TD = chain_dual(C)
    # over a point the chain dual is the plain dual
    assert labeled_same(assemble(TD), dualize(comp),
                        lambda lbl: ("*", lbl[1][1][1]))


def test_chain_dual_of_dissected_is_dual_cell_cochains():
    # T(D)(sigma) = C^{-|sigma|-*}(D(sigma, X); Z), basis-labelled
    for name in ("interval", "circle", "square"):
        X = corpus.CORPUS_BUILDERS[name]()
        sd = derived_subdivision(X)
        D = dissected_subdivision(X, sd)
        TD = chain_dual(D)
        for sigma in X.sorted_ids():
            k = X.cells[sigma].dim
            DC = dual_cell(X, sigma, sd)
            expected = suspend(dualize(cellular_chain_complex(DC.total)),
                               -k, signed=True)
            got = TD.component(sigma)
            assert labeled_same(got, expected,
                                lambda lbl: ("*", lbl[1][1])), (name, sigma)


def test_chain_dual_single_ball_support():
    # LOWER complex supported on rho dualizes to suspended duals over
    # sigma <= rho
    X = corpus.square()
    comp = ChainComplex({0: ["x"]}, {})
    C = GradedComplex(X, LOWER, {"f": comp}, {})
    T = chain_dual(C)
    for sigma in X.sorted_ids():
        k = X.cells[sigma].dim
        got = T.component(sigma)
        if X.leq(sigma, "f"):
            assert {n: got.rank(n) for n in got.degrees()} == {-k: 1}, sigma
        else:
            assert got.is_zero()


def test_chain_dual_squared_ranks():
    X = corpus.interval()
    D = dissected_subdivision(X)
    TT = chain_dual(chain_dual(D))
    # double dual assembles to something with the homology of X'
    ha = homology(assemble(TT))
    hx = homology(assemble(D))
    assert ha == hx


def test_switch_point_identity():
    X = corpus.point()
    comp = ChainComplex({0: ["a"]}, {})
    C = GradedComplex(X, LOWER, {"p": comp}, {})
    TC = chain_dual(C)
    phi = GradedHomChain(C, C, 0, {0: IntMat.identity(1)}, TC=TC)
    sw = switch(phi)
    assert sw.component(0) == IntMat.identity(1)


def test_switch_involution_and_chain_map():
    rng = random.Random(11)
    for name in ("interval", "square"):
        X = corpus.CORPUS_BUILDERS[name]()
        for variance in (LOWER, UPPER):
            C = random_graded_complex(X, variance, rng, size=2)
            D = random_graded_complex(X, variance, rng, size=2)
            TC = chain_dual(C)
            TD = chain_dual(D)
            src = TC.assembled
            tgt = D.assembled
            for n in (-1, 0, 1):
                mats = {}
                for p in src.degrees():
                    if p + n not in tgt.basis:
                        continue
                    m = IntMat(tgt.rank(p + n), src.rank(p))
                    for j, (sigma, _) in enumerate(src.labels(p)):
                        for i, (tau, _) in enumerate(tgt.labels(p + n)):
                            from lhk.graded import _support_ok
                            if not _support_ok(X, variance, tau, sigma):
                                continue
                            if rng.random() < 0.35:
                                m.set(i, j, rng.choice([-2, -1, 1, 2]))
                    if not m.is_zero():
                        mats[p] = m
                phi = GradedHomChain(C, D, n, mats, TC=TC)
                sw = switch(phi, TD=TD)
                assert switch(sw, TD=TC) == phi
                assert switch(phi.differential(), TD=TD) == sw.differential()


def test_counit_point_is_evaluation():
    X = corpus.point()
    comp = ChainComplex({0: ["a"], 1: ["b"]}, {1: IntMat.from_rows([[2]])})
    C = GradedComplex(X, LOWER, {"p": comp}, {})
    e = counit(C)
    res = local_equivalence_check(e)
    assert res["global"] and res["assembled"][0]
    for n, m in e.mats.items():
        assert m == IntMat.identity(m.nrows)


def test_counit_dissected_interval():
    X = corpus.interval()
    D = dissected_subdivision(X)
    e = counit(D)
    res = local_equivalence_check(e)
    assert res["global"], {b: v[0] for b, v in res["per_ball"].items()}
    assert res["assembled"][0]


def test_counit_diagonal_factorization():
    # e(C)_{sigma,sigma} = +- (projection followed by evaluation)
    X = corpus.square()
    D = dissected_subdivision(X)
    TC = chain_dual(D)
    TTC = chain_dual(TC)
    e = counit(D, TC=TC)
    for sigma in X.sorted_ids():
        k = X.cells[sigma].dim
        blk = e.diagonal_block(sigma)
        comp = D.component(sigma)
        ttc = TTC.component(sigma)
        sign = -1 if (k * (k + 1) // 2) % 2 else 1
        for p in ttc.degrees():
            m = blk.component(p)
            for j, lbl in enumerate(ttc.labels(p)):
                inner = lbl[1]      # (tau, ('*', (rho, loc)))
                tau, dual2 = inner
                rho, loc = dual2[1]
                for i, loc2 in enumerate(comp.labels(p)):
                    expected = 0
                    if tau == sigma and rho == sigma and loc == loc2:
                        expected = sign
                    assert m.get(i, j) == expected, (sigma, p)


def test_counit_involution_identity():
    # e(T(C)) o T(e(C)) = id_{T(C)} exactly
    for name in ("interval", "square"):
        X = corpus.CORPUS_BUILDERS[name]()
        D = dissected_subdivision(X)
        TC = chain_dual(D)
        e = counit(D, TC=TC)
        Te = chain_dual_map(e)      # T(C) -> T(T^2(C))
        eT = counit(TC)             # T^2(T(C)) -> T(C)
        comp = eT.compose(Te)
        assert comp.is_identity(), name


def test_local_equivalence_check_negative():
    X = corpus.interval()
    comp = {s: ChainComplex({0: [("g", s)]}, {}) for s in X.sorted_ids()}
    C = GradedComplex(X, LOWER, comp, {})
    mats = {0: IntMat.identity(3)}
    # corrupt the diagonal block over v1 with x2
    A = C.assembled
    idx = [k for k, (b, _) in enumerate(A.labels(0)) if b == "v1"][0]
    mats[0].set(idx, idx, 2)
    f = GradedMorphism(C, C, 0, mats)
    res = local_equivalence_check(f)
    assert res["per_ball"]["v1"][0] is False
    assert res["per_ball"]["v0"][0] is True
    assert res["global"] is False
    assert res["assembled"][0] is False


def test_interval_functor():
    X = corpus.square()
    F = interval_functor(X, "f", UPPER)
    F.assert_functorial()
    # D^sigma(sigma) = S^{|sigma|} Z
    v = F.value("f")
    assert {n: v.rank(n) for n in v.degrees()} == {2: 1}
    # acyclic for tau < sigma
    for tau in ("v00", "eb"):
        h = homology(F.value(tau))
        assert h.is_trivial(), tau
    # zero for incomparable pairs
    G = interval_functor(X, "eb", UPPER)
    assert G.value("et").is_zero()


def test_redistribution_square():
    X = corpus.square()
    D = dissected_subdivision(X)
    for sigma in X.sorted_ids():
        res = redistribution_iso(D, sigma)
        assert res.iso_ok, sigma
        assert res.proj_ok, sigma


def test_redistribution_upper_variance():
    rng = random.Random(5)
    X = corpus.interval()
    C = random_graded_complex(X, UPPER, rng, size=2)
    for sigma in X.sorted_ids():
        res = redistribution_iso(C, sigma)
        assert res.iso_ok and res.proj_ok, sigma


def test_random_graded_complexes_are_valid():
    rng = random.Random(3)
    X = corpus.square()
    for variance in (LOWER, UPPER):
        for _ in range(5):
            C = random_graded_complex(X, variance, rng, size=3)
            C.assembled.assert_d_squared_zero()
