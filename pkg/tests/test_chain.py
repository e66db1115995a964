import pytest

from lhk.intmat import IntMat
from lhk.chain import (
    ChainComplex, ChainMap, HomologyProfile, homology, dualize,
    double_dual_iso, suspend, cone, tensor_Z, tensor_map, hom_complex,
    direct_sum, is_chain_equivalence, solve_chain_homotopy,
)


def circle_complex():
    # 3-edge circle: vertices a, b, c; edges ab, bc, ca
    basis = {0: ["a", "b", "c"], 1: ["ab", "bc", "ca"]}
    d1 = IntMat.from_rows([[-1, 0, 1], [1, -1, 0], [0, 1, -1]])
    return ChainComplex(basis, {1: d1})


def test_point():
    C = ChainComplex.point()
    h = homology(C)
    assert h.betti(0) == 1 and h.degrees() == [0]


def test_circle_homology():
    h = homology(circle_complex())
    assert h.betti(0) == 1 and h.betti(1) == 1
    assert h.torsion(0) == () and h.torsion(1) == ()
    assert h.degrees() == [0, 1]


def test_relative_interval():
    # pair (interval, endpoints): only the edge survives, d = 0
    C = ChainComplex({1: ["e"]}, {})
    h = homology(C)
    assert h.betti(1) == 1 and h.betti(0) == 0


def test_dualize_circle_is_cochain():
    C = circle_complex()
    T = dualize(C)
    assert T.degrees() == [-1, 0]
    assert T.rank(0) == 3 and T.rank(-1) == 3
    # cochain differential is the transpose, placed at degree 0 -> -1
    assert T.diff(0) == C.diff(1).transpose()
    h = homology(T)
    assert h.betti(0) == 1 and h.betti(-1) == 1


def test_double_dual_is_identity_matrices():
    C = circle_complex()
    iso = double_dual_iso(C)
    ok, cert = is_chain_equivalence(iso)
    assert ok
    assert dualize(dualize(C)).d == C.d


def test_suspend():
    C = ChainComplex.point()
    S = suspend(C, 3)
    assert S.degrees() == [3]
    # signed suspension flips odd differentials
    D = ChainComplex({0: ["x"], 1: ["y"]}, {1: IntMat.from_rows([[2]])})
    S1 = suspend(D, 1)
    assert S1.diff(2).get(0, 0) == -2
    S2 = suspend(D, 1, signed=False)
    assert S2.diff(2).get(0, 0) == 2


def test_cone_of_identity_acyclic():
    C = circle_complex()
    h = homology(cone(C.identity_map()))
    assert h.is_trivial()


def test_cone_of_zero_map():
    C = ChainComplex({0: ["x"]}, {})
    zero = ChainMap(C, ChainComplex({}, {}), 0, {}, check=False)
    cz = cone(zero)
    assert cz.degrees() == [1]
    assert homology(cz).betti(1) == 1


def test_tensor_unit():
    C = circle_complex()
    Z = ChainComplex({0: ["*"]}, {})
    T = tensor_Z(C, Z)
    assert {n: T.rank(n) for n in T.degrees()} == {0: 3, 1: 3}
    assert T.diff(1).to_dense() == C.diff(1).to_dense()


def test_tensor_torus_kuenneth():
    C = circle_complex()
    T = tensor_Z(C, C)
    h = homology(T)
    assert (h.betti(0), h.betti(1), h.betti(2)) == (1, 2, 1)
    assert all(h.torsion(n) == () for n in (0, 1, 2))


def test_tensor_d_squared():
    C = circle_complex()
    T = tensor_Z(C, tensor_Z(C, C))
    T.assert_d_squared_zero()


def test_hom_complex_with_Z_is_dual():
    C = circle_complex()
    H = hom_complex(C, ChainComplex({0: ["*"]}, {}))
    T = dualize(C)
    assert {n: H.rank(n) for n in H.degrees()} == \
        {n: T.rank(n) for n in T.degrees()}
    assert all(H.diff(n) == T.diff(n) for n in H.degrees())


def test_is_chain_equivalence_times_two():
    C = ChainComplex({0: ["x"]}, {})
    f = ChainMap(C, C, 0, {0: IntMat.from_rows([[2]])})
    ok, cert = is_chain_equivalence(f)
    assert not ok
    assert cert.torsion(0) == (2,)


def test_is_chain_equivalence_identity():
    C = circle_complex()
    ok, cert = is_chain_equivalence(C.identity_map())
    assert ok and cert.is_trivial()


def test_solve_chain_homotopy_equal_maps():
    C = circle_complex()
    f = C.identity_map()
    P = solve_chain_homotopy(f, f)
    assert P is not None and P.is_zero()


def test_solve_chain_homotopy_acyclic():
    C = circle_complex()
    K = cone(C.identity_map())
    idm = K.identity_map()
    zero = ChainMap(K, K, 0, {}, check=False)
    P = solve_chain_homotopy(idm, zero)
    assert P is not None
    # verify d P + P d = id exactly
    for n in K.degrees():
        lhs = K.diff(n + 1) * P.component(n) + \
            P.component(n - 1) * K.diff(n)
        assert lhs == idm.component(n)


def test_solve_chain_homotopy_obstruction():
    # x2 on Z in degree 0 is not homotopic to the zero map
    C = ChainComplex({0: ["x"]}, {})
    f = ChainMap(C, C, 0, {0: IntMat.from_rows([[2]])})
    zero = ChainMap(C, C, 0, {}, check=False)
    assert solve_chain_homotopy(f, zero) is None


def test_direct_sum():
    C = circle_complex()
    S = direct_sum([C, C])
    assert S.rank(0) == 6 and S.rank(1) == 6
    h = homology(S)
    assert h.betti(0) == 2 and h.betti(1) == 2


def test_tensor_map_identity():
    C = circle_complex()
    f = C.identity_map()
    tm = tensor_map(f, f)
    tm.assert_chain_map()
    assert all(tm.component(n) == IntMat.identity(tm.source.rank(n))
               for n in tm.source.degrees())
