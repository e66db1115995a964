import random

from hypothesis import given, settings, strategies as st

from lhk.intmat import IntMat, smith_normal_form, invariant_factors, rank, solve, solve_matrix


def dense(m):
    return m.to_dense()


def is_unimodular(m):
    import sympy
    return abs(sympy.Matrix(dense(m)).det()) == 1


def test_snf_identity():
    U, S, V = smith_normal_form(IntMat.identity(3))
    assert S == IntMat.identity(3)
    assert U * IntMat.identity(3) * V == S


def test_snf_zero():
    U, S, V = smith_normal_form(IntMat.zero(2, 3))
    assert S.is_zero()


def test_snf_hand_example():
    # invariant factors of [[2,4],[6,8]] are (2, 4): gcd of entries is 2,
    # |det| = 8, so the second factor is 8/2 = 4.
    M = IntMat.from_rows([[2, 4], [6, 8]])
    assert invariant_factors(M) == [2, 4]
    U, S, V = smith_normal_form(M)
    assert U * M * V == S
    assert is_unimodular(U) and is_unimodular(V)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 10 ** 6))
def test_snf_random_vs_sympy(nr, nc, seed):
    import sympy
    from sympy.matrices.normalforms import smith_normal_form as sympy_snf

    rng = random.Random(seed)
    data = [[rng.randint(-6, 6) for _ in range(nc)] for _ in range(nr)]
    M = IntMat.from_rows(data)
    U, S, V = smith_normal_form(M)
    assert U * M * V == S
    assert is_unimodular(U) and is_unimodular(V)
    # diagonal, nonnegative, divisibility chain
    diag = []
    for i, j, v in S.entries():
        assert i == j
        assert v > 0
    for i in range(min(nr, nc)):
        diag.append(S.get(i, i))
    chain = [d for d in diag if d != 0]
    assert all(chain[i] != 0 for i in range(len(chain)))
    for a, b in zip(chain, chain[1:]):
        assert b % a == 0
    sm = sympy.Matrix(data)
    expected = sympy_snf(sm, domain=sympy.ZZ)
    exp_diag = [abs(expected[i, i]) for i in range(min(nr, nc))]
    exp_chain = sorted(d for d in exp_diag if d != 0)
    assert sorted(chain) == exp_chain


def test_solve():
    M = IntMat.from_rows([[2, 0], [0, 3]])
    x = solve(M, {0: 4, 1: 9})
    assert x == {0: 2, 1: 3}
    assert solve(M, {0: 1}) is None


def test_solve_matrix():
    M = IntMat.from_rows([[1, 2], [0, 2]])
    B = IntMat.from_rows([[3], [2]])
    X = solve_matrix(M, B)
    assert M * X == B


def test_mul_transpose():
    A = IntMat.from_rows([[1, 2], [3, 4]])
    B = IntMat.from_rows([[0, 1], [1, 0]])
    assert (A * B).to_dense() == [[2, 1], [4, 3]]
    assert A.transpose().to_dense() == [[1, 3], [2, 4]]
    assert rank(A) == 2
