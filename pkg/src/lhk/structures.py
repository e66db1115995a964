"""Symmetric and quadratic structures with exact integer arithmetic.

Ungraded structure chains live in the Koszul tensor complex C (x) C
(sparse chains keyed by (degree, left label, right label)); the
involution is T(x (x) y) = (-1)^{|x||y|} y (x) x.  The cycle relations
asserted on construction are

    d(phi_s) = (-1)^n (phi_{s-1} + (-1)^s T phi_{s-1}),   phi_{-1} = 0,
    d(psi_s) = (-1)^n (psi_{s+1} + (-1)^{s+1} T psi_{s+1}),

for n-dimensional symmetric and quadratic structures respectively.  A
tensor cycle phi_0 corresponds under the slant

    c (x) d  |->  (f |-> (-1)^{|c||d| + |c|(|c|-1)/2} f(c) d)

to a chain map S^n T(C) -> C (signed suspension); Poincare means that
map is a chain equivalence, certified by cone acyclicity.

The standard Z[Z/2]-resolution W has d(e_s) = e_{s-1} + (-1)^s T e_{s-1}
and diagonal Delta(e_k) = sum_{i+j=k} (-1)^{ij} e_i (x) T^i e_j (the
juggling formula; the sign is forced by the chain-map identity, which
the tests expand symbolically).  Products pair the W-diagonal with the
middle interchange

    (c (x) c') (x) (d (x) d') |-> (-1)^{|c'||d|} (c (x) d) (x) (c' (x) d'),

giving (phi x phi')_s = sum_{i+j=s} (-1)^{ij + n' i} omega(phi_i (x) T^i phi'_j)
for an n'-dimensional second factor, and
(phi x psi)_s = sum_i (-1)^{is + n' i} omega(phi_i (x) T^i psi_{i+s}).

Higher diagonals on ordered simplicial chains use the front/back
(Alexander-Whitney) formula in level 0; higher levels are solved once
per standard-simplex model by the exact acyclic-model solver and
transported simplexwise, which makes the family natural under
inclusions.
"""

from __future__ import annotations

from fractions import Fraction

from .intmat import IntMat, solve
from .chain import (
    ChainComplex, ChainMap, homology, dualize, suspend, cone, tensor_Z,
    is_chain_equivalence, label_key,
)

__all__ = [
    "WTruncation", "w_resolution", "WDiagonal", "w_diagonal",
    "TensorChain", "SymmetricStructure", "QuadraticStructure",
    "DiagonalFamily", "higher_diagonals", "extend_diagonal",
    "symmetric_construction", "slant", "is_poincare",
    "boundary_construction", "symmetrize", "quadratic_from_form",
    "product_sym_sym", "product_sym_quad", "signature_of_form",
]


# -- the standard Z[Z/2]-resolution ---------------------------------------


class WTruncation:
    """W in degrees 0..k; d(e_s) = (1 + (-1)^s T) e_{s-1}."""

    def __init__(self, k):
        if k < 0:
            raise ValueError("truncation level must be >= 0")
        self.k = k

    def d_coeffs(self, s):
        """(a, b) with d(e_s) = (a + b T) e_{s-1}."""
        return (1, 1 if s % 2 == 0 else -1)

    def z_rank(self, s):
        """Rank over Z after expanding the group action."""
        return 2 if 0 <= s <= self.k else 0


def w_resolution(k):
    return WTruncation(k)


class WDiagonal:
    """Delta(e_k) = sum_{i+j=k} (-1)^{ij} e_i (x) T^i e_j."""

    def __init__(self, k):
        self.k = k

    def components(self, s):
        """List of (i, j, twist, sign): e_s -> sign * e_i (x) T^twist e_j."""
        return [(i, s - i, i % 2, (-1) ** (i * (s - i)))
                for i in range(s + 1)]


def w_diagonal(k):
    return WDiagonal(k)


# -- sparse chains in C (x) D ----------------------------------------------


class TensorChain:
    """Sparse chain in (C (x) D)_n; entries keyed (p, x_label, y_label)."""

    def __init__(self, C, D, n, entries=None):
        self.C = C
        self.D = D
        self.n = n
        self.entries = {}
        if entries:
            for key, v in entries.items():
                if v:
                    self.entries[key] = self.entries.get(key, 0) + v
            self.entries = {k: v for k, v in self.entries.items() if v}

    def add_entry(self, p, x, y, v):
        key = (p, x, y)
        nv = self.entries.get(key, 0) + v
        if nv:
            self.entries[key] = nv
        else:
            self.entries.pop(key, None)

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, TensorChain):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    def add(self, other, scale=1):
        out = TensorChain(self.C, self.D, self.n, dict(self.entries))
        for (p, x, y), v in other.entries.items():
            out.add_entry(p, x, y, scale * v)
        return out

    def scaled(self, c):
        return TensorChain(self.C, self.D, self.n,
                           {k: c * v for k, v in self.entries.items()})

    def boundary(self):
        """Koszul differential d(x (x) y) = dx (x) y + (-1)^p x (x) dy."""
        out = TensorChain(self.C, self.D, self.n - 1)
        C, D = self.C, self.D
        for (p, x, y), v in self.entries.items():
            q = self.n - p
            dC = C.diff(p)
            j = C.index(p, x)
            for i in range(C.rank(p - 1)):
                w = dC.get(i, j)
                if w:
                    out.add_entry(p - 1, C.labels(p - 1)[i], y, w * v)
            dD = D.diff(q)
            jd = D.index(q, y)
            sgn = -1 if p % 2 else 1
            for i in range(D.rank(q - 1)):
                w = dD.get(i, jd)
                if w:
                    out.add_entry(p, x, D.labels(q - 1)[i], sgn * w * v)
        return out

    def switch(self):
        """T(x (x) y) = (-1)^{pq} y (x) x (needs C and D interchangeable)."""
        out = TensorChain(self.D, self.C, self.n)
        for (p, x, y), v in self.entries.items():
            q = self.n - p
            out.add_entry(q, y, x, v * (-1 if (p * q) % 2 else 1))
        return out

    def transport(self, f, g):
        """(f (x) g) applied entrywise, with the Koszul sign (-1)^{|g| p}."""
        out = TensorChain(f.target, g.target, self.n + f.shift + g.shift)
        sgn_g = g.shift % 2
        for (p, x, y), v in self.entries.items():
            q = self.n - p
            fm = f.component(p)
            gm = g.component(q)
            xj = f.source.index(p, x)
            yj = g.source.index(q, y)
            s = -1 if (sgn_g and p % 2) else 1
            for i in range(f.target.rank(p + f.shift)):
                a = fm.get(i, xj)
                if not a:
                    continue
                for i2 in range(g.target.rank(q + g.shift)):
                    b = gm.get(i2, yj)
                    if not b:
                        continue
                    out.add_entry(p + f.shift,
                                  f.target.labels(p + f.shift)[i],
                                  g.target.labels(q + g.shift)[i2],
                                  s * a * b * v)
        return out

    def project(self, C2, D2):
        """Project both factors onto quotient complexes given by label
        subsets (entries whose labels survive are kept)."""
        out = TensorChain(C2, D2, self.n)
        for (p, x, y), v in self.entries.items():
            q = self.n - p
            if p in C2.basis and x in C2._index[p] and \
                    q in D2.basis and y in D2._index[q]:
                out.add_entry(p, x, y, v)
        return out

    def __repr__(self):
        return f"TensorChain(n={self.n}, terms={len(self.entries)})"


def slant(phi0, C):
    """The chain map S^n T(C) -> C of a degree-n tensor cycle in C (x) C."""
    n = phi0.n
    TC = suspend(dualize(C), n, signed=True)
    mats = {}
    for (p, x, y), v in phi0.entries.items():
        q = n - p
        lam = -1 if ((p * q + p * (p - 1) // 2) % 2) else 1
        # dual of x sits in (TC)_{-p}, suspended to degree n - p = q
        m = mats.setdefault(q, IntMat(C.rank(q), TC.rank(q)))
        m.add_to(C.index(q, y), TC.index(q, ("*", x)), lam * v)
    return ChainMap(TC, C, 0, mats, check=True)


# -- symmetric and quadratic structures ------------------------------------


class SymmetricStructure:
    """phi_s in (C (x) C)_{n+s}, 0 <= s <= k, with the W-cycle relations."""

    def __init__(self, C, n, phis, check=True):
        self.C = C
        self.n = n
        self.phis = list(phis)
        self.k = len(self.phis) - 1
        if check:
            self.assert_relations()

    def phi(self, s):
        if 0 <= s <= self.k:
            return self.phis[s]
        return TensorChain(self.C, self.C, self.n + s)

    def assert_relations(self):
        sgn_n = -1 if self.n % 2 else 1
        for s in range(0, self.k + 1):
            lhs = self.phi(s).boundary()
            prev = self.phi(s - 1)
            rhs = prev.add(prev.switch(), scale=(-1) ** s).scaled(sgn_n)
            if lhs.entries != rhs.entries:
                raise ValueError(f"symmetric cycle relation fails at s={s}")

    def __repr__(self):
        return f"SymmetricStructure(n={self.n}, k={self.k})"


class QuadraticStructure:
    """psi_s in (C (x) C)_{n-s}, finitely many nonzero."""

    def __init__(self, C, n, psis, check=True):
        self.C = C
        self.n = n
        self.psis = list(psis)
        if check:
            self.assert_relations()

    def psi(self, s):
        if 0 <= s < len(self.psis):
            return self.psis[s]
        return TensorChain(self.C, self.C, self.n - s)

    def assert_relations(self):
        sgn_n = -1 if self.n % 2 else 1
        smax = len(self.psis)
        for s in range(0, smax + 1):
            lhs = self.psi(s).boundary()
            nxt = self.psi(s + 1)
            rhs = nxt.add(nxt.switch(), scale=(-1) ** (s + 1)).scaled(sgn_n)
            if lhs.entries != rhs.entries:
                raise ValueError(f"quadratic cycle relation fails at s={s}")

    def __repr__(self):
        return f"QuadraticStructure(n={self.n}, terms={len(self.psis)})"


def symmetrize(psi):
    """(1 + T) psi_0 as a symmetric structure (higher chains zero)."""
    phi0 = psi.psi(0).add(psi.psi(0).switch())
    k = psi.n + 1
    phis = [phi0] + [TensorChain(psi.C, psi.C, psi.n + s)
                     for s in range(1, k + 1)]
    return SymmetricStructure(psi.C, psi.n, phis)


def quadratic_from_form(Q):
    """A square integer matrix as a 0-dimensional quadratic complex."""
    if isinstance(Q, list):
        Q = IntMat.from_rows(Q)
    r = Q.nrows
    C = ChainComplex({0: list(range(r))}, {})
    psi0 = TensorChain(C, C, 0)
    for i, j, v in Q.entries():
        # matrix entry Q[i, j] pairs dual of e_j with e_i
        psi0.add_entry(0, j, i, v)
    return C, QuadraticStructure(C, 0, [psi0])


def is_poincare(C, structure):
    """Slant the 0-chain and certify the duality map by cone acyclicity."""
    if isinstance(structure, SymmetricStructure):
        phi0 = structure.phi(0)
    else:
        psi0 = structure.psi(0)
        phi0 = psi0.add(psi0.switch())
    f = slant(phi0, C)
    ok, cert = is_chain_equivalence(f)
    return ok, cert


# -- higher diagonals by acyclic models ------------------------------------


_MODEL_CACHE = {}


def _model_complex(q):
    """Chains on the standard q-simplex; labels are vertex tuples."""
    key = ("cplx", q)
    if key not in _MODEL_CACHE:
        import itertools
        basis = {}
        for r in range(q + 1):
            basis[r] = [tuple(c)
                        for c in itertools.combinations(range(q + 1), r + 1)]
        d = {}
        for r in range(1, q + 1):
            m = IntMat(len(basis[r - 1]), len(basis[r]))
            idx = {lbl: i for i, lbl in enumerate(basis[r - 1])}
            for j, lbl in enumerate(basis[r]):
                for t in range(len(lbl)):
                    face = lbl[:t] + lbl[t + 1:]
                    m.add_to(idx[face], j, (-1) ** t)
            d[r] = m
        _MODEL_CACHE[key] = ChainComplex(basis, d)
    return _MODEL_CACHE[key]


def _aw_diagonal(q):
    """Front/back diagonal of the model q-simplex."""
    M = _model_complex(q)
    ident = tuple(range(q + 1))
    out = TensorChain(M, M, q)
    for j in range(q + 1):
        out.add_entry(j, ident[:j + 1], ident[j:], 1)
    return out


def _model_diagonal(q, s):
    """Delta_s(iota_q) on the model, solved once and cached."""
    key = ("diag", q, s)
    if key in _MODEL_CACHE:
        return _MODEL_CACHE[key]
    M = _model_complex(q)
    if s == 0:
        out = _aw_diagonal(q)
    else:
        # d(Delta_s iota) = (1 + (-1)^s T) Delta_{s-1}(iota)
        #                   + (-1)^s Delta_s(d iota)
        prev = _model_diagonal(q, s - 1)
        rhs = prev.add(prev.switch(), scale=(-1) ** s)
        ident = tuple(range(q + 1))
        if q >= 1:
            for t in range(q + 1):
                face = ident[:t] + ident[t + 1:]
                sub = _transport_model(q - 1, s, face, M)
                rhs = rhs.add(sub, scale=(-1) ** (s + t))
        out = _solve_boundary(M, q + s, rhs)
        if out is None:
            raise ValueError("NO_SOLUTION: acyclic-model solve failed, "
                             f"q={q}, s={s}")
        if out.boundary().entries != rhs.entries:
            raise ValueError("NO_SOLUTION: solver output fails the relation")
    _MODEL_CACHE[key] = out
    return out


def _transport_model(qsub, s, vertices, target):
    """Transport Delta_s from the qsub-model along the vertex tuple."""
    src = _model_diagonal(qsub, s)
    out = TensorChain(target, target, qsub + s)
    for (p, x, y), v in src.entries.items():
        xi = tuple(vertices[i] for i in x)
        yi = tuple(vertices[i] for i in y)
        out.add_entry(p, xi, yi, v)
    return out


def _solve_boundary(C, n, target):
    """One chain x in (C (x) C)_n with d(x) = target, or None."""
    T = tensor_Z(C, C)
    col_index = {}
    for j, lbl in enumerate(T.labels(n)):
        col_index[lbl] = j
    b = {}
    for (p, x, y), v in target.entries.items():
        b[T.index(n - 1, (x, y))] = v
    x = solve(T.diff(n), b)
    if x is None:
        return None
    out = TensorChain(C, C, n)
    for j, v in x.items():
        lx, ly = T.labels(n)[j]
        p = _degree_of(C, lx, n, ly)
        out.add_entry(p, lx, ly, v)
    return out


def _degree_of(C, lx, n, ly):
    for p in C.degrees():
        if lx in C._index.get(p, {}) and ly in C._index.get(n - p, {}):
            return p
    raise KeyError((lx, ly))


class DiagonalFamily:
    """Delta_s on an ordered simplicial complex, natural under inclusions.

    vertex_of maps each cell label to its ordered vertex tuple; cells
    must be simplices with the alternating face rule in that order.
    """

    def __init__(self, S, vertex_of, k):
        self.S = S
        self.vertex_of = vertex_of
        self.k = k
        self._by_vertices = {}
        for n in S.degrees():
            for lbl in S.labels(n):
                self._by_vertices[vertex_of(lbl)] = lbl

    def of_simplex(self, s, lbl):
        verts = self.vertex_of(lbl)
        q = len(verts) - 1
        model = _model_diagonal(q, s)
        out = TensorChain(self.S, self.S, q + s)
        for (p, x, y), v in model.entries.items():
            xi = self._by_vertices[tuple(verts[i] for i in x)]
            yi = self._by_vertices[tuple(verts[i] for i in y)]
            out.add_entry(p, xi, yi, v)
        return out

    def of_chain(self, s, chain, degree):
        """chain: dict label -> coeff in C(S)_degree."""
        out = TensorChain(self.S, self.S, degree + s)
        for lbl, c in chain.items():
            if not c:
                continue
            part = self.of_simplex(s, lbl)
            out = out.add(part, scale=c)
        return out


def higher_diagonals(S, vertex_of, k):
    """The family Delta_0..Delta_k; Delta_0 is front/back, higher levels
    come from the exact acyclic-model solver (TRUNCATION_TOO_SMALL cannot
    occur: the solver covers every level)."""
    return DiagonalFamily(S, vertex_of, k)


def extend_diagonal(q, s):
    """Next diagonal level on the standard q-simplex model, by the exact
    linear solver; results are cached and assert-replayed."""
    return _model_diagonal(q, s)


def symmetric_construction(S, vertex_of, z, degree, k=None, sub=None):
    """phi_s = (-1)^{n s} Delta_s(z) for an n-cycle z (n = degree).

    With sub (a set of cell labels) the relative version: both tensor
    factors are projected to the quotient by the subcomplex, and z only
    needs to be a relative cycle.
    """
    n = degree
    if k is None:
        k = n + 1
    fam = DiagonalFamily(S, vertex_of, k)
    # cycle check
    bd = {}
    for lbl, c in z.items():
        j = S.index(n, lbl)
        dm = S.diff(n)
        for i in range(S.rank(n - 1)):
            v = dm.get(i, j)
            if v:
                lbl2 = S.labels(n - 1)[i]
                bd[lbl2] = bd.get(lbl2, 0) + v * c
    bd = {l: v for l, v in bd.items() if v}
    if sub is None:
        if bd:
            raise ValueError("NOT_A_CYCLE")
        target = S
        phis = [fam.of_chain(s, z, n).scaled((-1) ** (n * s))
                for s in range(k + 1)]
        return SymmetricStructure(target, n, phis)
    if any(l not in sub for l in bd):
        raise ValueError("NOT_A_CYCLE: boundary leaves the subcomplex")
    kept = {m: [l for l in S.labels(m) if l not in sub]
            for m in S.degrees()}
    target = _quotient_complex(S, kept)
    phis = []
    for s in range(k + 1):
        t = fam.of_chain(s, z, n).scaled((-1) ** (n * s))
        phis.append(t.project(target, target))
    return SymmetricStructure(target, n, phis)


def _quotient_complex(S, kept):
    basis = {m: list(lbls) for m, lbls in kept.items() if lbls}
    d = {}
    for m in basis:
        if m - 1 not in basis:
            continue
        mm = IntMat(len(basis[m - 1]), len(basis[m]))
        row = {l: i for i, l in enumerate(basis[m - 1])}
        dm = S.diff(m)
        for j, l in enumerate(basis[m]):
            col = S.index(m, l)
            for i2, l2 in enumerate(S.labels(m - 1)):
                v = dm.get(i2, col)
                if v and l2 in row:
                    mm.set(row[l2], j, v)
        if not mm.is_zero():
            d[m] = mm
    return ChainComplex(basis, d, check=True)


# -- boundary construction --------------------------------------------------


def boundary_construction(C, phi, require_poincare=True):
    """(dC, dphi) with dC = S^{-1} cone(slant(phi_0)).

    dC_r = C_{r+1} + (TC)_{r-n} with d(y, x) = (-d y - f x, (-1)^n d x).
    With iota_C : C_{r+1} -> dC_r and iota_T : (TC)_{r-n} -> dC_r the
    summand embeddings and theta = sum (-1)^{p(p+1)/2} x (x) x^* the
    co-evaluation cycle in C (x) TC, the induced (n-1)-structure is

      dphi_s = (-1)^{n+s} (iota_C (x) iota_C)(phi_{s+1})
               - delta_{s0} [ (iota_C (x) iota_T)(theta)
                              + (-1)^n (iota_T (x) iota_C)(T theta) ].

    The cycle relations are asserted on construction; the boundary of a
    symmetric complex is always Poincare, which is asserted too.
    """
    n = phi.n
    f = slant(phi.phi(0), C)
    dC_full = cone(f)
    # desuspend: degrees shift down by one, differential negated
    basis = {r - 1: dC_full.labels(r) for r in dC_full.degrees()}
    d = {r - 1: dC_full.diff(r).scaled(-1) for r in dC_full.d}
    dC = ChainComplex(basis, d, check=True)

    # embeddings iota_C: C_{r+1} -> dC_r (labels (0, lbl)) and
    # iota_T: (TC)_{r-n} -> dC_r (labels (1, ('*', lbl)))
    iota_C = ChainMap(C, dC, -1, {
        r: _label_embed(C, dC, r, -1, lambda l: (0, l))
        for r in C.degrees()}, check=False)
    TC = dualize(C)
    iota_T = ChainMap(TC, dC, n, {
        r: _label_embed(TC, dC, r, n, lambda l: (1, l))
        for r in TC.degrees()}, check=False)

    k_out = max(n, 1)
    phis = []
    for s in range(k_out + 1):
        term = phi.phi(s + 1).transport(iota_C, iota_C)
        term = term.scaled((-1) ** (n + s))
        if s == 0:
            theta = TensorChain(C, TC, 0)
            for p in C.degrees():
                for lbl in C.labels(p):
                    theta.add_entry(p, lbl, ("*", lbl),
                                    (-1) ** (p * (p + 1) // 2))
            term = term.add(theta.transport(iota_C, iota_T), scale=-1)
            term = term.add(theta.switch().transport(iota_T, iota_C),
                            scale=-((-1) ** n))
        phis.append(term)
    dphi = SymmetricStructure(dC, n - 1, phis)
    if require_poincare:
        ok, cert = is_poincare(dC, dphi)
        if not ok:
            raise ValueError(f"boundary structure is not Poincare: {cert}")
    return dC, dphi


def _label_embed(src, tgt, r, shift, fn):
    m = IntMat(tgt.rank(r + shift), src.rank(r))
    for j, lbl in enumerate(src.labels(r)):
        m.set(tgt.index(r + shift, fn(lbl)), j, 1)
    return m


# -- products ----------------------------------------------------------------


def _omega_product(t1, t2, CD):
    """omega(t1 (x) t2): middle interchange with sign (-1)^{|x'||y|}."""
    out = TensorChain(CD, CD, t1.n + t2.n)
    for (p1, x, x2), v1 in t1.entries.items():
        q1 = t1.n - p1
        for (p2, y, y2), v2 in t2.entries.items():
            q2 = t2.n - p2
            s = -1 if (q1 * p2) % 2 else 1
            out.add_entry(p1 + p2, (x, y), (x2, y2), s * v1 * v2)
    return out


def product_sym_sym(A, B):
    """(C, phi) (x) (D, phi') -> (C (x) D, phi x phi'); dimensions add."""
    C, phi = A
    D, phi2 = B
    CD = tensor_Z(C, D)
    n1, n2 = phi.n, phi2.n
    k_out = min(phi.k, phi2.k) if False else phi.k
    k_out = min(phi.k + phi2.k, n1 + n2 + 1)
    phis = []
    for s in range(k_out + 1):
        acc = TensorChain(CD, CD, n1 + n2 + s)
        for i in range(s + 1):
            j = s - i
            if i > phi.k or j > phi2.k:
                continue
            t2 = phi2.phi(j)
            if i % 2:
                t2 = t2.switch()
            sgn = (-1) ** (i * j + n2 * i)
            acc = acc.add(_omega_product(phi.phi(i), t2, CD), scale=sgn)
        phis.append(acc)
    return CD, SymmetricStructure(CD, n1 + n2, phis)


def product_sym_quad(A, B):
    """(C, phi) (x) (D, psi) -> (C (x) D, phi x psi), quadratic output."""
    C, phi = A
    D, psi = B
    CD = tensor_Z(C, D)
    n1, n2 = phi.n, psi.n
    smax = len(psi.psis)
    psis = []
    for s in range(smax):
        acc = TensorChain(CD, CD, n1 + n2 - s)
        for i in range(0, phi.k + 1):
            if i + s >= smax and psi.psi(i + s).is_zero():
                continue
            t2 = psi.psi(i + s)
            if i % 2:
                t2 = t2.switch()
            sgn = (-1) ** (i * s + n2 * i)
            acc = acc.add(_omega_product(phi.phi(i), t2, CD), scale=sgn)
        psis.append(acc)
    return CD, QuadraticStructure(CD, n1 + n2, psis)


# -- exact signature ---------------------------------------------------------


def signature_of_form(M):
    """Signature of a symmetric integer matrix by exact rational
    diagonalization (no floating point)."""
    if isinstance(M, IntMat):
        A = [[Fraction(M.get(i, j)) for j in range(M.ncols)]
             for i in range(M.nrows)]
    else:
        A = [[Fraction(v) for v in row] for row in M]
    nr = len(A)
    for i in range(nr):
        for j in range(nr):
            if A[i][j] != A[j][i]:
                raise ValueError("form is not symmetric")
    sig = 0
    idx = list(range(nr))
    k = 0
    while k < nr:
        # find a nonzero diagonal entry at or after k
        piv = None
        for i in range(k, nr):
            if A[i][i] != 0:
                piv = i
                break
        if piv is None:
            # find any nonzero off-diagonal entry and fold it in
            found = None
            for i in range(k, nr):
                for j in range(i + 1, nr):
                    if A[i][j] != 0:
                        found = (i, j)
                        break
                if found:
                    break
            if not found:
                break  # zero block: signature contribution 0
            i, j = found
            for t in range(nr):
                A[i][t] += A[j][t]
            for t in range(nr):
                A[t][i] += A[t][j]
            continue
        if piv != k:
            A[piv], A[k] = A[k], A[piv]
            for t in range(nr):
                A[t][piv], A[t][k] = A[t][k], A[t][piv]
        d = A[k][k]
        sig += 1 if d > 0 else -1
        for i in range(k + 1, nr):
            c = A[i][k] / d
            if c:
                for t in range(nr):
                    A[i][t] -= c * A[k][t]
                for t in range(nr):
                    A[t][i] -= c * A[t][k]
        k += 1
    return sig
