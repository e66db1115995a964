"""Bounded chain complexes of f.g. free Z-modules, exactly.

Sign conventions used throughout the package (fixed here once):

* differentials lower degree: d_n : C_n -> C_{n-1}, d o d = 0;
* dual: (TC)_n = (C_{-n})^*, d_{TC, n} = transpose(d_{C, 1-n}); no sign.
  Dualizing twice gives back the original matrices on the nose;
* a degree-s ChainMap f satisfies d o f = (-1)^s f o d;
* signed suspension S^k: (S^k C)_n = C_{n-k} with d -> (-1)^k d; the
  unsigned suspension keeps d;
* tensor: d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy (Koszul);
* mapping cone of f : C -> D: cone(f)_r = D_r + C_{r-1},
  d(y, x) = (d y + f x, -d x);
* hom_complex(C, D) is realized as tensor_Z(dualize(C), D), so that
  hom_complex(C, Z) is dualize(C) literally.

Homology is computed by Smith normal form; chain equivalences are
certified by acyclicity of the mapping cone, which is sound and
complete for bounded complexes of f.g. free Z-modules.
"""

from __future__ import annotations

from .intmat import IntMat, smith_normal_form, invariant_factors, solve

__all__ = [
    "ChainComplex", "ChainMap", "HomologyProfile",
    "homology", "dualize", "suspend", "cone", "tensor_Z", "hom_complex",
    "direct_sum", "is_chain_equivalence", "solve_chain_homotopy",
    "smith_normal_form", "label_key",
]


def label_key(lbl):
    """Deterministic sort key over the heterogeneous label universe."""
    if isinstance(lbl, bool):
        return (0, int(lbl))
    if isinstance(lbl, int):
        return (0, lbl)
    if isinstance(lbl, str):
        return (1, lbl)
    if isinstance(lbl, tuple):
        return (2, len(lbl)) + tuple(label_key(x) for x in lbl)
    raise TypeError(f"unsupported label {lbl!r}")


class ChainComplex:
    """Bounded complex of f.g. free Z-modules with labelled bases.

    basis: dict degree -> list of labels (only nonzero degrees stored).
    d: dict degree n -> IntMat of shape rank(n-1) x rank(n).
    """

    def __init__(self, basis, d, check=True):
        self.basis = {n: list(b) for n, b in basis.items() if b}
        self.d = {}
        for n, m in d.items():
            if m.nrows == self.rank(n - 1) and m.ncols == self.rank(n):
                if not m.is_zero():
                    self.d[n] = m
            else:
                raise ValueError(f"differential shape at degree {n}")
        self._index = {n: {lbl: i for i, lbl in enumerate(b)}
                       for n, b in self.basis.items()}
        for n, idx in self._index.items():
            if len(idx) != len(self.basis[n]):
                raise ValueError(f"duplicate labels in degree {n}")
        if check:
            self.assert_d_squared_zero()

    # -- basic queries -------------------------------------------------

    def rank(self, n):
        return len(self.basis.get(n, ()))

    def degrees(self):
        return sorted(self.basis)

    @property
    def lo(self):
        return min(self.basis) if self.basis else 0

    @property
    def hi(self):
        return max(self.basis) if self.basis else 0

    def labels(self, n):
        return self.basis.get(n, [])

    def index(self, n, lbl):
        return self._index[n][lbl]

    def diff(self, n):
        m = self.d.get(n)
        if m is None:
            return IntMat(self.rank(n - 1), self.rank(n))
        return m

    def is_zero(self):
        return not self.basis

    def total_rank(self):
        return sum(len(b) for b in self.basis.values())

    def assert_d_squared_zero(self):
        for n in list(self.d):
            if n - 1 in self.d:
                if not (self.d[n - 1] * self.d[n]).is_zero():
                    raise ValueError(f"d o d != 0 at degree {n}")

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        if self.basis != other.basis:
            return False
        return all(self.diff(n) == other.diff(n)
                   for n in set(self.d) | set(other.d))

    def __repr__(self):
        rk = {n: self.rank(n) for n in self.degrees()}
        return f"ChainComplex(ranks={rk})"

    # -- constructions ---------------------------------------------------

    @classmethod
    def from_ranks(cls, ranks, d=None, tag=""):
        basis = {n: [(tag, n, i) if tag else i for i in range(r)]
                 for n, r in ranks.items() if r}
        return cls(basis, d or {})

    @classmethod
    def point(cls):
        return cls({0: [0]}, {})

    def relabel(self, fn):
        basis = {n: [fn(n, lbl) for lbl in b] for n, b in self.basis.items()}
        return ChainComplex(basis, self.d, check=False)

    def identity_map(self):
        return ChainMap(self, self, 0,
                        {n: IntMat.identity(self.rank(n))
                         for n in self.degrees()}, check=False)


class ChainMap:
    """Degree-s map of complexes; satisfies d o f = (-1)^s f o d."""

    def __init__(self, source, target, shift, mats, check=True):
        self.source = source
        self.target = target
        self.shift = shift
        self.mats = {}
        for n, m in mats.items():
            if m.nrows != target.rank(n + shift) or m.ncols != source.rank(n):
                raise ValueError(f"component shape at degree {n}")
            if not m.is_zero():
                self.mats[n] = m
        if check:
            self.assert_chain_map()

    def component(self, n):
        m = self.mats.get(n)
        if m is None:
            return IntMat(self.target.rank(n + self.shift),
                          self.source.rank(n))
        return m

    def assert_chain_map(self):
        s = self.shift
        sign = -1 if s % 2 else 1
        degs = set(self.source.degrees()) | {n + 1 for n in self.mats}
        for n in degs:
            lhs = self.target.diff(n + s) * self.component(n)
            rhs = (self.component(n - 1) * self.source.diff(n)).scaled(sign)
            if lhs != rhs:
                raise ValueError(f"not a chain map at degree {n}")

    def compose(self, other):
        """self o other (other applied first)."""
        if other.target is not self.source:
            if other.target.basis != self.source.basis:
                raise ValueError("composition mismatch")
        s = self.shift + other.shift
        mats = {}
        for n in other.source.degrees():
            m = self.component(n + other.shift) * other.component(n)
            if not m.is_zero():
                mats[n] = m
        return ChainMap(other.source, self.target, s, mats, check=False)

    def __add__(self, other):
        mats = {}
        for n in set(self.mats) | set(other.mats):
            mats[n] = self.component(n) + other.component(n)
        return ChainMap(self.source, self.target, self.shift, mats,
                        check=False)

    def __sub__(self, other):
        mats = {}
        for n in set(self.mats) | set(other.mats):
            mats[n] = self.component(n) - other.component(n)
        return ChainMap(self.source, self.target, self.shift, mats,
                        check=False)

    def scaled(self, c):
        return ChainMap(self.source, self.target, self.shift,
                        {n: m.scaled(c) for n, m in self.mats.items()},
                        check=False)

    def is_zero(self):
        return all(m.is_zero() for m in self.mats.values())

    def __repr__(self):
        return f"ChainMap(shift={self.shift}, degrees={sorted(self.mats)})"


class HomologyProfile:
    """Free rank plus torsion orders (each dividing the next), per degree."""

    def __init__(self, table):
        self.table = {n: (b, tuple(t)) for n, (b, t) in table.items()
                      if b or t}

    def betti(self, n):
        return self.table.get(n, (0, ()))[0]

    def torsion(self, n):
        return self.table.get(n, (0, ()))[1]

    def is_trivial(self):
        return not self.table

    def degrees(self):
        return sorted(self.table)

    def __eq__(self, other):
        if not isinstance(other, HomologyProfile):
            return NotImplemented
        return self.table == other.table

    def __repr__(self):
        parts = []
        for n in self.degrees():
            b, t = self.table[n]
            desc = []
            if b:
                desc.append(f"Z^{b}" if b > 1 else "Z")
            desc.extend(f"Z/{k}" for k in t)
            parts.append(f"{n}: {' + '.join(desc)}")
        return "H{" + ", ".join(parts) + "}"

    def to_json(self):
        return {str(n): {"free": b, "torsion": list(t)}
                for n, (b, t) in sorted(self.table.items())}


def homology(C):
    """Homology via Smith normal form, degree by degree."""
    table = {}
    ranks = {}
    for n in C.degrees():
        ranks[n] = len(invariant_factors(C.diff(n))) if n in C.d else 0
        if n + 1 not in ranks:
            ranks[n + 1] = (len(invariant_factors(C.diff(n + 1)))
                            if n + 1 in C.d else 0)
    for n in C.degrees():
        facs = invariant_factors(C.diff(n + 1)) if n + 1 in C.d else []
        betti = C.rank(n) - ranks.get(n, 0) - len(facs)
        torsion = [f for f in facs if f != 1]
        if betti or torsion:
            table[n] = (betti, torsion)
    return HomologyProfile(table)


def dualize(C):
    """T over Z: apply Hom(-, Z) and negate degrees."""
    basis = {-n: [("*", lbl) for lbl in C.labels(n)] for n in C.degrees()}
    d = {}
    for n in C.d:
        # d_{TC, 1-n} : (TC)_{1-n} -> (TC)_{-n} is the transpose of d_{C, n}
        d[1 - n] = C.diff(n).transpose()
    return ChainComplex(basis, d, check=False)


def double_dual_iso(C):
    """The evaluation isomorphism C -> dualize(dualize(C)); identity matrices."""
    DD = dualize(dualize(C))
    return ChainMap(C, DD, 0, {n: IntMat.identity(C.rank(n))
                               for n in C.degrees()}, check=True)


def suspend(C, k, signed=True):
    """(Sigma^k C)_n = C_{n-k}; signed version multiplies d by (-1)^k."""
    basis = {n + k: C.labels(n) for n in C.degrees()}
    sign = -1 if (signed and k % 2) else 1
    d = {n + k: C.diff(n).scaled(sign) for n in C.d}
    return ChainComplex(basis, d, check=False)


def suspend_map(f, k, signed=True):
    """The map Sigma^k f between the suspended complexes."""
    src = suspend(f.source, k, signed)
    tgt = suspend(f.target, k, signed)
    return ChainMap(src, tgt, f.shift,
                    {n + k: m for n, m in f.mats.items()}, check=False)


def cone(f):
    """Mapping cone of a degree-0 chain map: cone_r = D_r + C_{r-1}."""
    if f.shift != 0:
        raise ValueError("DEGREE_SHIFT_MISMATCH: cone needs a degree-0 map")
    C, D = f.source, f.target
    basis = {}
    degs = sorted(set(D.degrees()) | {n + 1 for n in C.degrees()})
    for r in degs:
        b = [(0, lbl) for lbl in D.labels(r)]
        b += [(1, lbl) for lbl in C.labels(r - 1)]
        if b:
            basis[r] = b
    d = {}
    for r in degs:
        nr = len(basis.get(r - 1, ()))
        nc = len(basis.get(r, ()))
        m = IntMat(nr, nc)
        dD = D.diff(r)
        dC = C.diff(r - 1)
        fm = f.component(r - 1)
        ofs_r_src = D.rank(r)
        ofs_r1_tgt = D.rank(r - 1)
        for i, j, v in dD.entries():
            m.set(i, j, v)
        for i, j, v in fm.entries():
            m.add_to(i, ofs_r_src + j, v)
        for i, j, v in dC.entries():
            m.set(ofs_r1_tgt + i, ofs_r_src + j, -v)
        if not m.is_zero():
            d[r] = m
    return ChainComplex(basis, d, check=False)


def direct_sum(complexes, tags=None):
    """Direct sum; labels become (tag, lbl)."""
    if tags is None:
        tags = list(range(len(complexes)))
    basis = {}
    degs = sorted({n for C in complexes for n in C.degrees()})
    for n in degs:
        b = []
        for t, C in zip(tags, complexes):
            b += [(t, lbl) for lbl in C.labels(n)]
        if b:
            basis[n] = b
    d = {}
    for n in degs:
        from .intmat import block_diag
        m = block_diag([C.diff(n) for C in complexes])
        if not m.is_zero():
            d[n] = m
    return ChainComplex(basis, d, check=False)


def tensor_Z(C, D):
    """Koszul tensor product; basis labels are pairs (c, d).

    Degree-n basis: for p ascending, all (c_p, d_{n-p}) pairs, with the
    first factor's labels varying slowest.
    """
    basis = {}
    pos = {}
    degs_C = C.degrees()
    degs_D = D.degrees()
    for p in degs_C:
        for q in degs_D:
            n = p + q
            blist = basis.setdefault(n, [])
            for lc in C.labels(p):
                for ld in D.labels(q):
                    pos[(p, lc, ld)] = (n, len(blist))
                    blist.append((lc, ld))
    d = {}
    for n in sorted(basis):
        if n - 1 not in basis:
            continue
        m = IntMat(len(basis[n - 1]), len(basis[n]))
        for p in degs_C:
            q = n - p
            if q not in D.basis and q - 1 not in D.basis:
                continue
            dC = C.diff(p)
            dD = D.diff(q) if q in D.basis else IntMat(D.rank(q - 1), 0)
            sgn = -1 if p % 2 else 1
            for lc_i, lc in enumerate(C.labels(p)):
                for ld_i, ld in enumerate(D.labels(q)):
                    col = pos[(p, lc, ld)][1]
                    # d_C (x) id
                    for i in range(C.rank(p - 1)):
                        v = dC.get(i, lc_i)
                        if v:
                            row = pos[(p - 1, C.labels(p - 1)[i], ld)][1]
                            m.add_to(row, col, v)
                    # (-1)^p id (x) d_D
                    for i in range(D.rank(q - 1)):
                        v = dD.get(i, ld_i)
                        if v:
                            row = pos[(p, lc, D.labels(q - 1)[i])][1]
                            m.add_to(row, col, sgn * v)
        if not m.is_zero():
            d[n] = m
    return ChainComplex(basis, d, check=False)


def tensor_map(f, g):
    """f (x) g on tensor complexes, with Koszul sign (-1)^{|g| * p}."""
    src = tensor_Z(f.source, g.source)
    tgt = tensor_Z(f.target, g.target)
    s = f.shift + g.shift
    mats = {}
    for n in src.degrees():
        if n + s not in tgt.basis:
            continue
        m = IntMat(tgt.rank(n + s), src.rank(n))
        for ci, (lc, ld) in enumerate(src.labels(n)):
            p = _factor_degree(f.source, lc, n, ld, g.source)
            q = n - p
            fm = f.component(p)
            gm = g.component(q)
            sgn = -1 if (g.shift % 2) and (p % 2) else 1
            i_c = f.source.index(p, lc)
            j_d = g.source.index(q, ld)
            for a in range(f.target.rank(p + f.shift)):
                va = fm.get(a, i_c)
                if not va:
                    continue
                for b in range(g.target.rank(q + g.shift)):
                    vb = gm.get(b, j_d)
                    if not vb:
                        continue
                    la = f.target.labels(p + f.shift)[a]
                    lb = g.target.labels(q + g.shift)[b]
                    ri = tgt.index(n + s, (la, lb))
                    m.add_to(ri, ci, sgn * va * vb)
        if not m.is_zero():
            mats[n] = m
    return ChainMap(src, tgt, s, mats, check=False)


def _factor_degree(C, lc, n, ld, D):
    for p in C.degrees():
        if lc in C._index.get(p, {}) and ld in D._index.get(n - p, {}):
            return p
    raise KeyError((lc, ld))


def hom_complex(C, D):
    """Hom(C, D) realized as dualize(C) (x) D."""
    return tensor_Z(dualize(C), D)


def is_chain_equivalence(f):
    """TRUE iff the cone of f has vanishing homology in all degrees.

    Returns (verdict, certificate) where the certificate is the homology
    profile of the cone.
    """
    if f.shift != 0:
        raise ValueError("equivalence check needs a degree-0 map")
    h = homology(cone(f))
    return h.is_trivial(), h


def solve_chain_homotopy(f, g):
    """Find P with d P + (-1)^s P d = f - g, or None.

    f and g must share source, target and shift s; P has shift s + 1.
    Existence and any solution are decided exactly over Z via Smith
    normal form on the flattened linear system.
    """
    if f.shift != g.shift:
        raise ValueError("shift mismatch")
    if f.source.basis != g.source.basis or f.target.basis != g.target.basis:
        raise ValueError("source/target mismatch")
    s = f.shift
    C, D = f.source, f.target
    rhs_map = f - g
    if rhs_map.is_zero():
        return ChainMap(C, D, s + 1, {}, check=False)

    var_index = {}
    for n in C.degrees():
        for i in range(D.rank(n + s + 1)):
            for j in range(C.rank(n)):
                var_index[(n, i, j)] = len(var_index)

    rows = {}
    rhs = {}
    eq_index = {}

    def eq(n, a, b):
        key = (n, a, b)
        if key not in eq_index:
            eq_index[key] = len(eq_index)
        return eq_index[key]

    sign = -1 if s % 2 else 1
    for n in C.degrees():
        dD = D.diff(n + s + 1)
        dC = C.diff(n)
        # equation block at degree n: d_D P_n + (-1)^s P_{n-1} d_C = rhs_n
        for (i, j), col in ((k[1:], v) for k, v in var_index.items()
                            if k[0] == n):
            for a in range(D.rank(n + s)):
                v = dD.get(a, i)
                if v:
                    rows.setdefault(eq(n, a, j), {})[col] = \
                        rows.get(eq(n, a, j), {}).get(col, 0) + v
        if n - 1 in C.basis:
            for (i, j2), col in ((k[1:], v) for k, v in var_index.items()
                                 if k[0] == n - 1):
                for b in range(C.rank(n)):
                    v = dC.get(j2, b)
                    if v:
                        r = eq(n, i, b)
                        rows.setdefault(r, {})[col] = \
                            rows.get(r, {}).get(col, 0) + sign * v
        m = rhs_map.component(n)
        for a, b, v in m.entries():
            rhs[eq(n, a, b)] = v

    nr = len(eq_index)
    nc = len(var_index)
    A = IntMat(nr, nc, {i: {j: v for j, v in r.items() if v}
                        for i, r in rows.items() if r})
    x = solve(A, rhs)
    if x is None:
        return None
    mats = {}
    for (n, i, j), col in var_index.items():
        v = x.get(col, 0)
        if v:
            mats.setdefault(n, IntMat(D.rank(n + s + 1),
                                      C.rank(n))).set(i, j, v)
    return ChainMap(C, D, s + 1, mats, check=False)
