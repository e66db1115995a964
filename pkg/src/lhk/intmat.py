"""Exact sparse integer matrices.

Matrices are stored as dict-of-rows of nonzero entries with arbitrary
precision Python integers; no floating point is used anywhere.  Smith
normal form favours +-1 pivots, which keeps coefficient growth tame on
the incidence-type matrices this package produces.
"""

from __future__ import annotations


def xgcd(a, b):
    # g = x*a + y*b, maintained through the Euclidean algorithm.
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


class IntMat:
    """Sparse integer matrix: rows[i][j] holds the nonzero (i, j) entry."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows, ncols, rows=None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows if rows is not None else {}

    # -- construction ------------------------------------------------

    @classmethod
    def zero(cls, nrows, ncols):
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {i: {i: 1} for i in range(n)})

    @classmethod
    def from_rows(cls, data):
        nrows = len(data)
        ncols = len(data[0]) if data else 0
        rows = {}
        for i, row in enumerate(data):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            r = {j: v for j, v in enumerate(row) if v}
            if r:
                rows[i] = r
        return cls(nrows, ncols, rows)

    @classmethod
    def from_entries(cls, nrows, ncols, entries):
        m = cls(nrows, ncols)
        for (i, j), v in entries.items():
            if v:
                m.add_to(i, j, v)
        return m

    def copy(self):
        return IntMat(self.nrows, self.ncols,
                      {i: dict(r) for i, r in self.rows.items()})

    # -- element access ----------------------------------------------

    def get(self, i, j):
        return self.rows.get(i, {}).get(j, 0)

    def set(self, i, j, v):
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError((i, j))
        r = self.rows.get(i)
        if v:
            if r is None:
                self.rows[i] = {j: v}
            else:
                r[j] = v
        elif r is not None:
            r.pop(j, None)
            if not r:
                del self.rows[i]

    def add_to(self, i, j, v):
        self.set(i, j, self.get(i, j) + v)

    def entries(self):
        for i, r in self.rows.items():
            for j, v in r.items():
                yield i, j, v

    def nnz(self):
        return sum(len(r) for r in self.rows.values())

    def is_zero(self):
        return not self.rows

    def to_dense(self):
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i, j, v in self.entries():
            out[i][j] = v
        return out

    # -- algebra -----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, IntMat):
            return NotImplemented
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        return self.rows == other.rows

    def __hash__(self):
        raise TypeError("IntMat is mutable; not hashable")

    def __add__(self, other):
        self._check_same_shape(other)
        out = self.copy()
        for i, j, v in other.entries():
            out.add_to(i, j, v)
        return out

    def __sub__(self, other):
        self._check_same_shape(other)
        out = self.copy()
        for i, j, v in other.entries():
            out.add_to(i, j, -v)
        return out

    def __neg__(self):
        return self.scaled(-1)

    def scaled(self, c):
        if c == 0:
            return IntMat(self.nrows, self.ncols)
        return IntMat(self.nrows, self.ncols,
                      {i: {j: c * v for j, v in r.items()}
                       for i, r in self.rows.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scaled(other)
        if self.ncols != other.nrows:
            raise ValueError(
                f"shape mismatch: {self.nrows}x{self.ncols} * "
                f"{other.nrows}x{other.ncols}")
        out = IntMat(self.nrows, other.ncols)
        orows = other.rows
        for i, r in self.rows.items():
            acc = {}
            for k, v in r.items():
                br = orows.get(k)
                if br is None:
                    continue
                for j, w in br.items():
                    acc[j] = acc.get(j, 0) + v * w
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                out.rows[i] = acc
        return out

    __rmul__ = __mul__

    def transpose(self):
        out = IntMat(self.ncols, self.nrows)
        for i, j, v in self.entries():
            out.rows.setdefault(j, {})[i] = v
        return out

    def _check_same_shape(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")

    def apply(self, vec):
        """Multiply by a column vector given as dict {index: value}."""
        out = {}
        for i, r in self.rows.items():
            s = sum(v * vec.get(j, 0) for j, v in r.items())
            if s:
                out[i] = s
        return out

    def __repr__(self):
        return f"IntMat({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    # -- row/column operations (in place, used by SNF) ----------------

    def _swap_rows(self, i1, i2):
        if i1 == i2:
            return
        r1 = self.rows.pop(i1, None)
        r2 = self.rows.pop(i2, None)
        if r2 is not None:
            self.rows[i1] = r2
        if r1 is not None:
            self.rows[i2] = r1

    def _swap_cols(self, j1, j2):
        if j1 == j2:
            return
        for r in self.rows.values():
            v1 = r.pop(j1, None)
            v2 = r.pop(j2, None)
            if v2 is not None:
                r[j1] = v2
            if v1 is not None:
                r[j2] = v1

    def _addmul_row(self, dst, src, c):
        # row[dst] += c * row[src]
        if c == 0:
            return
        srow = self.rows.get(src)
        if not srow:
            return
        drow = self.rows.setdefault(dst, {})
        for j, v in srow.items():
            nv = drow.get(j, 0) + c * v
            if nv:
                drow[j] = nv
            else:
                drow.pop(j, None)
        if not drow:
            del self.rows[dst]

    def _addmul_col(self, dst, src, c):
        if c == 0:
            return
        for r in self.rows.values():
            v = r.get(src)
            if v is None:
                continue
            nv = r.get(dst, 0) + c * v
            if nv:
                r[dst] = nv
            else:
                r.pop(dst, None)

    def _scale_row(self, i, c):
        r = self.rows.get(i)
        if r:
            for j in r:
                r[j] *= c

    def _scale_col(self, j, c):
        for r in self.rows.values():
            if j in r:
                r[j] *= c

    def _combine_rows(self, i1, i2, a, b, c, d):
        # (row i1, row i2) <- (a*row1 + b*row2, c*row1 + d*row2)
        r1 = self.rows.pop(i1, {})
        r2 = self.rows.pop(i2, {})
        n1, n2 = {}, {}
        for j in set(r1) | set(r2):
            v1 = r1.get(j, 0)
            v2 = r2.get(j, 0)
            w1 = a * v1 + b * v2
            w2 = c * v1 + d * v2
            if w1:
                n1[j] = w1
            if w2:
                n2[j] = w2
        if n1:
            self.rows[i1] = n1
        if n2:
            self.rows[i2] = n2

    def _combine_cols(self, j1, j2, a, b, c, d):
        # (col j1, col j2) <- (a*col1 + b*col2, c*col1 + d*col2)
        for r in self.rows.values():
            v1 = r.get(j1, 0)
            v2 = r.get(j2, 0)
            if v1 == 0 and v2 == 0:
                continue
            w1 = a * v1 + b * v2
            w2 = c * v1 + d * v2
            if w1:
                r[j1] = w1
            else:
                r.pop(j1, None)
            if w2:
                r[j2] = w2
            else:
                r.pop(j2, None)


def smith_normal_form(M):
    """Return (U, S, V) with S = U*M*V diagonal, U and V unimodular.

    The diagonal of S is nonnegative with each entry dividing the next.
    """
    A = M.copy()
    m, n = A.nrows, A.ncols
    U = IntMat.identity(m)
    V = IntMat.identity(n)

    def pick_pivot(t):
        # Prefer a +-1 entry; otherwise take the entry of least magnitude.
        best = None
        for i, r in A.rows.items():
            if i < t:
                continue
            for j, v in r.items():
                if j < t:
                    continue
                a = abs(v)
                if a == 1:
                    return i, j
                if best is None or a < best[0]:
                    best = (a, i, j)
        if best is None:
            return None
        return best[1], best[2]

    t = 0
    while True:
        piv = pick_pivot(t)
        if piv is None:
            break
        pi, pj = piv
        A._swap_rows(t, pi)
        U._swap_rows(t, pi)
        A._swap_cols(t, pj)
        V._swap_cols(t, pj)

        while True:
            # clear column t below the pivot
            p = A.get(t, t)
            col_idx = [i for i, r in A.rows.items() if i > t and t in r]
            for i in sorted(col_idx):
                v = A.get(i, t)
                if v == 0:
                    continue
                if v % p == 0:
                    q = -(v // p)
                    A._addmul_row(i, t, q)
                    U._addmul_row(i, t, q)
                else:
                    x, y, g = xgcd(p, v)
                    a, b = x, y
                    c, d = -(v // g), p // g
                    A._combine_rows(t, i, a, b, c, d)
                    U._combine_rows(t, i, a, b, c, d)
                    p = A.get(t, t)
            # clear row t right of the pivot
            p = A.get(t, t)
            row = A.rows.get(t, {})
            row_idx = [j for j in row if j > t]
            dirty = False
            for j in sorted(row_idx):
                v = A.get(t, j)
                if v == 0:
                    continue
                if v % p == 0:
                    q = -(v // p)
                    A._addmul_col(j, t, q)
                    V._addmul_col(j, t, q)
                else:
                    x, y, g = xgcd(p, v)
                    a, b = x, y
                    c, d = -(v // g), p // g
                    A._combine_cols(t, j, a, b, c, d)
                    V._combine_cols(t, j, a, b, c, d)
                    p = A.get(t, t)
                    dirty = True
            # column ops with a gcd combine can reintroduce entries below
            if not dirty or not any(
                    i > t and t in r for i, r in A.rows.items()):
                if not any(i > t and t in r for i, r in A.rows.items()):
                    break
        t += 1
        if t >= min(m, n):
            break

    rank = 0
    while rank < min(m, n) and A.get(rank, rank) != 0:
        rank += 1

    # enforce the divisibility chain d_i | d_{i+1}
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            a = A.get(i, i)
            b = A.get(i + 1, i + 1)
            if b % a != 0:
                changed = True
                # move b next to a and rediagonalise the 2x2 block
                A._addmul_col(i, i + 1, 1)
                V._addmul_col(i, i + 1, 1)
                x, y, g = xgcd(a, b)
                c, d = -(b // g), a // g
                A._combine_rows(i, i + 1, x, y, c, d)
                U._combine_rows(i, i + 1, x, y, c, d)
                # row combine leaves a single off-diagonal entry; clear it
                v = A.get(i, i + 1)
                p = A.get(i, i)
                q = -(v // p)
                A._addmul_col(i + 1, i, q)
                V._addmul_col(i + 1, i, q)

    for i in range(rank):
        if A.get(i, i) < 0:
            A._scale_row(i, -1)
            U._scale_row(i, -1)

    return U, A, V


def invariant_factors(M):
    _, S, _ = smith_normal_form(M)
    out = []
    for i in range(min(S.nrows, S.ncols)):
        v = S.get(i, i)
        if v == 0:
            break
        out.append(v)
    return out


def rank(M):
    return len(invariant_factors(M))


def solve(M, b):
    """One integer solution x of M x = b (dict vectors), or None.

    b maps row indices to integers; the result maps column indices to
    integers.
    """
    U, S, V = smith_normal_form(M)
    c = U.apply(b)
    y = {}
    r = min(S.nrows, S.ncols)
    for i, v in c.items():
        if i >= r:
            return None
        d = S.get(i, i)
        if d == 0 or v % d != 0:
            return None
        y[i] = v // d
    return V.apply(y)


def solve_matrix(M, B):
    """Solve M X = B columnwise; returns IntMat X or None."""
    U, S, V = smith_normal_form(M)
    r = min(S.nrows, S.ncols)
    diag = [S.get(i, i) for i in range(r)]
    X = IntMat(M.ncols, B.ncols)
    # compute U*B once
    UB = U * B
    cols = {}
    for i, j, v in UB.entries():
        cols.setdefault(j, {})[i] = v
    for j in range(B.ncols):
        c = cols.get(j, {})
        y = {}
        ok = True
        for i, v in c.items():
            if i >= r or diag[i] == 0 or v % diag[i] != 0:
                ok = False
                break
            y[i] = v // diag[i]
        if not ok:
            return None
        for i, v in V.apply(y).items():
            X.set(i, j, v)
    return X


def block_diag(blocks):
    nr = sum(b.nrows for b in blocks)
    nc = sum(b.ncols for b in blocks)
    out = IntMat(nr, nc)
    ro = co = 0
    for b in blocks:
        for i, j, v in b.entries():
            out.set(ro + i, co + j, v)
        ro += b.nrows
        co += b.ncols
    return out
