"""Ball complexes: validation, face poset combinatorics, subdivision, dual cells.

A ball complex is presented by its cells and signed codimension-1
incidence data.  The PL-embedding axiom itself is not checkable from
incidence data; validation enforces the machine-checkable fragment:
graded face poset, d o d = 0, and sphere homology of every cell
boundary.  Inputs promise PL realizability.

Derived subdivisions are simplicial complexes whose vertices are the
cells of the source and whose simplices are strictly increasing flags;
flag simplices are oriented by the listed order, with the alternating
face rule.  Cone points are formal barycenters, so no choices enter.

Reserved id characters: "*" joins product cell ids, "<" joins flag ids.
"""

from __future__ import annotations

from .intmat import IntMat
from .chain import ChainComplex, ChainMap, homology, dualize, label_key

__all__ = [
    "Cell", "BallComplex", "ComplexPair", "ValidationError",
    "validate_complex", "interval", "star", "product",
    "derived_subdivision", "dual_cell", "skeleton", "restrict_pair",
    "cellular_chain_complex", "cochain_complex", "open_union_complex",
    "euler_characteristic", "subdivision_map",
]


class Cell:
    __slots__ = ("id", "dim", "faces")

    def __init__(self, id, dim, faces):
        self.id = id
        self.dim = dim
        self.faces = list(faces)

    def __repr__(self):
        return f"Cell({self.id!r}, dim={self.dim})"


class ValidationError(ValueError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("; ".join(
            f"{v['code']} at {v['cell']}" for v in violations))


class BallComplex:
    """Finite graded poset of cells with signed incidence data."""

    def __init__(self, cells):
        self.cells = {c.id: c for c in cells}
        self._below = None

    def __contains__(self, cid):
        return cid in self.cells

    def __len__(self):
        return len(self.cells)

    def dim(self, cid=None):
        if cid is not None:
            return self.cells[cid].dim
        return max((c.dim for c in self.cells.values()), default=-1)

    def cells_of_dim(self, d):
        return sorted((c.id for c in self.cells.values() if c.dim == d))

    def sorted_ids(self):
        return sorted(self.cells,
                      key=lambda i: (self.cells[i].dim, label_key(i)))

    def below(self, cid):
        """All cells <= cid (the closure)."""
        if self._below is None:
            self._below = {}
            for i in sorted(self.cells,
                            key=lambda x: self.cells[x].dim):
                s = {i}
                for f, _ in self.cells[i].faces:
                    s |= self._below[f]
                self._below[i] = frozenset(s)
        return self._below[cid]

    def leq(self, a, b):
        return a in self.below(b)

    def above(self, cid):
        return frozenset(i for i in self.cells if cid in self.below(i))

    def covers(self, cid):
        """Cells tau > cid with dim tau = dim cid + 1."""
        d = self.cells[cid].dim + 1
        return sorted(i for i in self.above(cid)
                      if self.cells[i].dim == d)

    def incidence(self, face, cell):
        """Signed multiplicity of `face` in the boundary of `cell`."""
        return sum(s for f, s in self.cells[cell].faces if f == face)

    def subcomplex(self, ids):
        ids = set(ids)
        for i in ids:
            if not self.below(i) <= ids:
                raise ValidationError(
                    [{"code": "NOT_CLOSED", "cell": i,
                      "detail": "subset is not face-closed"}])
        return BallComplex([Cell(i, self.cells[i].dim,
                                 self.cells[i].faces) for i in sorted(ids)])

    def __repr__(self):
        counts = {}
        for c in self.cells.values():
            counts[c.dim] = counts.get(c.dim, 0) + 1
        return f"BallComplex({counts})"


class ComplexPair:
    """A ball complex together with a downward-closed subcomplex."""

    def __init__(self, total, sub):
        self.total = total
        self.sub = frozenset(sub)
        bad = [i for i in self.sub if i not in total.cells]
        if bad:
            raise ValidationError([{"code": "NOT_CLOSED", "cell": bad[0],
                                    "detail": "sub not inside total"}])
        for i in self.sub:
            if not total.below(i) <= self.sub:
                raise ValidationError(
                    [{"code": "NOT_CLOSED", "cell": i,
                      "detail": "sub is not face-closed"}])

    def kept(self):
        return [i for i in self.total.sorted_ids() if i not in self.sub]


def validate_complex(raw_cells):
    """Build a validated BallComplex from (id, dim, faces) data.

    raw_cells: iterable of Cell or of (id, dim, [(face_id, sign), ...]).
    Raises ValidationError carrying the structured violation list.
    """
    cells = []
    for c in raw_cells:
        if not isinstance(c, Cell):
            c = Cell(*c)
        cells.append(c)
    violations = []
    byid = {}
    for c in cells:
        if c.id in byid:
            violations.append({"code": "DANGLING_FACE", "cell": c.id,
                               "detail": "duplicate id"})
        byid[c.id] = c
    for c in cells:
        if c.dim < 0:
            violations.append({"code": "DIM_MISMATCH", "cell": c.id,
                               "detail": "negative dimension"})
        for f, s in c.faces:
            if f not in byid:
                violations.append({"code": "DANGLING_FACE", "cell": c.id,
                                   "detail": f"face {f} unresolved"})
            elif byid[f].dim != c.dim - 1:
                violations.append({"code": "DIM_MISMATCH", "cell": c.id,
                                   "detail": f"face {f} has dim "
                                   f"{byid[f].dim}, expected {c.dim - 1}"})
            if s not in (1, -1):
                violations.append({"code": "DIM_MISMATCH", "cell": c.id,
                                   "detail": f"incidence sign {s}"})
    if violations:
        raise ValidationError(violations)

    X = BallComplex(cells)
    C = cellular_chain_complex(X, check=False)
    for n in C.degrees():
        if n - 1 in C.d or n in C.d:
            prod = C.diff(n - 1) * C.diff(n)
            if not prod.is_zero():
                i, j, _ = next(prod.entries())
                violations.append({
                    "code": "NOT_D_SQUARED_ZERO",
                    "cell": C.labels(n)[j],
                    "detail": f"d o d sends {C.labels(n)[j]} across "
                              f"{C.labels(n - 2)[i]}"})
    if violations:
        raise ValidationError(violations)

    for cid in X.sorted_ids():
        d = X.cells[cid].dim
        if d == 0:
            continue
        bd = sorted(X.below(cid) - {cid})
        h = homology(open_union_complex(X, bd))
        ok = (h.betti(0) == (2 if d == 1 else 1)
              and all(h.torsion(n) == () for n in h.degrees()))
        if d >= 2:
            ok = ok and h.betti(d - 1) == 1
            ok = ok and all(h.betti(n) == 0
                            for n in h.degrees() if n not in (0, d - 1))
        else:
            ok = ok and h.degrees() == [0]
        if not ok:
            violations.append({"code": "BOUNDARY_NOT_SPHERE", "cell": cid,
                               "detail": repr(h)})
    if violations:
        raise ValidationError(violations)
    return X


def euler_characteristic(X):
    return sum((-1) ** c.dim for c in X.cells.values())


# -- cellular chain complexes -----------------------------------------


def cellular_chain_complex(arg, check=True):
    """Cellular chains of a BallComplex or a ComplexPair, basis = cells."""
    if isinstance(arg, ComplexPair):
        X = arg.total
        kept = [i for i in X.sorted_ids() if i not in arg.sub]
        return open_union_complex(X, kept, check=check)
    X = arg
    return open_union_complex(X, X.sorted_ids(), check=check)


def open_union_complex(X, ids, check=True):
    """Chain complex spanned by the given cells, incidences kept inside.

    For a downward-closed set this is the subcomplex; in general it is
    the complex of the union of open cells (relative complex of the
    closure modulo what is missing), e.g. intervals [rho:sigma].
    """
    ids = set(ids)
    basis = {}
    for i in sorted(ids, key=lambda c: (X.cells[c].dim, label_key(c))):
        basis.setdefault(X.cells[i].dim, []).append(i)
    d = {}
    for n, lbls in basis.items():
        if n - 1 not in basis:
            continue
        m = IntMat(len(basis[n - 1]), len(lbls))
        row = {lbl: k for k, lbl in enumerate(basis[n - 1])}
        for j, lbl in enumerate(lbls):
            for f, s in X.cells[lbl].faces:
                if f in row:
                    m.add_to(row[f], j, s)
        if not m.is_zero():
            d[n] = m
    return ChainComplex(basis, d, check=check)


def cochain_complex(arg):
    """Cellular cochains: transpose differentials, degrees negated."""
    return dualize(cellular_chain_complex(arg))


# -- poset operations --------------------------------------------------


def interval(X, rho, sigma):
    """Cells tau with rho <= tau <= sigma; error if rho is not <= sigma."""
    if not X.leq(rho, sigma):
        raise ValidationError([{"code": "NOT_COMPARABLE", "cell": rho,
                                "detail": f"{rho} not below {sigma}"}])
    below_sigma = X.below(sigma)
    return sorted((t for t in below_sigma if X.leq(rho, t)),
                  key=lambda c: (X.cells[c].dim, label_key(c)))


def star(X, sigma):
    """All cells tau >= sigma (the open star)."""
    return sorted(X.above(sigma),
                  key=lambda c: (X.cells[c].dim, label_key(c)))


def skeleton(X, k):
    """The k-skeleton as a pair (subcomplex, empty)."""
    ids = [i for i in X.sorted_ids() if X.cells[i].dim <= k]
    return ComplexPair(X.subcomplex(ids), frozenset())


def restrict_pair(X, Y, Z):
    """The pair (Y, Z) of subcomplexes of X; both must be face-closed."""
    Y = set(Y)
    Z = set(Z)
    if not Z <= Y:
        raise ValidationError([{"code": "NOT_CLOSED", "cell": "",
                                "detail": "Z not contained in Y"}])
    return ComplexPair(X.subcomplex(Y), frozenset(Z))


# -- products -----------------------------------------------------------


def product_id(a, b):
    return f"{a}*{b}"


def split_product_id(cid):
    a, b = cid.split("*", 1)
    return a, b


def product(X, Y):
    """Product ball complex; cells are pairs, dims add.

    Incidence follows the Koszul rule with the first factor unsigned, so
    the cellular chain complex of X x Y is the tensor of the factors'.
    """
    cells = []
    for a in X.sorted_ids():
        ca = X.cells[a]
        for b in Y.sorted_ids():
            cb = Y.cells[b]
            faces = [(product_id(f, b), s) for f, s in ca.faces]
            sgn = -1 if ca.dim % 2 else 1
            faces += [(product_id(a, f), sgn * s) for f, s in cb.faces]
            cells.append(Cell(product_id(a, b), ca.dim + cb.dim, faces))
    return BallComplex(cells)


# -- derived subdivision and dual cells ---------------------------------


def flag_id(flag):
    return "<".join(flag)


def split_flag_id(fid):
    return tuple(fid.split("<"))


class DerivedSubdivision:
    """The canonical derived subdivision X' as a simplicial ball complex.

    Vertices of X' are the cells of X; l-simplices are strictly
    increasing flags sigma_0 < ... < sigma_l, oriented by listed order.
    """

    def __init__(self, source, complex, flags):
        self.source = source
        self.complex = complex
        self.flags = flags  # id -> tuple of source cell ids

    def piece(self, fid):
        """First entry of the flag: the cell whose dual interior holds it."""
        return self.flags[fid][0]


def _all_flags(X):
    order = sorted(X.cells, key=lambda i: (X.cells[i].dim, label_key(i)))
    flags = []
    above = {i: sorted(X.above(i) - {i},
                       key=lambda j: (X.cells[j].dim, label_key(j)))
             for i in order}

    def extend(flag):
        flags.append(tuple(flag))
        for nxt in above[flag[-1]]:
            flag.append(nxt)
            extend(flag)
            flag.pop()

    for i in order:
        extend([i])
    return flags


def derived_subdivision(X):
    flags = _all_flags(X)
    cells = []
    for fl in flags:
        fid = flag_id(fl)
        faces = []
        if len(fl) > 1:
            for k in range(len(fl)):
                sub = fl[:k] + fl[k + 1:]
                faces.append((flag_id(sub), (-1) ** k))
        cells.append(Cell(fid, len(fl) - 1, faces))
    return DerivedSubdivision(X, BallComplex(cells),
                              {flag_id(f): f for f in flags})


def dual_cell(X, sigma, subdiv=None):
    """The pair (D(sigma, X), dD(sigma, X)) inside X'.

    D consists of the flags with sigma <= sigma_0; dD of those with
    sigma < sigma_0 strictly.
    """
    sd = subdiv if subdiv is not None else derived_subdivision(X)
    D_ids = [fid for fid, fl in sd.flags.items()
             if X.leq(sigma, fl[0])]
    bd = frozenset(fid for fid in D_ids if sd.flags[fid][0] != sigma)
    return ComplexPair(sd.complex.subcomplex(D_ids), bd)


# -- the carrier-based subdivision comparison map ------------------------


def subdivision_map(X, subdiv=None):
    """The chain map C_*(X) -> C_*(X') sending each cell to the signed
    sum of the flags it carries; a chain equivalence."""
    sd = subdiv if subdiv is not None else derived_subdivision(X)
    C = cellular_chain_complex(X)
    Cp = cellular_chain_complex(sd.complex)
    # chains indexed by flag tuples, built recursively cell by cell
    sd_chain = {}

    def chain_of(cid):
        if cid in sd_chain:
            return sd_chain[cid]
        cell = X.cells[cid]
        if cell.dim == 0:
            out = {(cid,): 1}
        else:
            bd = {}
            for f, s in cell.faces:
                for fl, v in chain_of(f).items():
                    bd[fl] = bd.get(fl, 0) + s * v
            sgn = (-1) ** cell.dim
            out = {fl + (cid,): sgn * v for fl, v in bd.items() if v}
        sd_chain[cid] = out
        return out

    mats = {}
    for n in C.degrees():
        m = IntMat(Cp.rank(n), C.rank(n))
        for j, cid in enumerate(C.labels(n)):
            for fl, v in chain_of(cid).items():
                m.set(Cp.index(n, flag_id(fl)), j, v)
        mats[n] = m
    return ChainMap(C, Cp, 0, mats)
