"""Symmetric and quadratic structures on X-graded complexes, and products.

A graded structure's chains are triangular block families in the tensor
over the category (GradedHomChain); the cycle relations match the
ungraded ones with the graded switch:

    d(phi_s) = (-1)^n (phi_{s-1} + (-1)^s T phi_{s-1}),
    d(psi_s) = (-1)^n (psi_{s+1} + (-1)^{s+1} T psi_{s+1}).

Local Poincare means every diagonal block of the duality chain phi_0
(resp. (1+T) psi_0) is a chain equivalence; the global verdict certifies
the assembled map.

Products pair structures over L and K into structures over L x K.  The
underlying complex is the external tensor; on tensor elements the
box product g [x] h is entrywise, the sign for the entry pairing local
degrees (dual a1 -> b1) over a k1-ball with (dual a2 -> b2) over a
k2-ball in factors of Hom-degrees u, v being

    (-1) ** (a2*b1 + v*(a1 + b1) + k2*(a1 + b1 + u) + a2*k1 + b2*k1),

the unique family (up to the point normalization) satisfying
d(g [x] h) = dg [x] h + (-1)^u g [x] dh and
T(g [x] h) = (-1)^{uv} T(g) [x] T(h), both asserted in the tests.
"""

from __future__ import annotations

from .intmat import IntMat
from .chain import ChainComplex, suspend, is_chain_equivalence, tensor_Z
from .complexes import product, product_id, split_product_id
from .graded import (
    GradedComplex, GradedHomChain, GradedMorphism, chain_dual, switch,
    assemble, LOWER, UPPER,
)

__all__ = [
    "GradedSymmetricStructure", "GradedQuadraticStructure",
    "external_tensor", "hom_box_product", "graded_product",
    "graded_from_ungraded", "local_duality_map", "poincare_report",
]


class GradedSymmetricStructure:
    """phi_s in (C (x)_{A(X)} C)_{n+s} with the graded cycle relations."""

    def __init__(self, C, n, phis, TC=None, check=True):
        self.C = C
        self.n = n
        self.phis = list(phis)
        self.k = len(self.phis) - 1
        self.TC = TC if TC is not None else (
            phis[0].TC if phis else chain_dual(C))
        if check:
            self.assert_relations()

    def phi(self, s):
        if 0 <= s <= self.k:
            return self.phis[s]
        return GradedHomChain(self.C, self.C, self.n + s, {}, TC=self.TC,
                              check=False)

    def assert_relations(self):
        sgn_n = -1 if self.n % 2 else 1
        for s in range(0, self.k + 1):
            lhs = self.phi(s).differential()
            prev = self.phi(s - 1)
            rhs = prev.add(switch(prev, TD=self.TC).scaled((-1) ** s))
            rhs = rhs.scaled(sgn_n)
            if lhs != rhs:
                raise ValueError(
                    f"graded symmetric cycle relation fails at s={s}")

    def duality_chain(self):
        return self.phi(0)


class GradedQuadraticStructure:
    """psi_s in (C (x)_{A(X)} C)_{n-s}, finitely many nonzero."""

    def __init__(self, C, n, psis, TC=None, check=True):
        self.C = C
        self.n = n
        self.psis = list(psis)
        self.TC = TC if TC is not None else (
            psis[0].TC if psis else chain_dual(C))
        if check:
            self.assert_relations()

    def psi(self, s):
        if 0 <= s < len(self.psis):
            return self.psis[s]
        return GradedHomChain(self.C, self.C, self.n - s, {}, TC=self.TC,
                              check=False)

    def assert_relations(self):
        sgn_n = -1 if self.n % 2 else 1
        for s in range(0, len(self.psis) + 1):
            lhs = self.psi(s).differential()
            nxt = self.psi(s + 1)
            rhs = nxt.add(switch(nxt, TD=self.TC).scaled((-1) ** (s + 1)))
            rhs = rhs.scaled(sgn_n)
            if lhs != rhs:
                raise ValueError(
                    f"graded quadratic cycle relation fails at s={s}")

    def duality_chain(self):
        psi0 = self.psi(0)
        return psi0.add(switch(psi0, TD=self.TC))


def local_duality_map(structure, sigma):
    """The diagonal block of the duality chain at a ball, as a chain map
    from the signed-suspended dual component."""
    phi0 = structure.duality_chain()
    n = structure.n
    C = structure.C
    TC = structure.TC
    comp_t = TC.component(sigma)
    comp_c = C.component(sigma)
    src = suspend(comp_t, n, signed=True)
    mats = {}
    t_ass = TC.assembled
    c_ass = C.assembled
    for p in comp_t.degrees():
        m = IntMat(comp_c.rank(p + n), comp_t.rank(p))
        big = phi0.component(p)
        for j, lbl in enumerate(comp_t.labels(p)):
            col = t_ass.index(p, (sigma, lbl))
            if p + n not in comp_c.basis:
                continue
            for i, lbl2 in enumerate(comp_c.labels(p + n)):
                v = big.get(c_ass.index(p + n, (sigma, lbl2)), col)
                if v:
                    m.set(i, j, v)
        if not m.is_zero():
            mats[p + n] = m
    from .chain import ChainMap
    return ChainMap(src, comp_c, 0, mats, check=True)


def poincare_report(structure, exempt=()):
    """Per-ball Poincare verdicts plus the assembled (global) verdict.

    exempt lists balls where failure is permitted (reported, not
    required); the overall flag requires every non-exempt ball to pass.
    """
    C = structure.C
    exempt = set(exempt)
    per_ball = {}
    for sigma in C.base.sorted_ids():
        if sigma not in C.components and \
                sigma not in structure.TC.components:
            continue
        f = local_duality_map(structure, sigma)
        ok, cert = is_chain_equivalence(f)
        per_ball[sigma] = (ok, cert)
    phi0 = structure.duality_chain()
    gmap = phi0.as_morphism()
    g_ok, g_cert = is_chain_equivalence(gmap)
    required_ok = all(ok for b, (ok, _) in per_ball.items()
                      if b not in exempt)
    return {
        "per_ball": per_ball,
        "exempt": sorted(exempt),
        "required_ok": required_ok,
        "assembled": (g_ok, g_cert),
    }


def graded_from_ungraded(X, ball, C, structure):
    """View an ungraded structure as graded, supported on one ball.

    Only sensible for a base where the ball is the unique cell (a
    point); the slant translation uses the documented lambda signs.
    """
    G = GradedComplex(X, LOWER, {ball: C}, {})
    TC = chain_dual(G)
    k = X.cells[ball].dim
    if k != 0:
        raise ValueError("single-ball embedding expects a vertex base")

    def hom_chain(t):
        mats = {}
        for (p, x, y), v in t.entries.items():
            q = t.n - p
            lam = -1 if ((p * q + p * (p - 1) // 2) % 2) else 1
            m = mats.setdefault(-p, IntMat(
                G.assembled.rank(q), TC.assembled.rank(-p)))
            m.add_to(G.assembled.index(q, (ball, y)),
                     TC.assembled.index(-p, (ball, ("*", (ball, x)))),
                     lam * v)
        return GradedHomChain(G, G, t.n, mats, TC=TC, check=False)

    from .structures import SymmetricStructure
    if isinstance(structure, SymmetricStructure):
        phis = [hom_chain(structure.phi(s)) for s in range(structure.k + 1)]
        return G, GradedSymmetricStructure(G, structure.n, phis, TC=TC)
    psis = [hom_chain(structure.psi(s))
            for s in range(len(structure.psis))]
    return G, GradedQuadraticStructure(G, structure.n, psis, TC=TC)


# -- external tensor and box product ---------------------------------------


def external_tensor(CL, CK, XP=None):
    """The graded complex over L x K with (C [x] D)(sigma x tau) =
    C(sigma) (x) D(tau)."""
    if CL.variance != CK.variance:
        raise ValueError("VARIANCE_MISMATCH")
    if XP is None:
        XP = product(CL.base, CK.base)
    big = tensor_Z(CL.assembled, CK.assembled)
    relabeled = big.relabel(
        lambda n, lbl: (product_id(lbl[0][0], lbl[1][0]),
                        (lbl[0][1], lbl[1][1])))
    return GradedComplex.from_assembled(XP, CL.variance, relabeled)


def _box_sign(a1, b1, a2, b2, u, v, k1, k2):
    e = (a2 * b1 + v * (a1 + b1) + k2 * (a1 + b1 + u)
         + a2 * k1 + b2 * k1)
    return -1 if e % 2 else 1


def hom_box_product(g, h, P=None, TP=None):
    """g [x] h for tensor elements over L and K, over the product base."""
    CL, DL = g.C, g.D
    CK, DK = h.C, h.D
    u, v = g.degree, h.degree
    baseL, baseK = CL.base, CK.base
    if P is None:
        P = external_tensor(DL, DK)
    CP = external_tensor(CL, CK, P.base) if (CL is not DL or CK is not DK) \
        else P
    if TP is None:
        TP = chain_dual(CP)
    src_g = g.TC.assembled
    tgt_g = DL.assembled
    src_h = h.TC.assembled
    tgt_h = DK.assembled
    out_src = TP.assembled
    out_tgt = P.assembled
    mats = {}
    for p1, m1 in g.mats.items():
        for i1, j1, v1 in m1.entries():
            sig1, dual1 = src_g.labels(p1)[j1]
            k1 = baseL.cells[sig1].dim
            a1 = -p1 - k1 if CL.variance == LOWER else k1 - p1
            b1 = p1 + u
            tau1, w1 = tgt_g.labels(b1)[i1]
            rho1, lu1 = dual1[1]
            for p2, m2 in h.mats.items():
                for i2, j2, v2 in m2.entries():
                    sig2, dual2 = src_h.labels(p2)[j2]
                    k2 = baseK.cells[sig2].dim
                    a2 = -p2 - k2 if CK.variance == LOWER else k2 - p2
                    b2 = p2 + v
                    tau2, w2 = tgt_h.labels(b2)[i2]
                    rho2, lu2 = dual2[1]
                    sigP = product_id(sig1, sig2)
                    kP = k1 + k2
                    aP = a1 + a2
                    bP = b1 + b2
                    if CP.variance == LOWER:
                        p_out = -aP - kP
                    else:
                        p_out = kP - aP
                    col_lbl = (sigP, ("*", (product_id(rho1, rho2),
                                            (lu1, lu2))))
                    row_lbl = (product_id(tau1, tau2), (w1, w2))
                    col = out_src.index(p_out, col_lbl)
                    row = out_tgt.index(bP, row_lbl)
                    s = _box_sign(a1, b1, a2, b2, u, v, k1, k2)
                    m = mats.setdefault(p_out, IntMat(
                        out_tgt.rank(p_out + u + v), out_src.rank(p_out)))
                    m.add_to(row, col, s * v1 * v2)
    return GradedHomChain(CP, P, u + v, mats, TC=TP, check=False)


def graded_product(A, B):
    """Product of graded structures over L and K: per-ball products of
    the structure chains over the product complex."""
    CL, SL = A
    CK, SK = B
    if CL.base.cells.keys() == CK.base.cells.keys() and CL.base is not CK.base:
        pass
    P = external_tensor(CL, CK)
    TP = chain_dual(P)
    n1, n2 = SL.n, SK.n
    sym2 = isinstance(SK, GradedSymmetricStructure)
    if not isinstance(SL, GradedSymmetricStructure):
        raise ValueError("first factor must be symmetric")
    if sym2:
        k_out = min(SL.k + SK.k, n1 + n2 + 1)
        phis = []
        for s in range(k_out + 1):
            acc = GradedHomChain(P, P, n1 + n2 + s, {}, TC=TP, check=False)
            for i in range(s + 1):
                j = s - i
                if i > SL.k or j > SK.k:
                    continue
                t2 = SK.phi(j)
                if i % 2:
                    t2 = switch(t2, TD=SK.TC)
                sgn = (-1) ** (i * j + n2 * i)
                acc = acc.add(hom_box_product(SL.phi(i), t2, P=P, TP=TP)
                              .scaled(sgn))
            phis.append(acc)
        return P, GradedSymmetricStructure(P, n1 + n2, phis, TC=TP)
    smax = len(SK.psis)
    psis = []
    for s in range(smax):
        acc = GradedHomChain(P, P, n1 + n2 - s, {}, TC=TP, check=False)
        for i in range(0, SL.k + 1):
            t2 = SK.psi(i + s)
            if t2.mats == {} and i + s >= smax:
                continue
            if i % 2:
                t2 = switch(t2, TD=SK.TC)
            sgn = (-1) ** (i * s + n2 * i)
            acc = acc.add(hom_box_product(SL.phi(i), t2, P=P, TP=TP)
                          .scaled(sgn))
        psis.append(acc)
    return P, GradedQuadraticStructure(P, n1 + n2, psis, TC=TP)
