"""Dev: pin the graded box-product sign against exact constraints."""
import itertools
import random
import sys
import time
sys.path.insert(0, "src")

import lhk.gstructures as gsm
from lhk import corpus
from lhk.intmat import IntMat
from lhk.graded import (GradedHomChain, chain_dual, switch, _support_ok,
                        LOWER)
from lhk.gstructures import external_tensor, hom_box_product
from lhk.signatures import (ManifoldComplex, dissected_signature,
                            relative_dissected_signature, CLOSED,
                            WITH_BOUNDARY)


def random_hom(C, TC, n, rng, density=0.3):
    src = TC.assembled
    tgt = C.assembled
    mats = {}
    for p in src.degrees():
        if p + n not in tgt.basis:
            continue
        m = IntMat(tgt.rank(p + n), src.rank(p))
        for j, (sig, _) in enumerate(src.labels(p)):
            for i, (tau, _) in enumerate(tgt.labels(p + n)):
                if _support_ok(C.base, C.variance, tau, sig) and \
                        rng.random() < density:
                    m.set(i, j, rng.choice([-1, 1, 2]))
        if not m.is_zero():
            mats[p] = m
    return GradedHomChain(C, C, n, mats, TC=TC, check=False)


def main():
    rng = random.Random(23)
    XL = corpus.interval()
    XK = corpus.circle()
    ML = ManifoldComplex(XL, WITH_BOUNDARY)
    MK = ManifoldComplex(XK, CLOSED)
    sigL = relative_dissected_signature(ML)
    sigK = dissected_signature(MK)
    CL, CK = sigL.complex, sigK.complex
    TL, TK = sigL.structure.TC, sigK.structure.TC
    P = external_tensor(CL, CK)
    TP = chain_dual(P)

    gs = [sigL.structure.phi(0), sigL.structure.phi(1),
          random_hom(CL, TL, 0, rng), random_hom(CL, TL, 1, rng)]
    hs = [sigK.structure.phi(0), sigK.structure.phi(1),
          random_hom(CK, TK, 0, rng), random_hom(CK, TK, 1, rng)]

    def test(params):
        c = params

        def sign(a1, b1, a2, b2, u, v, k1, k2):
            e = (c[0] * a2 * b1 + c[1] * v * a1 + c[2] * v * b1
                 + c[3] * k2 * (a1 + b1) + c[4] * k2 * u
                 + c[5] * a2 * k1 + c[6] * b2 * k1
                 + c[7] * k1 * k2 + c[8] * u * v
                 + c[9] * (a1 * a2) + c[10] * (b1 * b2))
            return -1 if e % 2 else 1

        gsm._box_sign = sign
        try:
            for g in gs[:3]:
                for h in hs[:3]:
                    gh = hom_box_product(g, h, P=P, TP=TP)
                    # chain rule
                    lhs = gh.differential()
                    rhs = hom_box_product(g.differential(), h, P=P, TP=TP)
                    rhs = rhs.add(
                        hom_box_product(g, h.differential(), P=P, TP=TP)
                        .scaled((-1) ** g.degree))
                    if lhs != rhs:
                        return False, "chain-rule"
                    # switch compatibility
                    swgh = switch(gh, TD=TP)
                    sw = hom_box_product(switch(g, TD=TL),
                                         switch(h, TD=TK), P=P, TP=TP)
                    if swgh != sw.scaled((-1) ** (g.degree * h.degree)):
                        return False, "switch"
            return True, None
        except Exception as e:  # noqa
            return False, f"exc {e}"

    survivors = []
    t0 = time.time()
    for params in itertools.product((0, 1), repeat=11):
        ok, why = test(params)
        if ok:
            survivors.append(params)
            print("SURVIVES", params)
    print("total:", len(survivors), f"({time.time()-t0:.0f}s)")


if __name__ == "__main__":
    main()
