"""Gorenstein detection and its Serre-duality consequences, with witnesses.

All infinite-dimension verdicts are cap-relative: the engine reports honest
ignorance beyond the cap, never infinity.
"""

from .algebra import (
    cokernel_rep,
    injective_envelope,
    is_injective_module,
    nakayama,
    projective,
    regular_representation,
    simple,
)
from .complexes import fpd, inj_coresolution, proj_resolution, stalk_complex


def injective_dimension(M, cap):
    """Length of the minimal injective coresolution, or '>cap'."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    cur = M
    d = 0
    while d <= cap:
        if cur.total_dim == 0:
            return max(d - 1, 0)
        I, emb = injective_envelope(cur)
        if I.dim_vector() == cur.dim_vector():
            return d
        cur, _ = cokernel_rep(emb)
        d += 1
    return f">{cap}"


class GorensteinReport:
    def __init__(self, left_injdim, right_injdim, verdict, witness=None):
        self.left_injdim = left_injdim
        self.right_injdim = right_injdim
        self.verdict = verdict
        self.witness = witness

    def __repr__(self):
        return (f"GorensteinReport({self.verdict}, left={self.left_injdim}, "
                f"right={self.right_injdim})")


def gorenstein_check(A, cap):
    """Both-sided injective dimension of the regular module, with a witness
    complex when the algebra fails to be Gorenstein within the cap.

    The witness is a Nakayama image of a projective whose minimal projective
    resolution does not terminate: an object of the range that is not
    certified in the domain."""
    left = injective_dimension(regular_representation(A), cap)
    right = injective_dimension(regular_representation(A.opposite()), cap)
    if isinstance(left, int) and isinstance(right, int):
        return GorensteinReport(left, right, "Gorenstein")
    witness = None
    for v in A.quiver.vertices:
        cand = stalk_complex(nakayama(projective(A, v)))
        if not proj_resolution(cand, cap).terminated:
            witness = cand
            break
    verdict = "NotGorensteinAtCap" if witness is not None else "UnknownAtCap"
    return GorensteinReport(left, right, verdict, witness=witness)


def serre_duality_status(A, cap):
    """Serre-duality status of K^b(proj), K^b(inj) and the bounded derived
    category: the first two follow the Gorenstein verdict, the last follows
    finite global dimension (finite projective dimension of every simple)."""
    g = gorenstein_check(A, cap)
    out = {}
    if g.verdict == "Gorenstein":
        out["K^b(proj)"] = {"status": "HasSerreDuality",
                            "left_injdim": g.left_injdim, "right_injdim": g.right_injdim}
        out["K^b(inj)"] = {"status": "HasSerreDuality",
                           "left_injdim": g.left_injdim, "right_injdim": g.right_injdim}
    else:
        proj_witness = g.witness
        inj_witness = None
        for v in A.quiver.vertices:
            cand = stalk_complex(projective(A, v))
            if not inj_coresolution(cand, cap).terminated:
                inj_witness = cand
                break
        out["K^b(proj)"] = {"status": f"FailsAtCap({cap})", "witness": proj_witness}
        out["K^b(inj)"] = {"status": f"FailsAtCap({cap})", "witness": inj_witness}

    db_witness = None
    pdims = {}
    for v in A.quiver.vertices:
        verdict = fpd(stalk_complex(simple(A, v)), cap)
        pdims[str(v)] = verdict.value if verdict.finite else f">{cap}"
        if not verdict.finite and db_witness is None:
            db_witness = stalk_complex(simple(A, v))
    if db_witness is None:
        out["D^b"] = {"status": "HasSerreDuality", "simple_pdims": pdims}
    else:
        out["D^b"] = {"status": f"FailsAtCap({cap})", "witness": db_witness,
                      "simple_pdims": pdims}
    out["gorenstein"] = g
    return out
