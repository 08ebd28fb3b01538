"""The Serre functor on bounded complexes of projectives.

On K^b(proj) the functor acts termwise by the Nakayama construction; the
associated pairing of a chain map f: X -> Y against g: Y -> S(X) is the
alternating sum of the module-level pairings, which is homotopy invariant
and non-degenerate.  The shift-compatibility isomorphism is solved for
numerically rather than fixed by convention.
"""

import random as _random

from .exactla import ExactMatrix
from .algebra import (
    NakayamaData,
    NotProjective,
    PairingContext,
    ShapeMismatch,
    hom_basis,
    is_projective,
    projective,
    simple,
)
from .complexes import (
    BoundedComplex,
    ChainMap,
    cone,
    identity_chain_map,
    inj_coresolution,
    iso_in_K,
    khom,
    proj_resolution,
    shift,
    shift_chain_map,
    stalk_complex,
    zero_chain_map,
)
from . import sampling


class NotProjectiveComplex(Exception):
    pass


class NoConsistentSign(Exception):
    pass


IDENTITY_TAGS = {
    "left-naturality": "A.1",
    "right-naturality": "A.2",
    "swap": "A.3",
    "trace-swap": "A.4",
    "shift-pairing": "2.1",
    "shift-trace": "2.2",
}


class SerreData:
    """S(X) for X in K^b(proj), with the per-degree Nakayama bases retained."""

    def __init__(self, X):
        self.X = X
        self.ndata = {}
        for i, rep in X.terms.items():
            if not is_projective(rep):
                raise NotProjectiveComplex(f"term in degree {i} is not projective")
            self.ndata[i] = NakayamaData(rep)
        terms = {i: nd.nu for i, nd in self.ndata.items()}
        diffs = {}
        for i, d in X.diffs.items():
            diffs[i] = _nakayama_map_between(self.ndata[i], self.ndata[i + 1], d)
        self.image = BoundedComplex(X.algebra, terms, diffs, check=True)


def _nakayama_map_between(src_data, tgt_data, fmap):
    A = fmap.source.algebra
    mats = {}
    for v in A.quiver.vertices:
        cols = [g.compose(fmap).vec() for g in tgt_data.hom_bases[v]]
        if cols:
            stacked = ExactMatrix.from_columns(A.field, len(cols[0]), cols)
        else:
            stacked = ExactMatrix.zeros(A.field, src_data.hom_mats[v].rows, 0)
        sol = src_data.hom_mats[v].solve_multi(stacked)
        if sol is None:
            raise ShapeMismatch("composition left the Hom space")
        mats[v] = sol.transpose()
    from .algebra import RepMap

    return RepMap(src_data.nu, tgt_data.nu, mats, check=False)


def serre_of(X):
    """S(X): the Nakayama functor applied termwise to a complex of projectives."""
    return SerreData(X).image


def serre_of_map(f, source_data=None, target_data=None):
    """S(f) for a chain map between complexes of projectives."""
    sd = source_data if source_data is not None else SerreData(f.source)
    td = target_data if target_data is not None else SerreData(f.target)
    comps = {}
    for i in set(f.comps):
        comps[i] = _nakayama_map_between(sd.ndata[i], td.ndata[i], f.comp(i))
    return ChainMap(sd.image, td.image, comps, check=True)


class ComplexPairing:
    """The alternating-sum pairing khom(X, Y) x khom(Y, S(X)) -> k."""

    def __init__(self, serre_data, Y):
        self.sdata = serre_data
        self.X = serre_data.X
        self.Y = Y
        self.contexts = {}
        for i in self.X.terms:
            if i in Y.terms:
                self.contexts[i] = PairingContext(
                    self.X.terms[i], Y.terms[i], ndata=serre_data.ndata[i])

    def pair(self, f, g):
        fld = self.X.algebra.field
        total = fld.zero()
        for i, ctx in self.contexts.items():
            val = ctx.pair(f.comp(i), g.comp(i))
            if i % 2 != 0:
                val = fld.neg(val)
            total = fld.add(total, val)
        return total

    def pair_multi(self, fs, gs):
        fld = self.X.algebra.field
        out = [[fld.zero() for _ in gs] for _ in fs]
        for i, ctx in self.contexts.items():
            vals = ctx.pair_multi([f.comp(i) for f in fs], [g.comp(i) for g in gs])
            for r in range(len(fs)):
                for c in range(len(gs)):
                    v = vals[r][c]
                    if i % 2 != 0:
                        v = fld.neg(v)
                    out[r][c] = fld.add(out[r][c], v)
        return out


def pairing(X, Y, f, g, serre_data=None):
    """Scalar pairing of f: X -> Y against g: Y -> S(X); X in K^b(proj)."""
    sd = serre_data if serre_data is not None else SerreData(X)
    return ComplexPairing(sd, Y).pair(f, g)


def trace(X, f, serre_data=None):
    """Tr_X(f) = (Id_X, f) for f: X -> S(X)."""
    sd = serre_data if serre_data is not None else SerreData(X)
    return ComplexPairing(sd, X).pair(identity_chain_map(X), f)


class SerrePairing:
    """The full pairing matrix on homotopy-class bases; square and invertible."""

    def __init__(self, X, Y, serre_data=None):
        self.X, self.Y = X, Y
        self.sdata = serre_data if serre_data is not None else SerreData(X)
        self.hom_xy = khom(X, Y)
        self.hom_ysx = khom(Y, self.sdata.image)
        cp = ComplexPairing(self.sdata, Y)
        vals = cp.pair_multi(self.hom_xy.class_representatives,
                             self.hom_ysx.class_representatives)
        self.matrix = ExactMatrix(X.algebra.field,
                                  len(self.hom_xy.class_representatives),
                                  len(self.hom_ysx.class_representatives),
                                  vals, coerce=False)

    def is_square(self):
        return self.matrix.rows == self.matrix.cols

    def is_perfect(self):
        return self.is_square() and (self.matrix.rows == 0 or self.matrix.is_invertible())


# ---------------------------------------------------------------------------
# shift compatibility
# ---------------------------------------------------------------------------


def _eta_generating_family(X, rng=None):
    A = X.algebra
    family = []
    lo, hi = X.bottom - 1, X.top + 1
    for j in range(lo, hi + 1):
        for v in A.quiver.vertices:
            family.append(stalk_complex(projective(A, v), j))
            family.append(stalk_complex(simple(A, v), j))
    if rng is not None:
        for _ in range(2):
            family.append(sampling.rand_bounded_complex(A, rng, max_total=3,
                                                        degree_lo=lo, degree_hi=hi))
    return family


def eta(X, seed=0):
    """The isomorphism S(X[1]) -> S(X)[1] with diagonal scalar components.

    The per-degree scalars are solved from the shift-compatibility equation
    of the pairing over a generating family; inconsistency raises
    NoConsistentSign (it would indicate a convention bug)."""
    A = X.algebra
    fld = A.field
    X1 = shift(X, 1)
    sd = SerreData(X)
    sd1 = SerreData(X1)
    SX1 = shift(sd.image, 1)
    source = sd1.image  # S(X[1])
    if X.is_zero():
        return zero_chain_map(source, SX1)
    degrees = sorted(source.terms)
    deg_pos = {j: k for k, j in enumerate(degrees)}
    rng = _random.Random(seed)

    rows, rhs = [], []
    for Y in _eta_generating_family(X, rng):
        Ym1 = shift(Y, -1)
        hs_f = khom(X, Ym1)
        hs_g = khom(Y, source)
        if hs_f.dim == 0 or hs_g.dim == 0:
            continue
        cp1 = ComplexPairing(sd1, Y)
        for f in hs_f.class_representatives:
            f1 = shift_chain_map(f, 1)
            for g in hs_g.class_representatives:
                rhs_val = fld.neg(cp1.pair(f1, g))
                row = [fld.zero()] * len(degrees)
                for j in degrees:
                    # coefficient of c_j: (-1)^{j+1} (f^{j+1}, g^j) at X^{j+1}, Y^j
                    if (j + 1) not in X.terms or j not in Y.terms:
                        continue
                    ctx = PairingContext(X.terms[j + 1], Y.terms[j],
                                         ndata=sd1.ndata[j])
                    val = ctx.pair(f.comp(j + 1), g.comp(j))
                    if j % 2 == 0:
                        val = fld.neg(val)
                    row[deg_pos[j]] = val
                rows.append(row)
                rhs.append(rhs_val)
    if rows:
        mat = ExactMatrix(fld, len(rows), len(degrees), rows, coerce=False)
        sol = mat.solve(rhs)
        if sol is None:
            raise NoConsistentSign("no diagonal scalars satisfy the shift equations")
        # degrees untouched by the family stay free; normalize them to +1
        _, pivots = mat.rref()
        free = [k for k in range(len(degrees)) if k not in pivots]
        coeffs = list(sol)
        for k in free:
            coeffs[k] = fld.one()
    else:
        coeffs = [fld.one()] * len(degrees)
    for c in coeffs:
        if c != fld.one() and c != fld.neg(fld.one()):
            raise NoConsistentSign(f"component {c} is not a sign")
    comps = {}
    for j in degrees:
        c = coeffs[deg_pos[j]]
        comps[j] = identity_chain_map(source).comp(j).scale(c)
    try:
        return ChainMap(source, SX1, comps, check=True)
    except ShapeMismatch as exc:
        raise NoConsistentSign(f"sign pattern is not a chain map: {exc}") from exc


# ---------------------------------------------------------------------------
# membership in the domain and range
# ---------------------------------------------------------------------------


class MembershipVerdict:
    def __init__(self, obj, side, member, witness=None, cap=None):
        self.object = obj
        self.side = side
        self.member = member
        self.witness = witness
        self.cap = cap

    def __repr__(self):
        if self.member:
            return f"Member({self.side}, witness={self.witness!r})"
        return f"NonMemberAtCap({self.side}, cap={self.cap})"


def in_domain(X, cap):
    """Domain membership, decided by a terminating minimal projective resolution."""
    report = proj_resolution(X, cap)
    if report.terminated:
        return MembershipVerdict(X, "domain", True, witness=report.resolution)
    return MembershipVerdict(X, "domain", False, cap=cap)


def in_range(X, cap):
    """Range membership, decided by a terminating injective coresolution."""
    report = inj_coresolution(X, cap)
    if report.terminated:
        return MembershipVerdict(X, "range", True, witness=report.resolution)
    return MembershipVerdict(X, "range", False, cap=cap)


# ---------------------------------------------------------------------------
# triangle functor verification
# ---------------------------------------------------------------------------


def check_triangle_functor(X, Y, u, seed=0):
    """Verify that the Serre image of the cone-model triangle on u: X -> Y is
    again distinguished: find the comparison iso and check both squares up to
    homotopy.  Returns a report dict."""
    Z, v, w = cone(u)
    sdX, sdY = SerreData(X), SerreData(Y)
    sdZ = SerreData(Z)
    Su = serre_of_map(u, sdX, sdY)
    Sv = serre_of_map(v, sdY, sdZ)
    Sw = serre_of_map(w, sdZ, SerreData(shift(X, 1)))
    eta_x = eta(X, seed=seed)
    # eta target: S(X)[1]; Sw target: S(X[1]) == eta source by construction
    eta_sw = eta_x.compose(Sw)
    W, alpha, beta = cone(Su)

    hs_delta = khom(W, sdZ.image)
    hs_sq1 = khom(sdY.image, sdZ.image)
    hs_sq2 = khom(W, shift(sdX.image, 1))
    fld = X.algebra.field
    target = hs_sq1.project(Sv) + hs_sq2.project(beta)
    cols = []
    for d in hs_delta.class_representatives:
        cols.append(hs_sq1.project(d.compose(alpha)) + hs_sq2.project(eta_sw.compose(d)))
    mat = ExactMatrix.from_columns(fld, len(target), cols)
    sol = mat.solve(target)
    report = {
        "delta_found": sol is not None,
        "squares_commute": False,
        "delta_iso": False,
        "cone_iso": False,
        "ok": False,
    }
    if sol is None:
        return report
    delta = hs_delta.from_class_coords(sol)
    sq1 = hs_sq1.is_null_homotopic(delta.compose(alpha) - Sv)
    sq2 = hs_sq2.is_null_homotopic(eta_sw.compose(delta) - beta)
    report["squares_commute"] = sq1 and sq2
    from .complexes import _left_inverse_class_exists, _right_inverse_class_exists

    hs_back = khom(sdZ.image, W)
    hs_ww = khom(W, W)
    hs_ss = khom(sdZ.image, sdZ.image)
    report["delta_iso"] = (
        _left_inverse_class_exists(delta, hs_back, hs_ww)
        and _right_inverse_class_exists(delta, hs_back, hs_ss)
    )
    report["cone_iso"] = iso_in_K(W, sdZ.image, seed=seed)
    report["ok"] = all((report["delta_found"], report["squares_commute"],
                        report["delta_iso"], report["cone_iso"]))
    return report


# ---------------------------------------------------------------------------
# identity suites
# ---------------------------------------------------------------------------


def _scene(A, rng):
    """Random composable data shared by all identity checks in one trial."""
    X = sampling.rand_proj_complex(A, rng, max_terms=2, max_term_dim=3)
    Xp = sampling.rand_proj_complex(A, rng, max_terms=2, max_term_dim=3)
    Y = sampling.rand_bounded_complex(A, rng, max_total=3)
    Yp = sampling.rand_bounded_complex(A, rng, max_total=3)
    return X, Xp, Y, Yp


def check_identities(seed, trials, algebras=None, identities=None):
    """Randomized exact verification of the pairing identities.

    Returns a report with per-identity trial and violation counts; any
    violation carries the offending scalars verbatim."""
    from .fixtures import a2, dual_numbers

    if trials < 1:
        raise ShapeMismatch("trials must be >= 1")
    if algebras is None:
        algebras = {"a2": a2(), "dual_numbers": dual_numbers()}
    wanted = identities or list(IDENTITY_TAGS)
    report = {
        name: {"tag": IDENTITY_TAGS[name], "trials": 0, "violations": []}
        for name in wanted
    }
    for alg_name, A in algebras.items():
        rng = _random.Random(seed)
        target = {name: report[name]["trials"] + trials for name in wanted}
        attempts = 0
        while attempts < 30 * trials:
            wanted_now = [n for n in wanted if report[n]["trials"] < target[n]]
            if not wanted_now:
                break
            X, Xp, Y, Yp = _scene(A, rng)
            sdX, sdXp = SerreData(X), SerreData(Xp)
            _run_identity_trial(report, wanted_now, alg_name, attempts, A, rng,
                                X, Xp, Y, Yp, sdX, sdXp)
            attempts += 1
    report["ok"] = all(not report[name]["violations"] for name in wanted)
    return report


def _record(report, name, alg_name, trial, lhs, rhs):
    entry = report[name]
    entry["trials"] += 1
    if lhs != rhs:
        entry["violations"].append({
            "algebra": alg_name, "trial": trial,
            "lhs": str(lhs), "rhs": str(rhs),
        })


def _run_identity_trial(report, wanted, alg_name, trial, A, rng,
                        X, Xp, Y, Yp, sdX, sdXp):
    theta = sampling.rand_chain_combo(khom(Xp, X), rng)
    f_xy = sampling.rand_chain_combo(khom(X, Y), rng)

    if "left-naturality" in wanted and theta is not None and f_xy is not None:
        g = sampling.rand_chain_combo(khom(Y, sdXp.image), rng)
        if g is not None:
            lhs = pairing(Xp, Y, f_xy.compose(theta), g, serre_data=sdXp)
            s_theta = serre_of_map(theta, sdXp, sdX)
            rhs = pairing(X, Y, f_xy, s_theta.compose(g), serre_data=sdX)
            _record(report, "left-naturality", alg_name, trial, lhs, rhs)

    if "right-naturality" in wanted:
        gamma = sampling.rand_chain_combo(khom(Yp, Y), rng)
        f_xyp = sampling.rand_chain_combo(khom(X, Yp), rng)
        g_y = sampling.rand_chain_combo(khom(Y, sdX.image), rng)
        if gamma is not None and f_xyp is not None and g_y is not None:
            lhs = pairing(X, Yp, f_xyp, g_y.compose(gamma), serre_data=sdX)
            rhs = pairing(X, Y, gamma.compose(f_xyp), g_y, serre_data=sdX)
            _record(report, "right-naturality", alg_name, trial, lhs, rhs)

    f_xxp = sampling.rand_chain_combo(khom(X, Xp), rng)
    g_back = sampling.rand_chain_combo(khom(Xp, sdX.image), rng)
    if f_xxp is not None and g_back is not None:
        if "swap" in wanted:
            lhs = pairing(X, Xp, f_xxp, g_back, serre_data=sdX)
            s_f = serre_of_map(f_xxp, sdX, sdXp)
            rhs = pairing(Xp, sdX.image, g_back, s_f, serre_data=sdXp)
            _record(report, "swap", alg_name, trial, lhs, rhs)
        if "trace-swap" in wanted:
            lhs = trace(X, g_back.compose(f_xxp), serre_data=sdX)
            s_f = serre_of_map(f_xxp, sdX, sdXp)
            rhs = trace(Xp, s_f.compose(g_back), serre_data=sdXp)
            _record(report, "trace-swap", alg_name, trial, lhs, rhs)

    if "shift-pairing" in wanted or "shift-trace" in wanted:
        X1 = shift(X, 1)
        sdX1 = SerreData(X1)
        eta_x = eta(X, seed=rng.randint(0, 10**6))
        if "shift-pairing" in wanted:
            Ym1 = shift(Y, -1)
            f_s = sampling.rand_chain_combo(khom(X, Ym1), rng)
            g_s = sampling.rand_chain_combo(khom(Y, sdX1.image), rng)
            if f_s is not None and g_s is not None:
                etag = eta_x.compose(g_s)
                lhs = pairing(X, Ym1, f_s, shift_chain_map(etag, -1), serre_data=sdX)
                rhs = X.algebra.field.neg(
                    pairing(X1, Y, shift_chain_map(f_s, 1), g_s, serre_data=sdX1))
                _record(report, "shift-pairing", alg_name, trial, lhs, rhs)
        if "shift-trace" in wanted:
            f_t = sampling.rand_chain_combo(khom(X1, sdX1.image), rng)
            if f_t is not None:
                lhs = trace(X, shift_chain_map(eta_x.compose(f_t), -1), serre_data=sdX)
                rhs = X.algebra.field.neg(trace(X1, f_t, serre_data=sdX1))
                _record(report, "shift-trace", alg_name, trial, lhs, rhs)


# ---------------------------------------------------------------------------
# condition (C) witnesses
# ---------------------------------------------------------------------------


def _induced_iso_by_postcompose(hs_from, hs_to, s):
    """Matrix of khom(X, Z') -> khom(X, Z), class f -> class(s∘f)."""
    field = s.source.algebra.field
    cols = [hs_to.project(s.compose(f)) for f in hs_from.class_representatives]
    return ExactMatrix.from_columns(field, hs_to.dim, cols)


def _induced_iso_by_precompose(hs_from, hs_to, s):
    """Matrix of khom(Z_deep, X') -> khom(Z', X'), class g -> class(g∘s)."""
    field = s.source.algebra.field
    cols = [hs_to.project(g.compose(s)) for g in hs_from.class_representatives]
    return ExactMatrix.from_columns(field, hs_to.dim, cols)


def condition_c_witness(X, Xp, Z, window, depth=None):
    """Produce and verify the approximation s: Z' -> Z used for condition (C).

    window is the (lo, hi) degree window containing X and X'; the truncation
    depth defaults to max(|lo|, |hi|) + 3.  Verifies that s induces
    isomorphisms (X, Z') -> (X, Z) and (Z, X') -> (Z', X')."""
    from .complexes import brutal_truncate

    lo, hi = window
    if depth is None:
        depth = max(abs(lo), abs(hi)) + 3
    stable_depth = depth + max(abs(lo), abs(hi)) + 2
    report = proj_resolution(Z, cap=stable_depth + abs(Z.bottom) + 2)
    P = report.resolution
    if report.terminated and P.bottom >= -depth:
        Zp, s = P, report.to_target
    else:
        Zp, s = brutal_truncate(P, depth, to_target=report.to_target)

    hs_xzp = khom(X, Zp)
    hs_xz = khom(X, Z)
    m1 = _induced_iso_by_postcompose(hs_xzp, hs_xz, s)
    first_ok = m1.rows == m1.cols and (m1.rows == 0 or m1.is_invertible())

    # Hom out of Z is computed through a deep enough truncation of the
    # resolution; stability under one extra degree certifies the window
    deep, _ = brutal_truncate(P, stable_depth, to_target=report.to_target)
    deeper, _ = brutal_truncate(P, min(stable_depth + 1, abs(P.bottom)),
                                to_target=report.to_target)
    hs_deep = khom(deep, Xp)
    hs_deeper = khom(deeper, Xp)
    stable = hs_deep.dim == hs_deeper.dim
    incl = ChainMap(Zp, deep, {i: identity_chain_map(Zp).comp(i) for i in Zp.terms},
                    check=True)
    hs_zpxp = khom(Zp, Xp)
    m2 = _induced_iso_by_precompose(hs_deep, hs_zpxp, incl)
    second_ok = stable and m2.rows == m2.cols and (m2.rows == 0 or m2.is_invertible())
    return Zp, s, {
        "into_iso": first_ok,
        "out_of_iso": second_ok,
        "stable": stable,
        "both_isos_verified": first_ok and second_ok,
    }
