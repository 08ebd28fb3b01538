"""Seeded random modules, complexes and chain maps for the identity suites.

All randomness flows through an explicit random.Random instance so that
identical seeds reproduce identical objects byte for byte.
"""

from .exactla import ExactMatrix
from .algebra import (
    RepMap,
    direct_sum,
    hom_basis,
    injective,
    projective,
    radical_subrep,
    simple,
    zero_representation,
)
from .complexes import (
    BoundedComplex,
    ChainMap,
    cone,
    khom,
    shift,
    stalk_complex,
)


def rand_scalar(field, rng, lo=-3, hi=3):
    return field.coerce(rng.randint(lo, hi))


def rand_invertible(field, rng, n, lo=-2, hi=2):
    """Unit lower times unit upper triangular: invertible by construction."""
    one, zero = field.one(), field.zero()
    low = [[one if i == j else (rand_scalar(field, rng, lo, hi) if i > j else zero)
            for j in range(n)] for i in range(n)]
    up = [[one if i == j else (rand_scalar(field, rng, lo, hi) if i < j else zero)
           for j in range(n)] for i in range(n)]
    return ExactMatrix(field, n, n, low, coerce=False) @ ExactMatrix(field, n, n, up, coerce=False)


def rand_base_change(M, rng):
    """An isomorphic copy of M with conjugated, denser matrices."""
    A = M.algebra
    f = A.field
    ts = {v: rand_invertible(f, rng, M.dims[v]) for v in A.quiver.vertices}
    tinvs = {v: ts[v].inverse() for v in A.quiver.vertices}
    action = {}
    for name, src, tgt in A.quiver.arrows:
        action[name] = ts[tgt] @ M.action[name] @ tinvs[src]
    from .algebra import Representation

    return Representation(A, dict(M.dims), action, check=False)


def module_catalog(A):
    out = []
    for v in A.quiver.vertices:
        out.append(projective(A, v))
        out.append(injective(A, v))
        out.append(simple(A, v))
    return out


def rand_module(A, rng, max_total=4, base_change=True):
    """Random direct sum from the standard catalog, then a random base change."""
    catalog = module_catalog(A)
    pieces = []
    total = 0
    for _ in range(4):
        pick = catalog[rng.randrange(len(catalog))]
        if total + pick.total_dim > max_total:
            continue
        pieces.append(pick)
        total += pick.total_dim
        if total >= max_total or rng.random() < 0.35:
            break
    if not pieces:
        pieces = [simple(A, A.quiver.vertices[rng.randrange(len(A.quiver.vertices))])]
    M = direct_sum(pieces)[0] if len(pieces) > 1 else pieces[0]
    if base_change and M.total_dim > 0:
        M = rand_base_change(M, rng)
    return M


def rad_hom_basis(P, Q):
    """Module maps P -> Q whose image lies inside rad Q."""
    from .exactla import QuotientSpace

    A = P.algebra
    f = A.field
    basis = hom_basis(P, Q)
    if not basis:
        return []
    _, incl = radical_subrep(Q)
    # a combination lands in rad Q iff its value columns vanish modulo rad Q
    rows = []
    for v in A.quiver.vertices:
        quo = QuotientSpace(f, Q.dims[v], incl.mats[v])
        projected = [[quo.project(h.mats[v].column(c)) for c in range(P.dims[v])]
                     for h in basis]
        for r_idx in range(quo.dim):
            for c in range(P.dims[v]):
                rows.append([projected[h_idx][c][r_idx] for h_idx in range(len(basis))])
    if not rows:
        return basis
    ker = ExactMatrix(f, len(rows), len(basis), rows, coerce=False).kernel_basis()
    out = []
    for j in range(ker.cols):
        coeffs = ker.column(j)
        acc = None
        for cfs, h in zip(coeffs, basis):
            if cfs == f.zero():
                continue
            term = h.scale(cfs)
            acc = term if acc is None else acc + term
        if acc is not None:
            out.append(acc)
    return out


def rand_projective_sum(A, rng, max_total=4):
    pieces = []
    total = 0
    verts = list(A.quiver.vertices)
    for _ in range(4):
        v = verts[rng.randrange(len(verts))]
        P = projective(A, v)
        if total + P.total_dim > max_total:
            continue
        pieces.append(P)
        total += P.total_dim
        if rng.random() < 0.4:
            break
    if not pieces:
        pieces = [projective(A, verts[rng.randrange(len(verts))])]
    if len(pieces) == 1:
        return pieces[0]
    return direct_sum(pieces)[0]


def rand_proj_complex(A, rng, max_terms=3, max_term_dim=4, degree_lo=-1, degree_hi=1):
    """Random bounded complex of projectives with radical differentials.

    Retries the differential choice until d∘d = 0 holds exactly (automatic for
    radical-square-zero fixtures)."""
    n_terms = rng.randint(1, max_terms)
    start = rng.randint(degree_lo, degree_hi - n_terms + 1) if degree_hi - n_terms + 1 >= degree_lo else degree_lo
    terms = {start + k: rand_projective_sum(A, rng, max_total=max_term_dim)
             for k in range(n_terms)}
    for attempt in range(6):
        diffs = {}
        ok = True
        for i in sorted(terms):
            if (i + 1) not in terms:
                continue
            cands = rad_hom_basis(terms[i], terms[i + 1])
            if not cands:
                continue
            acc = None
            for h in cands:
                c = rand_scalar(A.field, rng, -2, 2)
                if c == A.field.zero():
                    continue
                t = h.scale(c)
                acc = t if acc is None else acc + t
            if acc is not None and not acc.is_zero():
                diffs[i] = acc
        for i in diffs:
            if (i + 1) in diffs and not diffs[i + 1].compose(diffs[i]).is_zero():
                ok = False
                break
        if ok:
            return BoundedComplex(A, terms, diffs, check=True)
    return BoundedComplex(A, terms, {}, check=True)


def rand_bounded_complex(A, rng, max_total=4, degree_lo=-1, degree_hi=1, cone_steps=1):
    """Random bounded complex through iterated cones of random chain maps."""
    X = stalk_complex(rand_module(A, rng, max_total=max_total),
                      rng.randint(degree_lo, degree_hi))
    for _ in range(cone_steps):
        if rng.random() < 0.4:
            continue
        Y = stalk_complex(rand_module(A, rng, max_total=max(2, max_total - 1)),
                          rng.randint(degree_lo, degree_hi))
        hs = khom(Y, X)
        f = rand_chain_combo(hs, rng, strict=True)
        if f is None:
            continue
        X, _, _ = cone(f)
        if X.is_zero():
            X = stalk_complex(rand_module(A, rng, max_total=max_total), 0)
    return X


def rand_chain_combo(hs, rng, lo=-3, hi=3, strict=False, allow_zero=True):
    """Random combination of chain-map basis (strict) or class representatives."""
    field = hs.X.algebra.field
    basis = hs.chainmap_basis if strict else hs.class_representatives
    if not basis:
        return None
    for _ in range(4):
        acc = None
        for b in basis:
            c = rand_scalar(field, rng, lo, hi)
            if c == field.zero():
                continue
            t = b.scale(c)
            acc = t if acc is None else acc + t
        if acc is not None and not acc.is_zero():
            return acc
        if allow_zero:
            break
    return acc if acc is not None else None
