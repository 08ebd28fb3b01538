"""Finite-dimensional path algebras with admissible relations and their modules.

A module is stored as a quiver representation: one vector space per vertex
(identified with k^d) and one exact matrix per arrow.  Paths compose
right-to-left, like functions: for an arrow a: 1 -> 2 we have a = e2*a*e1,
and a path written as the arrow sequence (a, b) means "apply a, then b".

The module also houses the abstract algebra-presentation machinery
(multiplication tables, Dickson radical, Wedderburn splitting, idempotent
lifting) shared by module and complex decompositions.
"""

from fractions import Fraction

import sympy

from .exactla import ExactMatrix, FieldSpec, QuotientSpace


class UnknownVertex(Exception):
    pass


class NonAdmissibleRelations(Exception):
    pass


class InfiniteDimensional(Exception):
    pass


class AlgebraMismatch(Exception):
    pass


class ShapeMismatch(Exception):
    pass


class NotProjective(Exception):
    pass


class UnsupportedField(Exception):
    pass


class NonSplitResidue(Exception):
    pass


# ---------------------------------------------------------------------------
# quivers and paths
# ---------------------------------------------------------------------------


class Quiver:
    """Finite quiver: vertex labels plus named arrows (name, source, target)."""

    def __init__(self, vertices, arrows):
        if len(set(vertices)) != len(vertices):
            raise UnknownVertex("duplicate vertex labels")
        names = [a[0] for a in arrows]
        if len(set(names)) != len(names):
            raise UnknownVertex("duplicate arrow names")
        vset = set(vertices)
        for name, src, tgt in arrows:
            if src not in vset or tgt not in vset:
                raise UnknownVertex(f"arrow {name}: {src} -> {tgt} has undeclared endpoint")
        self.vertices = list(vertices)
        self.arrows = [(name, src, tgt) for name, src, tgt in arrows]
        self.arrow_source = {name: src for name, src, tgt in self.arrows}
        self.arrow_target = {name: tgt for name, src, tgt in self.arrows}

    def arrows_from(self, v):
        return [a for a in self.arrows if a[1] == v]

    def arrows_into(self, v):
        return [a for a in self.arrows if a[2] == v]

    def __repr__(self):
        arrows = ", ".join(f"{n}:{s}->{t}" for n, s, t in self.arrows)
        return f"Quiver([{', '.join(map(str, self.vertices))}], [{arrows}])"


class Path:
    """A path (source vertex, tuple of arrow names in application order)."""

    __slots__ = ("source", "arrows", "target")

    def __init__(self, quiver, source, arrows):
        self.source = source
        self.arrows = tuple(arrows)
        v = source
        for a in self.arrows:
            if quiver.arrow_source[a] != v:
                raise NonAdmissibleRelations(f"arrows do not compose: {arrows}")
            v = quiver.arrow_target[a]
        self.target = v

    def __len__(self):
        return len(self.arrows)

    def key(self):
        return (self.source, self.arrows)

    def __repr__(self):
        if not self.arrows:
            return f"e_{self.source}"
        return "*".join(reversed(self.arrows))


# ---------------------------------------------------------------------------
# path algebras
# ---------------------------------------------------------------------------


class PathAlgebra:
    """kQ/I for an admissible ideal I, with an explicit path-class basis.

    Built through `build_path_algebra`; carries the class basis, structure
    constants and left-multiplication matrices used by every module
    construction.
    """

    def __init__(self, quiver, field, relations, length_cap, basis_paths, reduction):
        self.quiver = quiver
        self.field = field
        self.relations = relations
        self.length_cap = length_cap
        self.basis_paths = basis_paths
        self.dim = len(basis_paths)
        self.class_index = {p.key(): i for i, p in enumerate(basis_paths)}
        self._reduction = reduction  # path key -> dense class vector
        self.class_source = [p.source for p in basis_paths]
        self.class_target = [p.target for p in basis_paths]
        self.vertex_idempotents = {
            p.source: i for i, p in enumerate(basis_paths) if len(p.arrows) == 0
        }
        self._left_mult = self._build_left_mult()
        self.mult_table = self._build_mult_table()
        self._check_associative()
        self._opposite = None
        self._projectives = {}
        self._injectives = {}

    # -- construction internals ------------------------------------------------

    def _build_left_mult(self):
        zero = self.field.zero()
        mats = {}
        for name, src, tgt in self.quiver.arrows:
            cols = []
            for i, p in enumerate(self.basis_paths):
                if p.target != src:
                    cols.append([zero] * self.dim)
                    continue
                key = (p.source, p.arrows + (name,))
                cols.append(self._reduce_key(key))
            mats[name] = ExactMatrix.from_columns(self.field, self.dim, cols)
        return mats

    def _reduce_key(self, key):
        vec = self._reduction.get(key)
        if vec is None:
            # paths beyond the reduction window reduce to zero only if the
            # filtration certified finite dimension; reaching here is a bug
            raise InfiniteDimensional(f"path {key} escapes the reduction window")
        return list(vec)

    def mult_class_vectors(self, u, v):
        """Product of two elements given as class-coordinate vectors (u * v)."""
        f = self.field
        zero = f.zero()
        out = [zero] * self.dim
        for i, ci in enumerate(u):
            if ci == zero:
                continue
            row = self.mult_table[i]
            for j, cj in enumerate(v):
                if cj == zero:
                    continue
                prod = row[j]
                c = f.mul(ci, cj)
                for k, pk in enumerate(prod):
                    if pk != zero:
                        out[k] = f.add(out[k], f.mul(c, pk))
        return out

    def _build_mult_table(self):
        """table[i][j] = class vector of basis_i * basis_j (apply j first)."""
        f = self.field
        zero = f.zero()
        table = []
        for i, pi in enumerate(self.basis_paths):
            row = []
            for j, pj in enumerate(self.basis_paths):
                if pj.target != pi.source:
                    row.append([zero] * self.dim)
                    continue
                vec = [zero] * self.dim
                vec[j] = f.one()
                for a in pi.arrows:
                    la = self._left_mult[a]
                    vec = la.apply(vec)
                row.append(vec)
            table.append(row)
        return table

    def _check_associative(self):
        if self.dim > 16:
            return
        for i in range(self.dim):
            for j in range(self.dim):
                ij = self.mult_table[i][j]
                for k in range(self.dim):
                    jk = self.mult_table[j][k]
                    left = self.mult_class_vectors(ij, [self.field.one() if t == k else self.field.zero() for t in range(self.dim)])
                    right = self.mult_class_vectors([self.field.one() if t == i else self.field.zero() for t in range(self.dim)], jk)
                    if left != right:
                        raise NonAdmissibleRelations("multiplication table is not associative")

    # -- public surface ---------------------------------------------------------

    def classes_between(self, src, tgt):
        """Indices of basis classes from src to tgt, in basis order."""
        return [
            i
            for i in range(self.dim)
            if self.class_source[i] == src and self.class_target[i] == tgt
        ]

    def classes_from(self, src):
        return [i for i in range(self.dim) if self.class_source[i] == src]

    def classes_into(self, tgt):
        return [i for i in range(self.dim) if self.class_target[i] == tgt]

    def check_vertex(self, v):
        if v not in self.quiver.vertices:
            raise UnknownVertex(f"unknown vertex {v!r}")

    def opposite(self):
        """The opposite path algebra (arrows reversed), cached and involutive."""
        if self._opposite is None:
            q = self.quiver
            op_quiver = Quiver(list(q.vertices), [(n, t, s) for n, s, t in q.arrows])
            op_relations = []
            for rel in self.relations:
                op_rel = []
                for coeff, path in rel:
                    arrows = tuple(reversed(path.arrows))
                    op_rel.append((coeff, Path(op_quiver, path.target, arrows)))
                op_relations.append(op_rel)
            op = build_path_algebra(
                op_quiver,
                [[(c, (p.source, list(p.arrows))) for c, p in rel] for rel in op_relations],
                self.field,
                self.length_cap,
            )
            op._opposite = self
            self._opposite = op
        return self._opposite

    def __repr__(self):
        return f"PathAlgebra(dim={self.dim}, field={self.field!r}, quiver={self.quiver!r})"


def _path_sort_key(p):
    return (len(p.arrows), str(p.source), p.arrows)


def build_path_algebra(quiver, relations, field, length_cap):
    """Construct kQ/<relations> with a certified finite path-class basis.

    relations: list of k-linear combinations, each given as a list of
    (coeff, (source_vertex, [arrow names in application order])) pairs.
    Raises NonAdmissibleRelations for malformed relations and
    InfiniteDimensional when path classes survive past length_cap.
    """
    if length_cap < 1:
        raise InfiniteDimensional("length_cap must be >= 1")

    parsed = []
    for rel in relations:
        if not rel:
            raise NonAdmissibleRelations("empty relation")
        terms = []
        for coeff, path_spec in rel:
            src, arrows = path_spec
            p = Path(quiver, src, arrows)
            if len(p) < 2:
                raise NonAdmissibleRelations(f"relation path {p!r} has length < 2")
            terms.append((field.coerce(coeff), p))
        s0, t0 = terms[0][1].source, terms[0][1].target
        for _, p in terms:
            if p.source != s0 or p.target != t0:
                raise NonAdmissibleRelations("relation mixes non-parallel paths")
        parsed.append(terms)

    homogeneous = all(
        len({len(p) for _, p in rel}) == 1 for rel in parsed
    )
    window = length_cap + 1 if homogeneous else length_cap + 3

    basis, reduction, max_alive = _filtered_quotient(quiver, field, parsed, window)
    if max_alive > length_cap:
        raise InfiniteDimensional(
            f"path classes of length {max_alive} survive past the cap {length_cap}"
        )
    return PathAlgebra(quiver, field, parsed, length_cap, basis, reduction)


def _monomial_relation_paths(parsed):
    return {rel[0][1].key() for rel in parsed if len(rel) == 1}


def _filtered_quotient(quiver, field, parsed, window):
    """Path classes of kQ/I within the length filtration F_window."""
    monomials = _monomial_relation_paths(parsed)

    def contains_monomial(path):
        for m_src, m_arrows in monomials:
            k = len(m_arrows)
            for i in range(len(path.arrows) - k + 1):
                if path.arrows[i : i + k] == m_arrows:
                    return True
        return False

    paths = [Path(quiver, v, ()) for v in quiver.vertices]
    frontier = list(paths)
    for _ in range(window):
        new_frontier = []
        for p in frontier:
            for name, src, tgt in quiver.arrows_from(p.target):
                q = Path(quiver, p.source, p.arrows + (name,))
                if contains_monomial(q):
                    continue
                new_frontier.append(q)
        paths.extend(new_frontier)
        frontier = new_frontier
        if len(paths) > 200000:
            raise InfiniteDimensional("path enumeration exploded; tighten relations or cap")

    # longest paths first so elimination rewrites long paths in terms of short ones
    paths.sort(key=lambda p: (-len(p.arrows), str(p.source), p.arrows))
    index = {p.key(): i for i, p in enumerate(paths)}
    by_key = {p.key(): p for p in paths}

    ideal_rows = []
    zero = field.zero()
    non_monomial = [rel for rel in parsed if len(rel) > 1]
    for rel in non_monomial:
        max_len = max(len(p) for _, p in rel)
        src, tgt = rel[0][1].source, rel[0][1].target
        lefts = [p for p in paths if p.source == tgt]
        rights = [p for p in paths if p.target == src]
        for u in lefts:
            for v in rights:
                if len(u) + max_len + len(v) > window:
                    continue
                row = [zero] * len(paths)
                alive = False
                for coeff, p in rel:
                    key = (v.source, v.arrows + p.arrows + u.arrows)
                    if contains_monomial(by_key.get(key) or Path(quiver, v.source, v.arrows + p.arrows + u.arrows)):
                        continue
                    j = index.get(key)
                    if j is None:
                        continue
                    row[j] = field.add(row[j], coeff)
                    alive = True
                if alive and any(x != zero for x in row):
                    ideal_rows.append(row)

    if ideal_rows:
        mat = ExactMatrix(field, len(ideal_rows), len(paths), ideal_rows, coerce=False)
        reduced, pivots = mat.rref()
        pivot_rows = {p: reduced.row(r) for r, p in enumerate(pivots)}
    else:
        pivots, pivot_rows = [], {}

    pivot_set = set(pivots)
    survivors = [paths[j] for j in range(len(paths)) if j not in pivot_set]
    survivors.sort(key=_path_sort_key)
    class_pos = {p.key(): i for i, p in enumerate(survivors)}
    max_alive = max((len(p) for p in survivors), default=0)

    one = field.one()
    reduction = {}
    for j, p in enumerate(paths):
        vec = [zero] * len(survivors)
        if j not in pivot_set:
            vec[class_pos[p.key()]] = one
        else:
            row = pivot_rows[j]
            for jj, a in enumerate(row):
                if jj == j or a == zero:
                    continue
                vec[class_pos[paths[jj].key()]] = field.neg(a)
        reduction[p.key()] = vec
    # killed monomial paths reduce to zero
    return survivors, _ReductionTable(reduction, len(survivors), field), max_alive


class _ReductionTable(dict):
    def __init__(self, table, dim, field):
        super().__init__(table)
        self._dim = dim
        self._zero = field.zero()

    def get(self, key, default=None):
        if key in self:
            return super().__getitem__(key)
        # any enumerated-but-pruned path is in the monomial ideal: reduce to 0
        return [self._zero] * self._dim


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------


class Representation:
    """Finite-dimensional left module: vertex dimensions plus arrow matrices."""

    def __init__(self, algebra, dims, action, check=True):
        self.algebra = algebra
        self.dims = {v: int(dims.get(v, 0)) for v in algebra.quiver.vertices}
        self.action = {}
        for name, src, tgt in algebra.quiver.arrows:
            m = action.get(name)
            if m is None:
                m = ExactMatrix.zeros(algebra.field, self.dims[tgt], self.dims[src])
            if m.rows != self.dims[tgt] or m.cols != self.dims[src]:
                raise ShapeMismatch(
                    f"arrow {name}: matrix is {m.rows}x{m.cols}, expected {self.dims[tgt]}x{self.dims[src]}"
                )
            self.action[name] = m
        if check:
            self._check_relations()

    def _check_relations(self):
        zero = self.algebra.field.zero()
        for rel in self.algebra.relations:
            src, tgt = rel[0][1].source, rel[0][1].target
            acc = ExactMatrix.zeros(self.algebra.field, self.dims[tgt], self.dims[src])
            for coeff, path in rel:
                acc = acc + self.path_action(path).scale(coeff)
            if not acc.is_zero():
                raise ShapeMismatch(f"relation {rel} does not act by zero")

    def path_action(self, path):
        m = ExactMatrix.identity(self.algebra.field, self.dims[path.source])
        for a in path.arrows:
            m = self.action[a] @ m
        return m

    def class_action(self, class_idx):
        return self.path_action(self.algebra.basis_paths[class_idx])

    @property
    def total_dim(self):
        return sum(self.dims.values())

    def is_zero(self):
        return self.total_dim == 0

    def dim_vector(self):
        return tuple(self.dims[v] for v in self.algebra.quiver.vertices)

    def __repr__(self):
        return f"Rep{self.dim_vector()}"


def zero_representation(algebra):
    return Representation(algebra, {}, {}, check=False)


def simple(algebra, i):
    algebra.check_vertex(i)
    return Representation(algebra, {i: 1}, {}, check=False)


def projective(algebra, i):
    """P_i = A e_i: basis at vertex v is the set of path classes i -> v."""
    algebra.check_vertex(i)
    if i in algebra._projectives:
        return algebra._projectives[i]
    rep = _classes_module(algebra, algebra.classes_from(i))
    algebra._projectives[i] = rep
    return rep


def regular_representation(algebra):
    """A as a left module over itself."""
    return _classes_module(algebra, list(range(algebra.dim)))


def _classes_module(algebra, class_indices):
    """Left submodule of A spanned by the given path classes (must be
    closed under left multiplication, e.g. all classes with fixed source)."""
    f = algebra.field
    by_vertex = {v: [c for c in class_indices if algebra.class_target[c] == v]
                 for v in algebra.quiver.vertices}
    dims = {v: len(cs) for v, cs in by_vertex.items()}
    action = {}
    for name, src, tgt in algebra.quiver.arrows:
        la = algebra._left_mult[name]
        cols = []
        for c in by_vertex[src]:
            full = la.column(c)
            cols.append([full[d] for d in by_vertex[tgt]])
        action[name] = ExactMatrix.from_columns(f, dims[tgt], cols)
    return Representation(algebra, dims, action, check=False)


def injective(algebra, i):
    """I_i = D(e_i A): basis at vertex v is dual to the path classes v -> i."""
    algebra.check_vertex(i)
    if i in algebra._injectives:
        return algebra._injectives[i]
    f = algebra.field
    by_vertex = {v: algebra.classes_between(v, i) for v in algebra.quiver.vertices}
    dims = {v: len(cs) for v, cs in by_vertex.items()}
    action = {}
    for name, src, tgt in algebra.quiver.arrows:
        # on dual bases the arrow acts by evaluation against right multiplication:
        # row c (class c: tgt -> i), column d (class d: src -> i) carries the
        # coefficient of d in the reduction of c composed after the arrow
        rows = []
        for c in by_vertex[tgt]:
            p = algebra.basis_paths[c]
            vec = algebra._reduction.get((src, (name,) + p.arrows))
            rows.append([vec[d] for d in by_vertex[src]])
        action[name] = ExactMatrix(f, len(by_vertex[tgt]), len(by_vertex[src]),
                                   rows, coerce=False)
    return Representation(algebra, dims, action, check=True)


def dualize(rep):
    """Vector-space dual: a left module over the opposite algebra."""
    op = rep.algebra.opposite()
    action = {name: rep.action[name].transpose() for name, _, _ in rep.algebra.quiver.arrows}
    return Representation(op, dict(rep.dims), action, check=False)


def direct_sum(reps):
    """Direct sum with canonical inclusion and projection maps."""
    if not reps:
        raise ShapeMismatch("empty direct sum needs an algebra; use zero_representation")
    algebra = reps[0].algebra
    f = algebra.field
    for r in reps:
        if r.algebra is not algebra:
            raise AlgebraMismatch("direct sum across different algebras")
    dims = {v: sum(r.dims[v] for r in reps) for v in algebra.quiver.vertices}
    action = {}
    for name, src, tgt in algebra.quiver.arrows:
        data = ExactMatrix.zeros(f, dims[tgt], dims[src]).to_lists()
        ro, co = 0, 0
        for r in reps:
            block = r.action[name]
            for i in range(block.rows):
                row = data[ro + i]
                for j in range(block.cols):
                    row[co + j] = block.data[i][j]
            ro += r.dims[tgt]
            co += r.dims[src]
        action[name] = ExactMatrix(f, dims[tgt], dims[src], data, coerce=False)
    total = Representation(algebra, dims, action, check=False)
    incls, projs = [], []
    offsets = {v: 0 for v in algebra.quiver.vertices}
    for r in reps:
        inc_mats, proj_mats = {}, {}
        for v in algebra.quiver.vertices:
            o, d, D = offsets[v], r.dims[v], dims[v]
            inc = ExactMatrix.zeros(f, D, d).to_lists()
            for k in range(d):
                inc[o + k][k] = f.one()
            inc_mats[v] = ExactMatrix(f, D, d, inc, coerce=False)
            proj_mats[v] = inc_mats[v].transpose()
        incls.append(RepMap(r, total, inc_mats, check=False))
        projs.append(RepMap(total, r, proj_mats, check=False))
        for v in algebra.quiver.vertices:
            offsets[v] += r.dims[v]
    return total, incls, projs


class RepMap:
    """Module homomorphism: vertex-wise matrices commuting with the arrows."""

    def __init__(self, source, target, mats, check=True):
        if source.algebra is not target.algebra:
            raise AlgebraMismatch("morphism between modules over different algebras")
        self.source = source
        self.target = target
        self.mats = {}
        for v in source.algebra.quiver.vertices:
            m = mats.get(v)
            if m is None:
                m = ExactMatrix.zeros(source.algebra.field, target.dims[v], source.dims[v])
            if m.rows != target.dims[v] or m.cols != source.dims[v]:
                raise ShapeMismatch(f"vertex {v}: matrix is {m.rows}x{m.cols}")
            self.mats[v] = m
        if check and not self.commutes():
            raise ShapeMismatch("matrices do not commute with the arrow action")

    def commutes(self):
        for name, src, tgt in self.source.algebra.quiver.arrows:
            if self.mats[tgt] @ self.source.action[name] != self.target.action[name] @ self.mats[src]:
                return False
        return True

    def __add__(self, other):
        return RepMap(self.source, self.target,
                      {v: self.mats[v] + other.mats[v] for v in self.mats}, check=False)

    def __sub__(self, other):
        return RepMap(self.source, self.target,
                      {v: self.mats[v] - other.mats[v] for v in self.mats}, check=False)

    def __neg__(self):
        return RepMap(self.source, self.target,
                      {v: -self.mats[v] for v in self.mats}, check=False)

    def scale(self, c):
        return RepMap(self.source, self.target,
                      {v: self.mats[v].scale(c) for v in self.mats}, check=False)

    def compose(self, other):
        """self after other."""
        if other.target is not self.source and other.target.dim_vector() != self.source.dim_vector():
            raise ShapeMismatch("composition shape mismatch")
        return RepMap(other.source, self.target,
                      {v: self.mats[v] @ other.mats[v] for v in self.mats}, check=False)

    def is_zero(self):
        return all(m.is_zero() for m in self.mats.values())

    def __eq__(self, other):
        return isinstance(other, RepMap) and all(self.mats[v] == other.mats[v] for v in self.mats)

    def vec(self):
        out = []
        for v in self.source.algebra.quiver.vertices:
            out.extend(self.mats[v].flatten())
        return out

    def __repr__(self):
        return f"RepMap({self.source!r} -> {self.target!r})"


def identity_map(rep):
    return RepMap(rep, rep,
                  {v: ExactMatrix.identity(rep.algebra.field, rep.dims[v])
                   for v in rep.algebra.quiver.vertices}, check=False)


def zero_map(source, target):
    return RepMap(source, target, {}, check=False)


def repmap_space_dim(M, N):
    return sum(N.dims[v] * M.dims[v] for v in M.algebra.quiver.vertices)


def repmap_from_vec(M, N, vec):
    f = M.algebra.field
    mats = {}
    o = 0
    for v in M.algebra.quiver.vertices:
        r, c = N.dims[v], M.dims[v]
        mats[v] = ExactMatrix(f, r, c, [vec[o + i * c : o + (i + 1) * c] for i in range(r)],
                              coerce=False)
        o += r * c
    return RepMap(M, N, mats, check=False)


def hom_basis(M, N):
    """Basis of Hom_A(M, N): kernel of the commuting-square system."""
    if M.algebra is not N.algebra:
        raise AlgebraMismatch("Hom between modules over different algebras")
    A = M.algebra
    f = A.field
    zero = f.zero()
    total = repmap_space_dim(M, N)
    offsets = {}
    o = 0
    for v in A.quiver.vertices:
        offsets[v] = o
        o += N.dims[v] * M.dims[v]

    rows = []
    for name, src, tgt in A.quiver.arrows:
        Ma, Na = M.action[name], N.action[name]
        # f_tgt @ Ma - Na @ f_src = 0, one equation per (r, c)
        for r in range(N.dims[tgt]):
            for c in range(M.dims[src]):
                row = [zero] * total
                for cc in range(M.dims[tgt]):
                    a = Ma.data[cc][c]
                    if a != zero:
                        row[offsets[tgt] + r * M.dims[tgt] + cc] = a
                for rr in range(N.dims[src]):
                    a = Na.data[r][rr]
                    if a != zero:
                        idx = offsets[src] + rr * M.dims[src] + c
                        row[idx] = f.sub(row[idx], a)
                rows.append(row)
    if rows:
        ker = ExactMatrix(f, len(rows), total, rows, coerce=False).kernel_basis()
    else:
        ker = ExactMatrix.identity(f, total)
    return [repmap_from_vec(M, N, ker.column(j)) for j in range(ker.cols)]


# ---------------------------------------------------------------------------
# kernels, images, quotients of module maps
# ---------------------------------------------------------------------------


def kernel_rep(fmap):
    """(K, incl) with K_v = ker(f_v) and the induced arrow action."""
    A = fmap.source.algebra
    f = A.field
    bases = {v: fmap.mats[v].kernel_basis() for v in A.quiver.vertices}
    dims = {v: bases[v].cols for v in A.quiver.vertices}
    action = {}
    for name, src, tgt in A.quiver.arrows:
        mapped = fmap.source.action[name] @ bases[src]
        sol = bases[tgt].solve_multi(mapped)
        if sol is None:
            raise ShapeMismatch("kernel is not arrow-stable; map is not a morphism")
        action[name] = sol
    K = Representation(A, dims, action, check=False)
    incl = RepMap(K, fmap.source, {v: bases[v] for v in A.quiver.vertices}, check=False)
    return K, incl


def image_rep(fmap):
    """(I, incl into target) with I_v = im(f_v)."""
    A = fmap.source.algebra
    bases = {v: fmap.mats[v].column_space_basis() for v in A.quiver.vertices}
    dims = {v: bases[v].cols for v in A.quiver.vertices}
    action = {}
    for name, src, tgt in A.quiver.arrows:
        mapped = fmap.target.action[name] @ bases[src]
        sol = bases[tgt].solve_multi(mapped)
        if sol is None:
            raise ShapeMismatch("image is not arrow-stable")
        action[name] = sol
    I = Representation(A, dims, action, check=False)
    incl = RepMap(I, fmap.target, {v: bases[v] for v in A.quiver.vertices}, check=False)
    return I, incl


def cokernel_rep(fmap):
    """(C, proj) with C_v = target_v / im(f_v)."""
    A = fmap.source.algebra
    f = A.field
    quots = {v: QuotientSpace(f, fmap.target.dims[v], fmap.mats[v].column_space_basis())
             for v in A.quiver.vertices}
    dims = {v: quots[v].dim for v in A.quiver.vertices}
    action = {}
    for name, src, tgt in A.quiver.arrows:
        cols = [quots[tgt].project(fmap.target.action[name].apply(rep))
                for rep in quots[src].representatives]
        action[name] = ExactMatrix.from_columns(f, dims[tgt], cols)
    C = Representation(A, dims, action, check=False)
    proj_mats = {}
    for v in A.quiver.vertices:
        cols = [quots[v].project([f.one() if i == k else f.zero()
                                  for i in range(fmap.target.dims[v])])
                for k in range(fmap.target.dims[v])]
        proj_mats[v] = ExactMatrix.from_columns(f, dims[v], cols)
    proj = RepMap(fmap.target, C, proj_mats, check=False)
    return C, proj


def radical_subrep(M):
    """(rad M, incl): vertexwise span of all incoming arrow images."""
    A = M.algebra
    f = A.field
    bases = {}
    for v in A.quiver.vertices:
        cols = []
        for name, src, tgt in A.quiver.arrows_into(v):
            cols.extend(M.action[name].columns())
        stacked = ExactMatrix.from_columns(f, M.dims[v], cols)
        bases[v] = stacked.column_space_basis()
    dims = {v: bases[v].cols for v in A.quiver.vertices}
    action = {}
    for name, src, tgt in A.quiver.arrows:
        mapped = M.action[name] @ bases[src]
        sol = bases[tgt].solve_multi(mapped)
        action[name] = sol
    R = Representation(A, dims, action, check=False)
    incl = RepMap(R, M, {v: bases[v] for v in A.quiver.vertices}, check=False)
    return R, incl


def top_quotients(M):
    """Per-vertex quotient coordinates of M / rad M."""
    A = M.algebra
    f = A.field
    quots = {}
    for v in A.quiver.vertices:
        cols = []
        for name, src, tgt in A.quiver.arrows_into(v):
            cols.extend(M.action[name].columns())
        sub = ExactMatrix.from_columns(f, M.dims[v], cols)
        quots[v] = QuotientSpace(f, M.dims[v], sub)
    return quots


def socle(M):
    """(soc M, incl): the annihilator of all arrows, the largest semisimple sub."""
    A = M.algebra
    f = A.field
    bases = {}
    for v in A.quiver.vertices:
        out = A.quiver.arrows_from(v)
        if not out:
            bases[v] = ExactMatrix.identity(f, M.dims[v])
            continue
        stacked = None
        for name, src, tgt in out:
            m = M.action[name]
            stacked = m if stacked is None else stacked.vstack(m)
        bases[v] = stacked.kernel_basis()
    dims = {v: bases[v].cols for v in A.quiver.vertices}
    S = Representation(A, dims, {}, check=False)
    incl = RepMap(S, M, {v: bases[v] for v in A.quiver.vertices}, check=False)
    return S, incl


def projective_cover(M):
    """(P, cover) with P = direct sum of P_v^{dim top(M)_v} and cover onto M."""
    A = M.algebra
    quots = top_quotients(M)
    pieces, gens = [], []
    for v in A.quiver.vertices:
        for idx in quots[v].rep_indices:
            pieces.append(projective(A, v))
            gens.append((v, idx))
    if not pieces:
        P = zero_representation(A)
        return P, RepMap(P, M, {}, check=False)
    P, incls, _ = direct_sum(pieces)
    f = A.field
    # column of the cover for each basis class of each projective piece
    mats = {w: ExactMatrix.zeros(f, M.dims[w], P.dims[w]).to_lists() for w in A.quiver.vertices}
    for piece_idx, (v, gen_idx) in enumerate(gens):
        gen = [f.one() if i == gen_idx else f.zero() for i in range(M.dims[v])]
        Pv = pieces[piece_idx]
        classes = A.classes_from(v)
        by_vertex = {w: [c for c in classes if A.class_target[c] == w] for w in A.quiver.vertices}
        for w in A.quiver.vertices:
            for k, c in enumerate(by_vertex[w]):
                val = M.class_action(c).apply(gen)
                # position of this basis vector inside P at vertex w
                col_local = [f.one() if i == k else f.zero() for i in range(Pv.dims[w])]
                col_global = incls[piece_idx].mats[w].apply(col_local)
                j = col_global.index(f.one())
                for r in range(M.dims[w]):
                    mats[w][r][j] = val[r]
    cover_mats = {w: ExactMatrix(f, M.dims[w], P.dims[w], mats[w], coerce=False)
                  for w in A.quiver.vertices}
    cover = RepMap(P, M, cover_mats, check=True)
    for w in A.quiver.vertices:
        if cover.mats[w].rank() != M.dims[w]:
            raise ShapeMismatch("projective cover failed to be surjective")
    return P, cover


def is_projective(M):
    P, cover = projective_cover(M)
    if P.dim_vector() != M.dim_vector():
        return False
    return all(cover.mats[v].is_invertible() for v in M.algebra.quiver.vertices)


def is_injective_module(M):
    I, _ = injective_envelope(M)
    return I.dim_vector() == M.dim_vector()


def injective_envelope(M):
    """(I, emb): I = direct sum of I_i with socle multiplicities, emb essential."""
    A = M.algebra
    f = A.field
    soc, soc_incl = socle(M)
    pieces, piece_vertices = [], []
    for v in A.quiver.vertices:
        for _ in range(soc.dims[v]):
            pieces.append(injective(A, v))
            piece_vertices.append(v)
    if not pieces:
        if M.total_dim != 0:
            raise ShapeMismatch("nonzero module with zero socle")
        I = zero_representation(A)
        return I, RepMap(M, I, {}, check=False)
    I, incls, _ = direct_sum(pieces)

    # canonical embedding of soc(M) into soc(I): k-th socle vector at vertex v
    # goes to the socle generator of the k-th copy of I_v
    soc_targets = {v: [] for v in A.quiver.vertices}
    for piece_idx, v in enumerate(piece_vertices):
        Iv = pieces[piece_idx]
        soc_I, soc_I_incl = socle(Iv)
        if soc_I.dims[v] != 1:
            raise ShapeMismatch("injective at a vertex must have simple socle")
        gen_local = soc_I_incl.mats[v].column(0)
        soc_targets[v].append(incls[piece_idx].mats[v].apply(gen_local))

    # solve for emb: M -> I with emb . soc_incl = canonical, emb a morphism
    total = repmap_space_dim(M, I)
    offsets = {}
    o = 0
    for v in A.quiver.vertices:
        offsets[v] = o
        o += I.dims[v] * M.dims[v]
    zero = f.zero()
    rows, rhs = [], []
    for name, src, tgt in A.quiver.arrows:
        Ma, Ia = M.action[name], I.action[name]
        for r in range(I.dims[tgt]):
            for c in range(M.dims[src]):
                row = [zero] * total
                for cc in range(M.dims[tgt]):
                    a = Ma.data[cc][c]
                    if a != zero:
                        row[offsets[tgt] + r * M.dims[tgt] + cc] = a
                for rr in range(I.dims[src]):
                    a = Ia.data[r][rr]
                    if a != zero:
                        idx = offsets[src] + rr * M.dims[src] + c
                        row[idx] = f.sub(row[idx], a)
                rows.append(row)
                rhs.append(zero)
    for v in A.quiver.vertices:
        for k in range(soc.dims[v]):
            svec = soc_incl.mats[v].column(k)
            tvec = soc_targets[v][k]
            for r in range(I.dims[v]):
                row = [zero] * total
                for c in range(M.dims[v]):
                    if svec[c] != zero:
                        row[offsets[v] + r * M.dims[v] + c] = svec[c]
                rows.append(row)
                rhs.append(tvec[r])
    mat = ExactMatrix(f, len(rows), total, rows, coerce=False)
    sol = mat.solve(rhs)
    if sol is None:
        raise ShapeMismatch("no extension of the socle embedding; injectivity violated")
    emb = repmap_from_vec(M, I, sol)
    for v in A.quiver.vertices:
        if emb.mats[v].rank() != M.dims[v]:
            raise ShapeMismatch("injective envelope embedding is not injective")
    return I, emb


# ---------------------------------------------------------------------------
# Nakayama functor and the projective-module pairing
# ---------------------------------------------------------------------------


def right_mult_map(algebra, arrow_name):
    """Right multiplication by an arrow a: v -> w as a module map P_w -> P_v."""
    src = algebra.quiver.arrow_source[arrow_name]
    tgt = algebra.quiver.arrow_target[arrow_name]
    Pw, Pv = projective(algebra, tgt), projective(algebra, src)
    f = algebra.field
    mats = {}
    for u in algebra.quiver.vertices:
        w_classes = algebra.classes_between(tgt, u)
        v_classes = algebra.classes_between(src, u)
        cols = []
        for c in w_classes:
            p = algebra.basis_paths[c]
            vec = algebra._reduction.get((src, (arrow_name,) + p.arrows))
            cols.append([vec[d] for d in v_classes])
        mats[u] = ExactMatrix.from_columns(f, len(v_classes), cols)
    return RepMap(Pw, Pv, mats, check=True)


class NakayamaData:
    """nu(P) together with the chosen bases of Hom(P, P_v) used to present it."""

    def __init__(self, P):
        if not is_projective(P):
            raise NotProjective("Nakayama functor needs a projective module")
        A = P.algebra
        self.P = P
        self.hom_bases = {v: hom_basis(P, projective(A, v)) for v in A.quiver.vertices}
        self.hom_mats = {
            v: ExactMatrix.from_columns(
                A.field, repmap_space_dim(P, projective(A, v)),
                [h.vec() for h in self.hom_bases[v]])
            for v in A.quiver.vertices
        }
        dims = {v: len(self.hom_bases[v]) for v in A.quiver.vertices}
        action = {}
        for name, src, tgt in A.quiver.arrows:
            ra = right_mult_map(A, name)
            cols = [ra.compose(n).vec() for n in self.hom_bases[tgt]]
            if cols:
                stacked = ExactMatrix.from_columns(A.field, len(cols[0]), cols)
            else:
                stacked = ExactMatrix.zeros(A.field, self.hom_mats[src].rows, 0)
            sol = self.hom_mats[src].solve_multi(stacked)
            if sol is None:
                raise ShapeMismatch("right multiplication does not preserve Hom(P, P_v)")
            action[name] = sol.transpose()
        self.nu = Representation(A, dims, action, check=True)


def nakayama(P):
    """The Nakayama image of a projective module: dual of Hom(P, A)."""
    return NakayamaData(P).nu


def nakayama_map(fmap):
    """nu(f) for f: P -> Q between projectives."""
    P, Q = fmap.source, fmap.target
    dP, dQ = NakayamaData(P), NakayamaData(Q)
    A = P.algebra
    mats = {}
    for v in A.quiver.vertices:
        cols = [g.compose(fmap).vec() for g in dQ.hom_bases[v]]
        if cols:
            stacked = ExactMatrix.from_columns(A.field, len(cols[0]), cols)
        else:
            stacked = ExactMatrix.zeros(A.field, dP.hom_mats[v].rows, 0)
        sol = dP.hom_mats[v].solve_multi(stacked)
        if sol is None:
            raise ShapeMismatch("composition leaves Hom(P, P_v)")
        mats[v] = sol.transpose()
    return RepMap(dP.nu, dQ.nu, mats, check=False)


class PairingContext:
    """Evaluates the canonical pairing Hom(P, Y) x Hom(Y, nu P) -> k.

    Identifies Hom(P, Y) with Hom(P, A) tensored over A with Y; the pairing
    evaluates the functional g(y) on the Hom(P, A)-leg of any preimage of f.
    """

    def __init__(self, P, Y, ndata=None):
        if P.algebra is not Y.algebra:
            raise AlgebraMismatch("pairing across algebras")
        A = P.algebra
        f = A.field
        self.P, self.Y = P, Y
        self.ndata = ndata if ndata is not None else NakayamaData(P)
        self.columns = []  # (vertex, index of h in hom basis, index j in Y_v)
        cols = []
        for v in A.quiver.vertices:
            paths_by_target = {
                u: [(c, A.basis_paths[c]) for c in A.classes_between(v, u)]
                for u in A.quiver.vertices
            }
            pa = {u: [Y.path_action(p) for _, p in paths_by_target[u]] for u in A.quiver.vertices}
            for h_idx, h in enumerate(self.ndata.hom_bases[v]):
                for j in range(Y.dims[v]):
                    mats = {}
                    for u in A.quiver.vertices:
                        out = ExactMatrix.zeros(f, Y.dims[u], P.dims[u]).to_lists()
                        for k, (c, p) in enumerate(paths_by_target[u]):
                            act_col = [pa[u][k].data[r][j] for r in range(Y.dims[u])]
                            hrow = h.mats[u]
                            for pc in range(P.dims[u]):
                                coeff = hrow.data[k][pc]
                                if coeff == f.zero():
                                    continue
                                for r in range(Y.dims[u]):
                                    if act_col[r] != f.zero():
                                        out[r][pc] = f.add(out[r][pc], f.mul(coeff, act_col[r]))
                        mats[u] = ExactMatrix(f, Y.dims[u], P.dims[u], out, coerce=False)
                    T = RepMap(P, Y, mats, check=False)
                    self.columns.append((v, h_idx, j))
                    cols.append(T.vec())
        n = repmap_space_dim(P, Y)
        self.theta = ExactMatrix.from_columns(f, n, cols)

    def pair(self, fmap, gmap):
        sols = self.pair_multi([fmap], [gmap])
        return sols[0][0]

    def pair_multi(self, fmaps, gmaps):
        """Matrix of pairings: rows indexed by fmaps, columns by gmaps."""
        A = self.P.algebra
        f = A.field
        for fm in fmaps:
            if fm.source.dim_vector() != self.P.dim_vector() or fm.target.dim_vector() != self.Y.dim_vector():
                raise ShapeMismatch("f must map P -> Y")
        for gm in gmaps:
            if gm.source.dim_vector() != self.Y.dim_vector() or gm.target.dim_vector() != self.ndata.nu.dim_vector():
                raise ShapeMismatch("g must map Y -> nu(P)")
        if not fmaps or not gmaps:
            return [[f.zero() for _ in gmaps] for _ in fmaps]
        B = ExactMatrix.from_columns(f, self.theta.rows, [fm.vec() for fm in fmaps])
        T = self.theta.solve_multi(B)
        if T is None:
            raise NotProjective("pairing preimage missing; module is not projective")
        out = []
        for fi in range(len(fmaps)):
            t = T.column(fi)
            row = []
            for gm in gmaps:
                s = f.zero()
                for coeff, (v, h_idx, j) in zip(t, self.columns):
                    if coeff == f.zero():
                        continue
                    val = gm.mats[v].data[h_idx][j]
                    if val != f.zero():
                        s = f.add(s, f.mul(coeff, val))
                row.append(s)
            out.append(row)
        return out


def module_pairing(P, Y, fmap, gmap, ndata=None):
    """The canonical scalar pairing of f: P -> Y against g: Y -> nu(P)."""
    return PairingContext(P, Y, ndata=ndata).pair(fmap, gmap)


# ---------------------------------------------------------------------------
# abstract algebra presentations (End algebras, radicals, idempotents)
# ---------------------------------------------------------------------------


class EndAlgebraPresentation:
    """A finite-dimensional unital algebra by basis and structure constants.

    `elements` optionally carries realizations (RepMaps or chain-map classes)
    of the basis vectors; `unit_index` points at the basis element that is the
    multiplicative unit when the algebra is nonzero.
    """

    def __init__(self, field, mult_table, unit, elements=None, unit_index=None):
        self.field = field
        self.table = mult_table
        self.dim = len(mult_table)
        self.unit = unit
        self.elements = elements
        self.unit_index = unit_index
        self._check_associative()

    def _check_associative(self):
        if self.dim > 14:
            return
        for i in range(self.dim):
            ei = self.basis_vector(i)
            for j in range(self.dim):
                ej = self.basis_vector(j)
                ij = self.mult(ei, ej)
                for k in range(self.dim):
                    ek = self.basis_vector(k)
                    if self.mult(ij, ek) != self.mult(ei, self.mult(ej, ek)):
                        raise ShapeMismatch("presentation is not associative")

    def basis_vector(self, i):
        z, o = self.field.zero(), self.field.one()
        return [o if t == i else z for t in range(self.dim)]

    def mult(self, u, v):
        f = self.field
        zero = f.zero()
        out = [zero] * self.dim
        for i, ci in enumerate(u):
            if ci == zero:
                continue
            row = self.table[i]
            for j, cj in enumerate(v):
                if cj == zero:
                    continue
                c = f.mul(ci, cj)
                for k, pk in enumerate(row[j]):
                    if pk != zero:
                        out[k] = f.add(out[k], f.mul(c, pk))
        return out

    def lmul_matrix(self, u):
        cols = [self.mult(u, self.basis_vector(j)) for j in range(self.dim)]
        return ExactMatrix.from_columns(self.field, self.dim, cols)

    def power(self, u, n):
        acc = list(self.unit)
        for _ in range(n):
            acc = self.mult(acc, u)
        return acc

    def is_idempotent(self, u):
        return self.mult(u, u) == u

    def minimal_polynomial(self, u):
        """Monic minimal polynomial of u, as ascending Fraction coefficients."""
        f = self.field
        pows = [list(self.unit)]
        cur = list(self.unit)
        while True:
            cur = self.mult(cur, u)
            mat = ExactMatrix.from_columns(f, self.dim, pows)
            sol = mat.solve(cur)
            if sol is not None:
                coeffs = [f.neg(c) for c in sol] + [f.one()]
                return coeffs
            pows.append(cur)
            if len(pows) > self.dim + 1:
                raise ShapeMismatch("minimal polynomial search exceeded the dimension")

    def center_subspace(self):
        """Columns spanning the center."""
        f = self.field
        rows = []
        for j in range(self.dim):
            ej = self.basis_vector(j)
            L = self.lmul_matrix(ej)
            R = ExactMatrix.from_columns(
                f, self.dim, [self.mult(self.basis_vector(i), ej) for i in range(self.dim)])
            rows.append(L - R)
        if not rows:
            return ExactMatrix.identity(f, self.dim)
        stacked = rows[0]
        for m in rows[1:]:
            stacked = stacked.vstack(m)
        return stacked.kernel_basis()

    def realize(self, coords):
        """Sum of basis realizations with the given coordinates."""
        if self.elements is None:
            return None
        f = self.field
        acc = None
        for c, elem in zip(coords, self.elements):
            if c == f.zero():
                continue
            term = elem.scale(c)
            acc = term if acc is None else acc + term
        return acc


def end_presentation_from_vecs(field, elems, vecs, id_vec, id_elem, vec_fn=None):
    """Presentation of a span of endomorphisms closed under composition.

    elems: realized endomorphisms (support +, scale, compose);
    vecs: their coordinates in an ambient vector space; id must lie in the span.
    vec_fn flattens a composed endomorphism into the same ambient coordinates
    (defaults to the element's own .vec method).
    """
    if vec_fn is None:
        vec_fn = lambda m: m.vec()
    if not elems:
        return EndAlgebraPresentation(field, [], [], elements=[], unit_index=None)
    n = len(vecs[0])
    span = ExactMatrix.from_columns(field, n, [id_vec] + list(vecs))
    _, pivots = span.rref()
    if 0 not in pivots:
        raise ShapeMismatch("identity is not in the endomorphism span")
    basis_elems, basis_vecs = [id_elem], [id_vec]
    for p in pivots:
        if p == 0:
            continue
        basis_elems.append(elems[p - 1])
        basis_vecs.append(vecs[p - 1])
    B = ExactMatrix.from_columns(field, n, basis_vecs)
    table = []
    for bi in basis_elems:
        prods = [bi.compose(bj) for bj in basis_elems]
        stacked = ExactMatrix.from_columns(field, n, [vec_fn(p) for p in prods])
        sol = B.solve_multi(stacked)
        if sol is None:
            raise ShapeMismatch("endomorphism span is not closed under composition")
        table.append([sol.column(j) for j in range(sol.cols)])
    unit = [field.one()] + [field.zero()] * (len(basis_elems) - 1)
    return EndAlgebraPresentation(field, table, unit, elements=basis_elems, unit_index=0)


def end_algebra(M):
    """End_A(M) as an EndAlgebraPresentation with RepMap realizations."""
    basis = hom_basis(M, M)
    ident = identity_map(M)
    return end_presentation_from_vecs(
        M.algebra.field, basis, [b.vec() for b in basis], ident.vec(), ident)


def radical_of_end(E):
    """Jacobson radical via the Dickson trace criterion (rationals only).

    Returns a matrix whose columns are a basis of the radical in the
    presentation coordinates.
    """
    if not E.field.is_rational:
        raise UnsupportedField("the trace-form radical criterion needs characteristic 0")
    if E.dim == 0:
        return ExactMatrix.zeros(E.field, 0, 0)
    f = E.field
    lmuls = [E.lmul_matrix(E.basis_vector(i)) for i in range(E.dim)]
    gram = []
    for i in range(E.dim):
        row = []
        for j in range(E.dim):
            prod = lmuls[i] @ lmuls[j]
            tr = f.zero()
            for k in range(E.dim):
                tr = f.add(tr, prod.data[k][k])
            row.append(tr)
        gram.append(row)
    return ExactMatrix(f, E.dim, E.dim, gram, coerce=False).kernel_basis()


def quotient_presentation(E, ideal_cols):
    """E / (span of ideal_cols) with projection and representative lift data."""
    f = E.field
    q = QuotientSpace(f, E.dim, ideal_cols)
    basis_lift = q.rep_indices  # representative = a basis vector of E
    dim = q.dim
    table = []
    for i in range(dim):
        row = []
        bi = E.basis_vector(basis_lift[i])
        for j in range(dim):
            bj = E.basis_vector(basis_lift[j])
            row.append(q.project(E.mult(bi, bj)))
        table.append(row)
    unit = q.project(E.unit)
    quo = EndAlgebraPresentation(f, table, unit, elements=None, unit_index=None)
    return quo, q


def _fraction_to_sympy(x):
    return sympy.Rational(x.numerator, x.denominator)


def _sympy_to_fraction(x):
    r = sympy.Rational(x)
    return Fraction(int(r.p), int(r.q))


def _factor_minpoly(coeffs):
    """Factor a monic rational polynomial; returns (sympy factors, t symbol)."""
    t = sympy.Symbol("t")
    poly = sum(_fraction_to_sympy(c) * t**i for i, c in enumerate(coeffs))
    _, factors = sympy.Poly(poly, t, domain="QQ").factor_list()
    return factors, t


def _poly_coeffs(poly_expr, t):
    p = sympy.Poly(poly_expr, t, domain="QQ")
    return [_sympy_to_fraction(c) for c in reversed(p.all_coeffs())]


def _eval_poly(E, coeffs, u):
    """Evaluate an ascending-coefficient polynomial at an algebra element."""
    f = E.field
    acc = [f.zero()] * E.dim
    for c in reversed(coeffs):
        acc = E.mult(acc, u)
        if c != f.zero():
            acc = [f.add(a, f.mul(c, e)) for a, e in zip(acc, E.unit)]
    return acc


def _idempotent_from_element(E, u):
    """A nontrivial idempotent polynomial in u, or None."""
    f = E.field
    mu = E.minimal_polynomial(u)
    factors, t = _factor_minpoly(mu)
    if len(factors) >= 2:
        f1 = factors[0][0] ** factors[0][1]
        rest = sympy.prod(p**e for p, e in factors[1:])
        s, tt, g = sympy.gcdex(sympy.Poly(f1, t, domain="QQ"), sympy.Poly(rest, t, domain="QQ"))
        # s*f1 + tt*rest = g, a nonzero constant
        const = _sympy_to_fraction(g.all_coeffs()[0])
        e_poly = (tt * sympy.Poly(rest, t, domain="QQ")).as_expr() / _fraction_to_sympy(const)
        e = _eval_poly(E, _poly_coeffs(e_poly, t), u)
        if E.is_idempotent(e) and e != [f.zero()] * E.dim and e != E.unit:
            return e
        return None
    p0, e0 = factors[0]
    if e0 >= 2:
        # f(u) is a nonzero nilpotent; von Neumann regularity gives e = x y
        x = _eval_poly(E, _poly_coeffs(p0.as_expr(), t), u)
        if all(c == f.zero() for c in x):
            return None
        lx = E.lmul_matrix(x)
        rx_cols = [E.mult(E.basis_vector(j), x) for j in range(E.dim)]
        rx = ExactMatrix.from_columns(f, E.dim, rx_cols)
        sol = (lx @ rx).solve(x)
        if sol is None:
            return None
        e = E.mult(x, sol)
        if E.is_idempotent(e) and e != [f.zero()] * E.dim and e != E.unit:
            return e
    return None


def _subalgebra_presentation(E, element_coords, unit_coords):
    """Presentation of the span of given elements (unital with given unit)."""
    f = E.field
    span = ExactMatrix.from_columns(f, E.dim, [unit_coords] + element_coords)
    _, pivots = span.rref()
    basis = []
    for p in pivots:
        basis.append(unit_coords if p == 0 else element_coords[p - 1])
    B = ExactMatrix.from_columns(f, E.dim, basis)
    table = []
    for bi in basis:
        prods = [E.mult(bi, bj) for bj in basis]
        sol = B.solve_multi(ExactMatrix.from_columns(f, E.dim, prods))
        if sol is None:
            raise ShapeMismatch("corner is not multiplicatively closed")
        table.append([sol.column(j) for j in range(sol.cols)])
    unit_sol = B.solve(unit_coords)
    sub = EndAlgebraPresentation(f, table, unit_sol, elements=None, unit_index=None)
    return sub, basis  # basis: coords of sub basis inside E


def _corner(E, e):
    """The corner algebra eEe with its basis embedded in E coordinates."""
    elems = [E.mult(e, E.mult(E.basis_vector(j), e)) for j in range(E.dim)]
    return _subalgebra_presentation(E, elems, e)


def _find_nontrivial_idempotent(B, rng, tries=24):
    f = B.field
    candidates = [B.basis_vector(i) for i in range(B.dim)]
    for _ in range(tries):
        candidates.append([f.coerce(rng.randint(-3, 3)) for _ in range(B.dim)])
    zero = [f.zero()] * B.dim
    for u in candidates:
        if u == zero or u == B.unit:
            continue
        e = _idempotent_from_element(B, u)
        if e is not None:
            return e
    return None


def primitive_orthogonal_idempotents(Ebar, rng):
    """A complete family of primitive orthogonal idempotents of a semisimple
    presentation, certified by 1-dimensional corners.  Raises NonSplitResidue
    when a corner of dimension > 1 yields no idempotent (non-split residue)."""
    if Ebar.dim == 0:
        return []

    def split(sub, embed):
        # embed: list of E-coordinate vectors realizing sub's basis
        def to_ambient(u):
            f = sub.field
            acc = [f.zero()] * len(embed[0])
            for c, vec in zip(u, embed):
                if c != f.zero():
                    acc = [f.add(a, f.mul(c, x)) for a, x in zip(acc, vec)]
            return acc

        if sub.dim == 1:
            return [to_ambient(sub.unit)]
        e = _find_nontrivial_idempotent(sub, rng)
        if e is None:
            raise NonSplitResidue(
                f"semisimple corner of dimension {sub.dim} admits no rational splitting")
        fcomp = [sub.field.sub(a, b) for a, b in zip(sub.unit, e)]
        out = []
        for idem in (e, fcomp):
            corner, corner_embed_local = _corner(sub, idem)
            corner_embed = [to_ambient(v) for v in corner_embed_local]
            out.extend(split(corner, corner_embed))
        return out

    identity_embed = [Ebar.basis_vector(i) for i in range(Ebar.dim)]
    return split(Ebar, identity_embed)


def newton_idempotent_lift(E, x, max_iter=64):
    """Lift x (idempotent modulo a nil ideal) to an exact idempotent of E."""
    f = E.field
    cur = list(x)
    for _ in range(max_iter):
        sq = E.mult(cur, cur)
        if sq == cur:
            return cur
        cube = E.mult(sq, cur)
        three_sq = [f.mul(f.coerce(3), a) for a in sq]
        two_cube = [f.mul(f.coerce(2), a) for a in cube]
        cur = [f.sub(a, b) for a, b in zip(three_sq, two_cube)]
    raise ShapeMismatch("idempotent lifting did not converge; ideal is not nil")


def lift_orthogonal_idempotents(E, rad_cols, bar_idems, quot):
    """Lift a complete orthogonal family from E/rad back to E, exactly."""
    f = E.field
    if not bar_idems:
        return []
    if len(bar_idems) == 1:
        return [list(E.unit)]

    def preimage(bar_vec):
        acc = [f.zero()] * E.dim
        for c, idx in zip(bar_vec, quot.rep_indices):
            if c != f.zero():
                acc[idx] = f.add(acc[idx], c)
        return acc

    e1 = newton_idempotent_lift(E, preimage(bar_idems[0]))
    comp = [f.sub(a, b) for a, b in zip(E.unit, e1)]
    # push the rest into the complementary corner and recurse
    corner_elems = [E.mult(comp, E.mult(E.basis_vector(j), comp)) for j in range(E.dim)]
    corner, corner_basis = _subalgebra_presentation(E, corner_elems, comp)
    B = ExactMatrix.from_columns(f, E.dim, corner_basis)

    def to_corner(u):
        moved = E.mult(comp, E.mult(u, comp))
        sol = B.solve(moved)
        if sol is None:
            raise ShapeMismatch("element does not land in the corner")
        return sol

    corner_rad_cols_list = []
    for j in range(rad_cols.cols):
        corner_rad_cols_list.append(to_corner(rad_cols.column(j)))
    corner_rad = ExactMatrix.from_columns(f, corner.dim, corner_rad_cols_list)
    corner_quotient, corner_q = quotient_presentation(corner, corner_rad.column_space_basis())

    rest_in_corner = []
    for bar in bar_idems[1:]:
        rest_in_corner.append(corner_q.project(to_corner(preimage(bar))))
    lifted_rest_corner = lift_orthogonal_idempotents(
        corner, corner_rad.column_space_basis(), rest_in_corner, corner_q)

    def corner_to_E(u):
        acc = [f.zero()] * E.dim
        for c, vec in zip(u, corner_basis):
            if c != f.zero():
                acc = [f.add(a, f.mul(c, x)) for a, x in zip(acc, vec)]
        return acc

    return [e1] + [corner_to_E(u) for u in lifted_rest_corner]


def split_by_idempotent(M, e):
    """(summand, incl, proj) realizing the image of an exact idempotent e on M."""
    A = M.algebra
    f = A.field
    bases = {v: e.mats[v].column_space_basis() for v in A.quiver.vertices}
    dims = {v: bases[v].cols for v in A.quiver.vertices}
    action = {}
    for name, src, tgt in A.quiver.arrows:
        mapped = M.action[name] @ bases[src]
        sol = bases[tgt].solve_multi(mapped)
        if sol is None:
            raise ShapeMismatch("idempotent image is not a submodule")
        action[name] = sol
    S = Representation(A, dims, action, check=False)
    incl = RepMap(S, M, {v: bases[v] for v in A.quiver.vertices}, check=False)
    proj_mats = {}
    for v in A.quiver.vertices:
        sol = bases[v].solve_multi(e.mats[v])
        proj_mats[v] = sol
    proj = RepMap(M, S, proj_mats, check=False)
    return S, incl, proj


def decompose(M, seed=0):
    """Indecomposable summands of M with exact idempotent witnesses.

    Returns a list of (summand, idempotent RepMap); the idempotents are
    pairwise orthogonal and sum to the identity.  Requires the rationals.
    """
    import random as _random

    if not M.algebra.field.is_rational:
        raise UnsupportedField("decomposition requires the rationals")
    if M.total_dim == 0:
        return []
    rng = _random.Random(seed)
    E = end_algebra(M)
    rad = radical_of_end(E)
    Ebar, quot = quotient_presentation(E, rad)
    bar_idems = primitive_orthogonal_idempotents(Ebar, rng)
    idems = lift_orthogonal_idempotents(E, rad, bar_idems, quot)
    out = []
    for coords in idems:
        e = E.realize(coords)
        S, _, _ = split_by_idempotent(M, e)
        out.append((S, e))
    return out


def is_indecomposable(M):
    """Split-local test: End(M)/rad is one-dimensional."""
    if M.total_dim == 0:
        return False
    E = end_algebra(M)
    rad = radical_of_end(E)
    return E.dim - rad.cols == 1
