"""Exact dense linear algebra over Q or F_p.

Every other module computes Hom spaces, kernels and quotients through the
operations here; there is no floating point anywhere in the package.
Matrices are dense row-major lists, entries are `fractions.Fraction` over Q
and plain ints in [0, p) over F_p.
"""

from fractions import Fraction


class ExactLinearAlgebraError(Exception):
    pass


class FieldSpec:
    """A computation field: the rationals or a prime field F_p."""

    RATIONALS = "Q"
    PRIME = "Fp"

    def __init__(self, kind, p=None):
        if kind == self.RATIONALS:
            self.p = None
        elif kind == self.PRIME:
            if p is None or p < 2 or not _is_prime(p):
                raise ExactLinearAlgebraError(f"{p} is not a prime")
            self.p = p
        else:
            raise ExactLinearAlgebraError(f"unknown field kind {kind!r}")
        self.kind = kind

    @classmethod
    def rationals(cls):
        return cls(cls.RATIONALS)

    @classmethod
    def prime_field(cls, p):
        return cls(cls.PRIME, p)

    @property
    def is_rational(self):
        return self.kind == self.RATIONALS

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self.kind == other.kind and self.p == other.p

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        return "QQ" if self.is_rational else f"GF({self.p})"

    # scalar arithmetic -----------------------------------------------------

    def zero(self):
        return Fraction(0) if self.is_rational else 0

    def one(self):
        return Fraction(1) if self.is_rational else 1

    def coerce(self, x):
        if self.is_rational:
            if isinstance(x, Fraction):
                return x
            if isinstance(x, int):
                return Fraction(x)
            if isinstance(x, str):
                return Fraction(x)
            raise ExactLinearAlgebraError(f"cannot coerce {x!r} into Q")
        if isinstance(x, str):
            x = int(x)
        if isinstance(x, int):
            return x % self.p
        raise ExactLinearAlgebraError(f"cannot coerce {x!r} into F_{self.p}")

    def add(self, a, b):
        return a + b if self.is_rational else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.is_rational else (a - b) % self.p

    def mul(self, a, b):
        return a * b if self.is_rational else (a * b) % self.p

    def neg(self, a):
        return -a if self.is_rational else (-a) % self.p

    def inv(self, a):
        if self.is_rational:
            if a == 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 / a
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def to_str(self, a):
        return str(a)


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


QQ = FieldSpec.rationals()


class ExactMatrix:
    """Dense matrix over a FieldSpec.  Treated as immutable after construction."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field, rows, cols, data, coerce=True):
        if rows < 0 or cols < 0:
            raise ExactLinearAlgebraError("negative matrix shape")
        if len(data) != rows:
            raise ExactLinearAlgebraError("row count mismatch")
        self.field = field
        self.rows = rows
        self.cols = cols
        if coerce:
            c = field.coerce
            self.data = [[c(x) for x in row] for row in data]
            for row in self.data:
                if len(row) != cols:
                    raise ExactLinearAlgebraError("column count mismatch")
        else:
            self.data = data

    # constructors ----------------------------------------------------------

    @classmethod
    def from_rows(cls, field, rows_list):
        rows = len(rows_list)
        cols = len(rows_list[0]) if rows else 0
        return cls(field, rows, cols, rows_list)

    @classmethod
    def zeros(cls, field, rows, cols):
        z = field.zero()
        return cls(field, rows, cols, [[z] * cols for _ in range(rows)], coerce=False)

    @classmethod
    def identity(cls, field, n):
        z, o = field.zero(), field.one()
        data = [[o if i == j else z for j in range(n)] for i in range(n)]
        return cls(field, n, n, data, coerce=False)

    @classmethod
    def from_columns(cls, field, n_rows, columns):
        data = [[col[i] for col in columns] for i in range(n_rows)]
        return cls(field, n_rows, len(columns), data, coerce=False)

    # basic accessors --------------------------------------------------------

    def __getitem__(self, rc):
        return self.data[rc[0]][rc[1]]

    def row(self, i):
        return list(self.data[i])

    def column(self, j):
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self):
        return [self.column(j) for j in range(self.cols)]

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.field == other.field
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __repr__(self):
        body = "; ".join(" ".join(self.field.to_str(x) for x in row) for row in self.data)
        return f"ExactMatrix({self.rows}x{self.cols} [{body}])"

    def to_lists(self):
        return [list(row) for row in self.data]

    def to_str_lists(self):
        return [[self.field.to_str(x) for x in row] for row in self.data]

    def is_zero(self):
        z = self.field.zero()
        return all(x == z for row in self.data for x in row)

    def is_identity(self):
        if self.rows != self.cols:
            return False
        return self == ExactMatrix.identity(self.field, self.rows)

    # arithmetic -------------------------------------------------------------

    def _check_same_shape(self, other):
        if self.field != other.field or self.rows != other.rows or self.cols != other.cols:
            raise ExactLinearAlgebraError("shape or field mismatch")

    def __add__(self, other):
        self._check_same_shape(other)
        add = self.field.add
        data = [
            [add(a, b) for a, b in zip(r1, r2)]
            for r1, r2 in zip(self.data, other.data)
        ]
        return ExactMatrix(self.field, self.rows, self.cols, data, coerce=False)

    def __sub__(self, other):
        self._check_same_shape(other)
        sub = self.field.sub
        data = [
            [sub(a, b) for a, b in zip(r1, r2)]
            for r1, r2 in zip(self.data, other.data)
        ]
        return ExactMatrix(self.field, self.rows, self.cols, data, coerce=False)

    def __neg__(self):
        neg = self.field.neg
        data = [[neg(x) for x in row] for row in self.data]
        return ExactMatrix(self.field, self.rows, self.cols, data, coerce=False)

    def scale(self, c):
        c = self.field.coerce(c)
        mul = self.field.mul
        data = [[mul(c, x) for x in row] for row in self.data]
        return ExactMatrix(self.field, self.rows, self.cols, data, coerce=False)

    def __matmul__(self, other):
        if self.field != other.field or self.cols != other.rows:
            raise ExactLinearAlgebraError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        f = self.field
        zero = f.zero()
        other_data = other.data
        out = []
        for i in range(self.rows):
            row_i = self.data[i]
            acc = [zero] * other.cols
            for k in range(self.cols):
                a = row_i[k]
                if a == zero:
                    continue
                row_k = other_data[k]
                if f.is_rational:
                    acc = [s + a * b for s, b in zip(acc, row_k)]
                else:
                    p = f.p
                    acc = [(s + a * b) % p for s, b in zip(acc, row_k)]
            out.append(acc)
        return ExactMatrix(f, self.rows, other.cols, out, coerce=False)

    def apply(self, vec):
        """Matrix times column vector (a plain list)."""
        if len(vec) != self.cols:
            raise ExactLinearAlgebraError("vector length mismatch")
        f = self.field
        zero = f.zero()
        out = []
        for row in self.data:
            s = zero
            for a, x in zip(row, vec):
                if a != zero and x != zero:
                    s = f.add(s, f.mul(a, x))
            out.append(s)
        return out

    def transpose(self):
        data = [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)]
        return ExactMatrix(self.field, self.cols, self.rows, data, coerce=False)

    # stacking ----------------------------------------------------------------

    def hstack(self, other):
        if self.rows != other.rows or self.field != other.field:
            raise ExactLinearAlgebraError("hstack shape mismatch")
        data = [r1 + r2 for r1, r2 in zip(self.data, other.data)]
        return ExactMatrix(self.field, self.rows, self.cols + other.cols, data, coerce=False)

    def vstack(self, other):
        if self.cols != other.cols or self.field != other.field:
            raise ExactLinearAlgebraError("vstack shape mismatch")
        data = [list(r) for r in self.data] + [list(r) for r in other.data]
        return ExactMatrix(self.field, self.rows + other.rows, self.cols, data, coerce=False)

    @classmethod
    def block(cls, field, grid):
        """Assemble a matrix from a 2D grid of blocks (all shapes consistent)."""
        data = []
        for block_row in grid:
            if not block_row:
                continue
            n = block_row[0].rows
            for b in block_row:
                if b.rows != n:
                    raise ExactLinearAlgebraError("inconsistent block heights")
            for i in range(n):
                row = []
                for b in block_row:
                    row.extend(b.data[i])
                data.append(row)
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(field, rows, cols, data, coerce=False)

    # elimination -------------------------------------------------------------

    def rref(self):
        """Reduced row echelon form.  Returns (reduced, pivot_cols)."""
        f = self.field
        zero = f.zero()
        m = [list(row) for row in self.data]
        pivots = []
        r = 0
        for c in range(self.cols):
            if r >= self.rows:
                break
            pr = None
            for i in range(r, self.rows):
                if m[i][c] != zero:
                    pr = i
                    break
            if pr is None:
                continue
            if pr != r:
                m[r], m[pr] = m[pr], m[r]
            piv = m[r][c]
            if piv != f.one():
                inv = f.inv(piv)
                row_r = m[r]
                if f.is_rational:
                    m[r] = [x * inv for x in row_r]
                else:
                    p = f.p
                    m[r] = [(x * inv) % p for x in row_r]
            row_r = m[r]
            for i in range(self.rows):
                if i == r:
                    continue
                a = m[i][c]
                if a == zero:
                    continue
                row_i = m[i]
                if f.is_rational:
                    m[i] = [x - a * y for x, y in zip(row_i, row_r)]
                else:
                    p = f.p
                    m[i] = [(x - a * y) % p for x, y in zip(row_i, row_r)]
            pivots.append(c)
            r += 1
        reduced = ExactMatrix(f, self.rows, self.cols, m, coerce=False)
        return reduced, pivots

    def rank(self):
        return len(self.rref()[1])

    def kernel_basis(self):
        """Columns form a basis of the null space."""
        reduced, pivots = self.rref()
        f = self.field
        zero, one = f.zero(), f.one()
        pivot_set = set(pivots)
        free = [j for j in range(self.cols) if j not in pivot_set]
        cols = []
        for j in free:
            v = [zero] * self.cols
            v[j] = one
            for r, pc in enumerate(pivots):
                v[pc] = f.neg(reduced.data[r][j])
            cols.append(v)
        return ExactMatrix.from_columns(f, self.cols, cols)

    def solve(self, b):
        """One exact solution of self @ x = b, or None if b is outside the column space."""
        sols = self.solve_multi(ExactMatrix.from_columns(self.field, self.rows, [list(b)]))
        if sols is None:
            return None
        return sols.column(0)

    def solve_multi(self, B):
        """Solve self @ X = B for all columns at once; None if any column is inconsistent."""
        if B.rows != self.rows:
            raise ExactLinearAlgebraError("right-hand side has wrong height")
        f = self.field
        zero = f.zero()
        aug = self.hstack(B)
        reduced, pivots = aug.rref()
        in_range = [p for p in pivots if p < self.cols]
        if len(in_range) != len(pivots):
            return None
        cols = []
        for j in range(B.cols):
            x = [zero] * self.cols
            for r, pc in enumerate(pivots):
                x[pc] = reduced.data[r][self.cols + j]
            cols.append(x)
        return ExactMatrix.from_columns(f, self.cols, cols)

    def inverse(self):
        if self.rows != self.cols:
            raise ExactLinearAlgebraError("inverse of non-square matrix")
        sol = self.solve_multi(ExactMatrix.identity(self.field, self.rows))
        if sol is None or (self @ sol) != ExactMatrix.identity(self.field, self.rows):
            return None
        return sol

    def is_invertible(self):
        return self.rows == self.cols and self.rank() == self.rows

    def column_space_basis(self):
        """Columns of self that form a basis of the column space (pivot columns)."""
        _, pivots = self.rref()
        return ExactMatrix.from_columns(self.field, self.rows, [self.column(j) for j in pivots])

    def flatten(self):
        """Row-major entry list."""
        return [x for row in self.data for x in row]


# module-level operation surface ------------------------------------------------


def rref(m):
    return m.rref()


def kernel_basis(m):
    return m.kernel_basis()


def solve(m, b):
    return m.solve(b)


class QuotientSpace:
    """Coordinates on k^n / span(subspace columns).

    `representatives` are standard basis vectors spanning a complement;
    `project` maps a vector of length n to its coordinates with respect to
    the representatives, killing exactly the subspace.
    """

    def __init__(self, field, ambient_dim, subspace):
        if subspace.rows != ambient_dim:
            raise ExactLinearAlgebraError("subspace does not live in k^ambient_dim")
        self.field = field
        self.ambient_dim = ambient_dim
        reduced, pivots = subspace.transpose().rref()
        self._rows = [reduced.row(r) for r in range(len(pivots))]
        self._pivots = pivots
        pivot_set = set(pivots)
        self.rep_indices = [j for j in range(ambient_dim) if j not in pivot_set]
        zero, one = field.zero(), field.one()
        self.representatives = []
        for j in self.rep_indices:
            v = [zero] * ambient_dim
            v[j] = one
            self.representatives.append(v)

    @property
    def dim(self):
        return len(self.rep_indices)

    def project(self, vec):
        if len(vec) != self.ambient_dim:
            raise ExactLinearAlgebraError("vector length mismatch")
        f = self.field
        v = list(vec)
        for row, p in zip(self._rows, self._pivots):
            a = v[p]
            if a == f.zero():
                continue
            v = [f.sub(x, f.mul(a, y)) for x, y in zip(v, row)]
        return [v[j] for j in self.rep_indices]


def quotient_basis(field, ambient_dim, subspace):
    """Representatives of k^n modulo the span of `subspace` columns, plus the projection."""
    q = QuotientSpace(field, ambient_dim, subspace)
    return q.representatives, q.project
