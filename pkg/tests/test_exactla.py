import random
from fractions import Fraction

import pytest

from serreduality.exactla import (
    QQ,
    ExactLinearAlgebraError,
    ExactMatrix,
    FieldSpec,
    QuotientSpace,
    kernel_basis,
    quotient_basis,
    rref,
    solve,
)


def M(rows, field=QQ):
    return ExactMatrix.from_rows(field, rows)


def test_field_spec_prime_validation():
    FieldSpec.prime_field(2)
    FieldSpec.prime_field(101)
    with pytest.raises(ExactLinearAlgebraError):
        FieldSpec.prime_field(6)
    with pytest.raises(ExactLinearAlgebraError):
        FieldSpec.prime_field(1)


def test_fp_arithmetic():
    F5 = FieldSpec.prime_field(5)
    assert F5.add(3, 4) == 2
    assert F5.mul(3, 4) == 2
    assert F5.inv(2) == 3
    assert F5.coerce(-1) == 4
    assert F5.coerce("7") == 2


def test_rref_identity():
    m = ExactMatrix.identity(QQ, 2)
    red, piv = rref(m)
    assert red == m
    assert piv == [0, 1]


def test_rref_zero():
    m = ExactMatrix.zeros(QQ, 3, 3)
    red, piv = rref(m)
    assert red == m
    assert piv == []


def test_rref_rank_one():
    # hand Gaussian elimination: [[2,4],[1,2]] -> [[1,2],[0,0]]
    red, piv = rref(M([[2, 4], [1, 2]]))
    assert red == M([[1, 2], [0, 0]])
    assert piv == [0]


def test_rref_idempotent():
    rng = random.Random(11)
    for _ in range(20):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        m = M([[rng.randint(-4, 4) for _ in range(c)] for _ in range(r)])
        red, _ = rref(m)
        red2, _ = rref(red)
        assert red2 == red


def test_kernel_identity_and_zero():
    assert kernel_basis(ExactMatrix.identity(QQ, 4)).cols == 0
    k = kernel_basis(ExactMatrix.zeros(QQ, 2, 2))
    assert k.cols == 2
    assert k.rank() == 2


def test_kernel_line():
    # solve x + y = 0
    k = kernel_basis(M([[1, 1]]))
    assert k.cols == 1
    col = k.column(0)
    assert col[0] == -col[1] and col[0] != 0


def test_rank_nullity_exact():
    rng = random.Random(7)
    for _ in range(30):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        m = M([[Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(c)] for _ in range(r)])
        assert m.rank() + m.kernel_basis().cols == c
        # every kernel column is an exact solution of m x = 0
        k = m.kernel_basis()
        for j in range(k.cols):
            assert all(v == 0 for v in m.apply(k.column(j)))


def test_solve_identity_and_inconsistent():
    m = ExactMatrix.identity(QQ, 3)
    b = [Fraction(1), Fraction(-2), Fraction(5, 3)]
    assert m.solve(b) == b
    z = ExactMatrix.zeros(QQ, 2, 2)
    assert z.solve([Fraction(1), Fraction(0)]) is None


def test_solve_underdetermined_by_substitution():
    m = M([[1, 1]])
    x = solve(m, [Fraction(3)])
    assert x is not None
    assert x[0] + x[1] == 3


def test_solve_kernel_consistency():
    rng = random.Random(3)
    for _ in range(20):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        m = M([[rng.randint(-3, 3) for _ in range(c)] for _ in range(r)])
        xs = [Fraction(rng.randint(-3, 3)) for _ in range(c)]
        b = m.apply(xs)
        x = m.solve(b)
        assert x is not None
        assert m.apply(x) == b
        k = m.kernel_basis()
        for j in range(k.cols):
            shifted = [a + v for a, v in zip(x, k.column(j))]
            assert m.apply(shifted) == b


def test_matmul_and_inverse():
    a = M([[1, 2], [3, 5]])
    inv = a.inverse()
    assert inv is not None
    assert (a @ inv).is_identity()
    singular = M([[1, 2], [2, 4]])
    assert singular.inverse() is None


def test_quotient_full_and_zero_subspace():
    full = ExactMatrix.identity(QQ, 3)
    reps, _ = quotient_basis(QQ, 3, full)
    assert reps == []
    none = ExactMatrix.zeros(QQ, 3, 0)
    reps, project = quotient_basis(QQ, 3, none)
    assert len(reps) == 3
    v = [Fraction(1), Fraction(2), Fraction(3)]
    assert project(v) == v


def test_quotient_line():
    sub = ExactMatrix.from_columns(QQ, 2, [[Fraction(1), Fraction(1)]])
    q = QuotientSpace(QQ, 2, sub)
    assert q.dim == 1
    assert q.project([Fraction(1), Fraction(1)]) == [Fraction(0)]
    assert q.project([Fraction(0), Fraction(1)]) != [Fraction(0)]


def test_quotient_kills_exactly_subspace():
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randint(1, 5)
        k = rng.randint(0, n)
        sub = ExactMatrix.from_columns(
            QQ, n, [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(k)]
        )
        q = QuotientSpace(QQ, n, sub)
        assert q.dim == n - sub.rank()
        for j in range(sub.cols):
            assert all(x == 0 for x in q.project(sub.column(j)))


def test_block_assembly():
    a = ExactMatrix.identity(QQ, 2)
    b = ExactMatrix.zeros(QQ, 2, 1)
    c = ExactMatrix.zeros(QQ, 1, 2)
    d = ExactMatrix.identity(QQ, 1)
    m = ExactMatrix.block(QQ, [[a, b], [c, d]])
    assert m.is_identity()


def test_fp_rref_and_kernel():
    F3 = FieldSpec.prime_field(3)
    m = ExactMatrix.from_rows(F3, [[1, 2], [2, 1]])
    # det = 1 - 4 = -3 = 0 mod 3, so rank 1
    assert m.rank() == 1
    k = m.kernel_basis()
    assert k.cols == 1
    assert all(v == 0 for v in m.apply(k.column(0)))
