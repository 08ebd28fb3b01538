"""Standing desk-scale algebras used by the identity suites and the tests."""

from .algebra import Quiver, build_path_algebra
from .exactla import QQ


def a2(field=QQ):
    """The A2 quiver 1 -> 2, hereditary of dimension 3."""
    q = Quiver(["1", "2"], [("a", "1", "2")])
    return build_path_algebra(q, [], field, length_cap=4)


def dual_numbers(field=QQ):
    """k[x]/(x^2): one loop, self-injective, infinite global dimension."""
    q = Quiver(["v"], [("x", "v", "v")])
    rel = [[(1, ("v", ["x", "x"]))]]
    return build_path_algebra(q, rel, field, length_cap=4)


def two_loop_radical_square_zero(field=QQ):
    """k<x,y>/(x,y)^2: two loops with all length-2 paths killed; not Gorenstein."""
    q = Quiver(["v"], [("x", "v", "v"), ("y", "v", "v")])
    rel = [
        [(1, ("v", ["x", "x"]))],
        [(1, ("v", ["x", "y"]))],
        [(1, ("v", ["y", "x"]))],
        [(1, ("v", ["y", "y"]))],
    ]
    return build_path_algebra(q, rel, field, length_cap=4)


FIXTURES = {
    "a2": a2,
    "dual_numbers": dual_numbers,
    "two_loop_radical_square_zero": two_loop_radical_square_zero,
}
