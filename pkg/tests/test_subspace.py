from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from evokit.core import DimensionMismatchError, EvolutionAlgebra, Vector
from evokit.scalars import GAUSSIAN, complex_float
from evokit.subspace import (
    contains,
    equals,
    full_space,
    inverse,
    mat_mul,
    product,
    span,
    subspace_sum,
    zero_space,
)

E = lambda n, i: Vector.unit(n, i)  # noqa: E731


def test_span_examples():
    assert span([E(3, 0), E(3, 0) + E(3, 1)], 3).basis == ((1, 0, 0), (0, 1, 0))
    assert span([], 3).is_zero()
    S = span([(1, 2, 0), (2, 4, 0), (0, 0, 5)], 3)
    assert S.basis == ((1, 2, 0), (0, 0, 1))


def test_sum_examples():
    assert subspace_sum(span([E(2, 0)], 2), span([E(2, 1)], 2)) == full_space(2)
    U = span([(1, 1)], 2)
    assert subspace_sum(U, zero_space(2)) == U
    assert subspace_sum(span([(1, 1)], 2), span([(1, -1)], 2)) == full_space(2)


def test_product_examples():
    A = EvolutionAlgebra.from_rows([[0, 1], [0, 0]])
    assert product(A, full_space(2), full_space(2)) == span([(0, 1)], 2)
    assert product(A, full_space(2), zero_space(2)).is_zero()
    B = EvolutionAlgebra.from_rows([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert product(B, full_space(3), span([E(3, 0)], 3)) == span([(0, 1, 0)], 3)


def test_equals_contains():
    assert equals(span([(1, 1, 0)], 3), span([(2, 2, 0)], 3))
    assert contains(full_space(3), span([(1, 5, 7)], 3))
    assert not contains(span([(1, 0, 0)], 3), span([(0, 1, 0)], 3))


def test_mismatch():
    with pytest.raises(DimensionMismatchError):
        subspace_sum(full_space(2), full_space(3))
    with pytest.raises(DimensionMismatchError):
        span([(1, 2)], 3)


def test_float_backend_tolerance():
    F = complex_float()
    U = span([(1, 1e-12, 0)], 3, F)
    V = span([(1, 0, 0)], 3, F)
    assert U == V
    assert span([(1, 1, 0), (1, 1 + 1e-13, 0)], 3, F).dim == 1


def test_gaussian_span():
    i = GAUSSIAN.parse("0+1i")
    S = span([(i, 1), (1, -i)], 2, GAUSSIAN)
    assert S.dim == 1


def test_inverse():
    M = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
    inv = inverse(M)
    assert mat_mul(M, inv) == ((1, 0), (0, 1))
    assert inverse([[1, 2], [2, 4]]) is None


rows = st.lists(st.lists(st.integers(-3, 3).map(Fraction), min_size=4, max_size=4), max_size=5)


@given(rows, rows)
def test_sum_is_union_span(a, b):
    U, V = span(a, 4), span(b, 4)
    S = subspace_sum(U, V)
    assert S == span(a + b, 4)
    assert contains(S, U) and contains(S, V)
    assert S.dim >= max(U.dim, V.dim)


@given(rows)
def test_canonical_basis_unique(a):
    U = span(a, 4)
    # a different spanning set of the same space gives the identical stored basis
    doubled = [tuple(2 * x for x in r) for r in a] + [tuple(x + y for x, y in zip(a[0], a[-1]))] if a else []
    assert span(doubled, 4).basis == U.basis
