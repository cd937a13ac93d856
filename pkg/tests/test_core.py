from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from evokit.core import DimensionMismatchError, EvolutionAlgebra, Vector, multiply, plus_power
from evokit.scalars import GAUSSIAN, RATIONAL, BackendMismatchError, complex_float

small = st.integers(-3, 3).map(Fraction)


def _alg(rows, field=RATIONAL):
    return EvolutionAlgebra.from_rows(rows, field)


def test_basis_products():
    A = _alg([[0, 1], [0, 0]])
    e1, e2 = Vector.unit(2, 0), Vector.unit(2, 1)
    assert multiply(A, e1, e1) == e2
    assert multiply(A, e1, e2).is_zero()


def test_index4_matrix_row():
    b, f = 2, 3
    A = _alg([[0, 1, b, 0], [0, 0, 0, -b * b * f], [0, 0, 0, f], [0, 0, 0, 0]])
    e2 = Vector.unit(4, 1)
    assert multiply(A, e2, e2) == Vector.of([0, 0, 0, -12])


def test_plus_power():
    A = _alg([[0, 1], [0, 0]])
    assert plus_power(A, Vector.unit(2, 0), 3).is_zero()
    B = _alg([[1, 0], [0, 0]])
    assert plus_power(B, Vector.unit(2, 0), 5) == Vector.unit(2, 0)
    C = _alg([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    x = Vector.of([1, 1, 0])
    # x^2 = e1^2 + e2^2 = e2 + e3; (x^2) x = x_2 * 1 * e2^2 = e3
    assert plus_power(C, x, 2) == Vector.of([0, 1, 1])
    assert plus_power(C, x, 3) == Vector.of([0, 0, 1])
    assert plus_power(C, x, 4).is_zero()


def test_errors():
    A = _alg([[0, 1], [0, 0]])
    with pytest.raises(DimensionMismatchError):
        multiply(A, Vector.unit(3, 0), Vector.unit(3, 0))
    with pytest.raises(BackendMismatchError):
        multiply(A, Vector.unit(2, 0, GAUSSIAN), Vector.unit(2, 0, GAUSSIAN))
    with pytest.raises(DimensionMismatchError):
        EvolutionAlgebra.from_rows([[0, 1], [0]])
    with pytest.raises(ValueError):
        EvolutionAlgebra.from_rows([])
    with pytest.raises(BackendMismatchError):
        EvolutionAlgebra(((1j,),), RATIONAL)


def test_explicit_conversion():
    A = _alg([[0, Fraction(1, 3)], [0, 0]])
    B = A.converted(complex_float())
    assert B.field.name == "complex_float"
    assert B.matrix[0][1] == pytest.approx(1 / 3)


def test_permuted():
    A = _alg([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    P = A.permuted([2, 1, 0])
    assert P.is_strictly_upper()


vec3 = st.lists(small, min_size=3, max_size=3)
mat3 = st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3)


@given(mat3, vec3, vec3)
def test_commutative(m, x, y):
    A = _alg(m)
    assert multiply(A, Vector.of(x), Vector.of(y)) == multiply(A, Vector.of(y), Vector.of(x))


@given(mat3, vec3, vec3, vec3, small, small)
def test_bilinear(m, x, x2, y, a, b):
    A = _alg(m)
    X, X2, Y = Vector.of(x), Vector.of(x2), Vector.of(y)
    lhs = multiply(A, X.scale(a) + X2.scale(b), Y)
    rhs = multiply(A, X, Y).scale(a) + multiply(A, X2, Y).scale(b)
    assert lhs == rhs


@given(mat3, vec3, vec3)
def test_flexible(m, x, y):
    A = _alg(m)
    X, Y = Vector.of(x), Vector.of(y)
    assert multiply(A, multiply(A, X, Y), X) == multiply(A, X, multiply(A, Y, X))
