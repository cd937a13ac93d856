import random
from fractions import Fraction

import pytest

from evokit.canonical import (
    NotMaximalIndexError,
    canonicalize,
    change_basis,
    enumerate_canonical_families,
    isomorphic_max_index,
    rescale,
    verify_isomorphism,
)
from evokit.core import EvolutionAlgebra
from evokit.families import FamilySpec, generate
from evokit.scalars import RATIONAL

alg = EvolutionAlgebra.from_rows
FORM1 = [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0]]
FORM2 = [[0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0]]


def _rows(c):
    return [[complex(x) for x in r] for r in c.matrix]


def test_form2_example():
    A = alg([[0, 1, 5, 7], [0, 0, 1, 2], [0, 0, 0, 1], [0, 0, 0, 0]])
    c = canonicalize(A)
    assert _rows(c) == FORM2
    assert verify_isomorphism(c.algebra, A.converted(c.field), c.basis)


def test_form1_example():
    c = canonicalize(alg(FORM1))
    assert [list(r) for r in c.matrix] == FORM1
    assert c.field is RATIONAL


def test_two_dim():
    c = canonicalize(alg([[0, 3], [0, 0]]))
    assert [list(r) for r in c.matrix] == [[0, 1], [0, 0]]


def test_not_maximal():
    with pytest.raises(NotMaximalIndexError):
        canonicalize(alg([[0, 1, 0], [0, 0, 0], [0, 0, 0]]))
    with pytest.raises(NotMaximalIndexError):
        canonicalize(alg([[1, 0], [0, 0]]))


def test_isomorphism_examples():
    a = generate(FamilySpec("max_index", 5, {"seed": 1}))
    b = rescale(a, [2, -1, Fraction(1, 3), 5, 7])
    c = rescale(a, [1, 3, 2, Fraction(-1, 2), 1])
    assert isomorphic_max_index(b, c)
    assert isomorphic_max_index(a, a)
    assert not isomorphic_max_index(alg(FORM1), alg(FORM2))


def test_verify_isomorphism_examples():
    a = alg(FORM2)
    ident = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    assert verify_isomorphism(a, a, ident)
    assert not verify_isomorphism(a, a, [[1, 0, 0, 0]] * 4)
    # scaling to superdiagonal ones: e'_1 = e_1, e'_{k+1} = e'_k^2
    b = alg([[0, 2, 0], [0, 0, 3], [0, 0, 0]])
    t = [Fraction(1), Fraction(2), Fraction(12)]
    phi = [[t[i] if j == i else 0 for j in range(3)] for i in range(3)]
    assert verify_isomorphism(superdiag := alg([[0, 1, 0], [0, 0, 1], [0, 0, 0]]), b, phi)
    assert change_basis(b, phi).matrix == superdiag.matrix


def test_enumerate():
    assert len(enumerate_canonical_families(4)) == 2
    five = enumerate_canonical_families(5)
    assert len(five) == 4
    assert five[3]["params"] == {"b": (1, 4), "d": (2, 4)}
    with pytest.raises(ValueError):
        enumerate_canonical_families(3)


def test_exact_gaussian_when_needed():
    # normalizing needs sqrt(-1) only, so the exact Gaussian field suffices
    A = alg([[0, 1, -1, 0], [0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0]])
    c = canonicalize(A)
    assert c.field.exact
    assert _rows(c) == FORM2


def test_idempotent_and_rescaling_exact():
    rng = random.Random(5)
    for _ in range(10):
        a = generate(FamilySpec("max_index", 4, {"seed": rng.randrange(10**6)}))
        c = canonicalize(a)
        again = canonicalize(c.algebra)
        assert again.matrix == c.matrix
        d = [Fraction(rng.choice([1, -1, 2, 3])) for _ in range(4)]
        assert isomorphic_max_index(a, rescale(a, d))


def test_five_dim_orbit_reported():
    # form 3 with d != 0 has a cube-root-of-unity ambiguity in d
    a = generate(FamilySpec("canonical_5", 5, {"form": 3, "d": 2}))
    c = canonicalize(a)
    assert c.ambiguous
