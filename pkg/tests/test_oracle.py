import random

import pytest

from evokit.core import EvolutionAlgebra
from evokit.oracle import OracleCostError, naive_nil_check, naive_nil_element_check, naive_principal_power
from evokit.powers import nil_check, principal_powers
from evokit.subspace import full_space, span

from helpers import random_algebra

alg = EvolutionAlgebra.from_rows
CHAIN3 = alg([[0, 1, 0], [0, 0, 1], [0, 0, 0]])


def test_principal_examples():
    assert naive_principal_power(CHAIN3, 5).is_zero()
    assert naive_principal_power(alg([[1, 2], [3, 4]]), 1) == full_space(2)
    assert naive_principal_power(alg([[0, 1], [0, 0]]), 2) == span([(0, 1)], 2)


def test_nil_examples():
    assert naive_nil_check(alg([[0, 1, 2, 3], [0, 0, 1, 1], [0, 0, 0, 1], [0, 0, 0, 0]]))
    assert not naive_nil_check(alg([[0, 1], [1, 0]]))
    assert not naive_nil_check(alg([[0, 0, 0], [0, 2, 0], [0, 0, 0]]))


def test_element_examples():
    assert naive_nil_element_check(CHAIN3, samples=100)
    assert not naive_nil_element_check(alg([[1]]))
    assert naive_nil_element_check(alg([[0, 0], [0, 0]]))


def test_guards():
    with pytest.raises(OracleCostError):
        naive_principal_power(CHAIN3, 10)
    with pytest.raises(OracleCostError):
        naive_nil_check(alg([[0] * 9 for _ in range(9)]))


def test_agreement_small():
    rng = random.Random(7)
    for _ in range(30):
        n = rng.randint(1, 4)
        A = random_algebra(rng, n, upper=rng.random() < 0.5)
        rep = principal_powers(A)
        for k in range(1, min(2**n + 1, 9) + 1):
            assert naive_principal_power(A, k) == rep.at(k)
        assert naive_nil_check(A) == nil_check(A).is_nil
