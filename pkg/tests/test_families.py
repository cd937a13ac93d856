from fractions import Fraction

import pytest

from evokit.families import FamilyParamError, FamilySpec, expected_index, generate, mid_gap_family, valid_family_specs
from evokit.powers import nilpotent_index, principal_powers
from evokit.subspace import span


def test_chain_to_er():
    A = generate(FamilySpec("chain_to_er", 4, {"r": 2}))
    assert [list(r) for r in A.matrix] == [[0, 1, 0, 0], [0, 1, 0, 0], [0, 1, 0, 0], [0, 1, 0, 0]]
    assert expected_index(FamilySpec("chain_to_er", 4, {"r": 2})) is None


@pytest.mark.parametrize("n", [4, 5, 6])
def test_chain_to_er_limit(n):
    for spec in valid_family_specs("chain_to_er", n):
        r = spec.get("r")
        rep = principal_powers(generate(spec))
        assert rep.index is None
        assert rep.limit == span([tuple(1 if k == r - 1 else 0 for k in range(n))], n)


def test_four_dim_index4():
    A = generate(FamilySpec("four_dim_index4", 4, {"b": 2, "c": 0, "f": 3}))
    assert [list(r) for r in A.matrix] == [[0, 1, 2, 0], [0, 0, 0, -12], [0, 0, 0, 3], [0, 0, 0, 0]]
    assert nilpotent_index(A) == 4


def test_gap_family_example():
    spec = FamilySpec("gap_family", 5, {"s": 2, "gaps": [2]})
    assert expected_index(spec) == 9
    assert nilpotent_index(generate(spec)) == 9


def test_expected_values():
    assert expected_index(FamilySpec("max_index", 6)) == 33
    assert expected_index(FamilySpec("block_family", 6, {"s": 3, "gaps": [2, 3]})) == 9


def test_mid_gap_examples():
    assert nilpotent_index(mid_gap_family(5, 3, "m_m2")) == 9
    assert nilpotent_index(mid_gap_family(4, 2, "m1_m1")) == 5
    rep = principal_powers(mid_gap_family(5, 3, "m_m2"))
    # E^3 = <e_2^2, e_5> with e_2^2 = e_3
    assert rep.at(3) == span([(0, 0, 1, 0, 0), (0, 0, 0, 0, 1)], 5)


def test_bad_params():
    with pytest.raises(FamilyParamError):
        generate(FamilySpec("mid_gap", 5, {"m": 1}))
    with pytest.raises(FamilyParamError):
        generate(FamilySpec("chain_to_er", 4, {"r": 4}))
    with pytest.raises(FamilyParamError):
        generate(FamilySpec("nope", 3))


@pytest.mark.parametrize("kind", ["gap_family", "block_family"])
@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_formula_default_fill(kind, n):
    for spec in valid_family_specs(kind, n):
        A = generate(spec)
        assert A.is_strictly_upper()
        assert nilpotent_index(A) == expected_index(spec), spec


@pytest.mark.parametrize("n", [4, 5, 6])
def test_mid_gap_default_fill(n):
    for spec in valid_family_specs("mid_gap", n):
        assert nilpotent_index(generate(spec)) == expected_index(spec), spec


def test_gap_family_nonzero_last_column():
    for spec in valid_family_specs("gap_family", 5, last_column=Fraction(2)):
        assert nilpotent_index(generate(spec)) == expected_index(spec)


def test_random_fill_is_deterministic():
    s = FamilySpec("max_index", 5, {"seed": 3})
    assert generate(s).matrix == generate(s).matrix
