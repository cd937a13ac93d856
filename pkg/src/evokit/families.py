"""Generators for the constructed algebra families and random test algebras.

Indices in ``params`` (``r``, ``m``, ``gaps``) are 1-based, matching the
usual e_1..e_n labelling; matrices are built 0-based internally.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from .core import EvolutionAlgebra
from .scalars import RATIONAL

KINDS = (
    "max_index",
    "chain_to_er",
    "gap_family",
    "block_family",
    "mid_gap",
    "four_dim_index4",
    "canonical_4",
    "canonical_5",
    "random_upper",
    "random_dense",
)

# nonzero values used when free entries are filled at random
FREE_VALUES = (Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 2))


class FamilyParamError(ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    dim: int
    params: Mapping[str, Any] = field(default_factory=dict)

    def get(self, key, default=None):
        return self.params.get(key, default)


def _rat(x) -> Fraction:
    return RATIONAL.coerce(x)


def _free_filler(spec: FamilySpec):
    """Returns a callable producing the value of each free entry.

    ``fill`` gives one constant for all free entries (default 0); ``seed``
    draws each free entry from ``values`` (default FREE_VALUES, plus 0 when
    ``allow_zero`` is set).
    """
    seed = spec.get("seed")
    if seed is None:
        c = _rat(spec.get("fill", 0))
        return lambda: c
    rng = random.Random(seed)
    values = tuple(_rat(v) for v in spec.get("values", FREE_VALUES))
    if spec.get("allow_zero"):
        values = values + (Fraction(0),)
    return lambda: rng.choice(values)


def _gaps(spec: FamilySpec) -> list[int]:
    gaps = spec.get("gaps")
    if gaps is None:
        raise FamilyParamError(f"{spec.kind} needs 'gaps'")
    if isinstance(gaps, str):
        gaps = [int(g) for g in gaps.split(",") if g.strip()]
    return sorted(int(g) for g in gaps)


def _zeros(n):
    return [[Fraction(0)] * n for _ in range(n)]


def _chain_on(m, idx: list[int], free, sub=None) -> None:
    """Superdiagonal ones along idx (0-based) plus free upper entries within idx."""
    for t in range(len(idx) - 1):
        m[idx[t]][idx[t + 1]] = Fraction(1) if sub is None else sub[t]
        for u in range(t + 2, len(idx)):
            m[idx[t]][idx[u]] = free()


def _validate(spec: FamilySpec) -> None:
    n, kind = spec.dim, spec.kind
    if kind not in KINDS:
        raise FamilyParamError(f"unknown family {kind!r}")
    if n < 1:
        raise FamilyParamError("dim must be >= 1")
    if kind == "chain_to_er":
        r = spec.get("r")
        if r is None or not 2 <= int(r) <= n - 1:
            raise FamilyParamError("chain_to_er requires 2 <= r <= n-1")
    elif kind in ("gap_family", "block_family"):
        s = spec.get("s")
        gaps = _gaps(spec)
        if s is None:
            s = len(gaps) + 1
        s = int(s)
        if len(gaps) != s - 1:
            raise FamilyParamError(f"{kind} needs exactly s-1 = {s - 1} gap positions")
        if len(set(gaps)) != len(gaps) or any(not 1 <= g <= n - 2 for g in gaps):
            raise FamilyParamError("gap positions must be distinct and lie in 1..n-2")
        if kind == "gap_family" and not 1 <= s < n:
            raise FamilyParamError("gap_family requires 1 <= s < n")
        if kind == "block_family" and not (2 <= s < n - 1):
            raise FamilyParamError("block_family requires 2 <= s < n-1")
    elif kind == "mid_gap":
        m = spec.get("m")
        if m is None or not 2 <= int(m) <= n - 2:
            raise FamilyParamError("mid_gap requires 2 <= m <= n-2")
        if spec.get("variant", "m_m2") not in ("m_m2", "m1_m1"):
            raise FamilyParamError("mid_gap variant is 'm_m2' (a_{m,m+2}) or 'm1_m1' (a_{m-1,m+1})")
    elif kind == "four_dim_index4":
        if n != 4:
            raise FamilyParamError("four_dim_index4 is 4-dimensional")
        if _rat(spec.get("b", 1)) == 0 or _rat(spec.get("f", 1)) == 0:
            raise FamilyParamError("four_dim_index4 needs b f != 0")
    elif kind == "canonical_4":
        if n != 4 or spec.get("form", 1) not in (1, 2):
            raise FamilyParamError("canonical_4 has dim 4 and form 1 or 2")
    elif kind == "canonical_5":
        if n != 5 or spec.get("form", 1) not in (1, 2, 3, 4):
            raise FamilyParamError("canonical_5 has dim 5 and form 1..4")
    elif kind == "max_index":
        sup = spec.get("superdiagonal")
        if sup is not None and (len(sup) != n - 1 or any(_rat(x) == 0 for x in sup)):
            raise FamilyParamError("max_index superdiagonal needs n-1 nonzero entries")


def generate(spec: FamilySpec) -> EvolutionAlgebra:
    _validate(spec)
    n, kind = spec.dim, spec.kind
    free = _free_filler(spec)
    m = _zeros(n)

    if kind == "max_index":
        sup = spec.get("superdiagonal")
        _chain_on(m, list(range(n)), free, None if sup is None else [_rat(x) for x in sup])

    elif kind == "chain_to_er":
        r = int(spec.get("r"))
        for i in range(r - 1):
            m[i][i + 1] = Fraction(1)
        for i in range(r - 1, n):
            m[i][r - 1] = Fraction(1)

    elif kind == "gap_family":
        # gap rows vanish except in column n, gap columns vanish; the remaining
        # basis vectors carry a maximal-index chain
        gaps = [g - 1 for g in _gaps(spec)]
        rest = [i for i in range(n) if i not in gaps]
        _chain_on(m, rest, free)
        last = spec.get("last_column")
        for g in gaps:
            m[g][n - 1] = free() if last is None else _rat(last)

    elif kind == "block_family":
        # two blocks sharing e_n: the gap indices chained i_1 -> ... -> i_{s-1} -> n,
        # and the remaining indices chained as a maximal-index algebra
        gaps = [g - 1 for g in _gaps(spec)]
        rest = [i for i in range(n) if i not in gaps]
        _chain_on(m, rest, free)
        _chain_on(m, gaps + [n - 1], free)

    elif kind == "mid_gap":
        mm = int(spec.get("m"))
        _chain_on(m, list(range(n)), free)
        m[mm - 1][mm] = Fraction(0)
        if spec.get("variant", "m_m2") == "m_m2":
            m[mm - 1][mm + 1] = Fraction(1)
        else:
            m[mm - 2][mm] = Fraction(1)

    elif kind == "four_dim_index4":
        b, c, f = _rat(spec.get("b", 1)), _rat(spec.get("c", 0)), _rat(spec.get("f", 1))
        m = [
            [0, 1, b, c],
            [0, 0, 0, -b * b * f],
            [0, 0, 0, f],
            [0, 0, 0, 0],
        ]

    elif kind == "canonical_4":
        m = [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0]]
        if spec.get("form", 1) == 2:
            m[0][2] = 1

    elif kind == "canonical_5":
        form = spec.get("form", 1)
        b, d = _rat(spec.get("b", 0)), _rat(spec.get("d", 0))
        m = [[0] * 5 for _ in range(5)]
        for i in range(4):
            m[i][i + 1] = 1
        if form == 2:
            m[1][3] = 1
        elif form == 3:
            m[0][3] = 1
            m[1][3] = d
        elif form == 4:
            m[0][2] = 1
            m[0][3] = b
            m[1][3] = d

    elif kind in ("random_upper", "random_dense"):
        rng = random.Random(spec.get("seed", 0))
        values = [_rat(v) for v in spec.get("values", range(-2, 3))]
        for i in range(n):
            for j in range(n):
                if kind == "random_dense" or j > i:
                    m[i][j] = rng.choice(values)

    return EvolutionAlgebra.from_rows(m, RATIONAL, label=f"{kind}(n={n})")


def expected_index(spec: FamilySpec) -> int | None:
    """Nilpotent index predicted for the family, or None when no formula applies."""
    _validate(spec)
    n, kind = spec.dim, spec.kind
    if kind in ("max_index", "canonical_4", "canonical_5"):
        return 2 ** (n - 1) + 1
    if kind == "gap_family":
        s = len(_gaps(spec)) + 1
        return 2 ** (n - s) + 1
    if kind == "block_family":
        s = len(_gaps(spec)) + 1
        return 2 ** max(s - 1, n - s) + 1
    if kind == "mid_gap":
        return 2 ** (n - 2) + 1
    if kind == "four_dim_index4":
        return 4
    return None


def mid_gap_family(n: int, m: int, variant: str = "m_m2", **params) -> EvolutionAlgebra:
    """Superdiagonal ones except a_{m,m+1} = 0, with a_{m,m+2} = 1 (variant
    ``m_m2``) or a_{m-1,m+1} = 1 (variant ``m1_m1``)."""
    return generate(FamilySpec("mid_gap", n, {"m": m, "variant": variant, **params}))


def valid_family_specs(kind: str, n: int, **extra) -> list[FamilySpec]:
    """All valid structural parameter choices (r, s + gaps, m + variant) for n."""
    from itertools import combinations

    out = []
    if kind == "chain_to_er":
        out = [FamilySpec(kind, n, {"r": r, **extra}) for r in range(2, n)]
    elif kind == "gap_family":
        for s in range(1, n):
            for gaps in combinations(range(1, n - 1), s - 1):
                out.append(FamilySpec(kind, n, {"s": s, "gaps": list(gaps), **extra}))
    elif kind == "block_family":
        for s in range(2, n - 1):
            for gaps in combinations(range(1, n - 1), s - 1):
                out.append(FamilySpec(kind, n, {"s": s, "gaps": list(gaps), **extra}))
    elif kind == "mid_gap":
        for m in range(2, n - 1):
            for variant in ("m_m2", "m1_m1"):
                out.append(FamilySpec(kind, n, {"m": m, "variant": variant, **extra}))
    else:
        out = [FamilySpec(kind, n, dict(extra))]
    return out
