"""Observed nilpotent indices of strictly upper triangular algebras over a grid.

Strictly upper triangular matrices cover every nilpotent algebra up to a
reordering of the basis, so the spectrum only enumerates those. The index is
unchanged by A -> tA, so rational grids are scaled to integers and run
through the integer chain kernel.
"""
from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import kernels
from .powers import plateau_violations_dims, stabilization_violations_dims


@dataclass(frozen=True)
class SpectrumResult:
    n: int
    grid: tuple[Fraction, ...]
    exhaustive: bool
    examined: int
    counts: dict  # index -> number of matrices
    witnesses: dict  # index -> (item number, matrix) with the smallest item number
    plateau_violations: int = 0
    stabilization_violations: int = 0
    violation_examples: tuple = field(default_factory=tuple)

    @property
    def indices(self) -> list[int]:
        return sorted(self.counts)


def _positions(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _matrix(item: int, n: int, grid_int: Sequence[int], pos) -> list[list[int]]:
    # item number in mixed radix: the first position varies slowest
    m = [[0] * n for _ in range(n)]
    g = len(grid_int)
    for (i, j) in reversed(pos):
        item, r = divmod(item, g)
        m[i][j] = grid_int[r]
    return m


def _scaled(grid: Sequence[Fraction]) -> list[int]:
    lcm = 1
    for x in grid:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    return [int(x * lcm) for x in grid]


def _run(args):
    n, grid_int, items = args
    pos = _positions(n)
    counts: dict[int, int] = {}
    first: dict[int, int] = {}
    plateau = stab = 0
    examples = []
    for item in items:
        m = _matrix(item, n, grid_int, pos)
        index, _, dims = kernels.principal_index_int(m)
        counts[index] = counts.get(index, 0) + 1
        if index not in first or item < first[index]:
            first[index] = item
        p, s = plateau_violations_dims(dims), stabilization_violations_dims(dims)
        if p or s:
            plateau += bool(p)
            stab += bool(s)
            if len(examples) < 5:
                examples.append(item)
    return counts, first, plateau, stab, examples


def spectrum(
    n: int,
    grid: Sequence,
    budget: int | None = None,
    parallel: int = 1,
    seed: int = 0,
) -> SpectrumResult:
    """Nilpotent indices over strictly upper triangular n x n matrices with
    entries from ``grid``.

    Exhaustive when the number of matrices fits in ``budget`` (no budget means
    exhaustive); otherwise ``budget`` matrices are drawn with replacement by
    a seeded generator. Items are split into ``parallel`` contiguous shards and
    merged by multiset union, with the smallest item number kept as witness, so
    the output does not depend on ``parallel``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    grid_q = tuple(dict.fromkeys(Fraction(x) for x in grid))
    if not grid_q:
        raise ValueError("grid is empty")
    grid_int = _scaled(grid_q)
    pos = _positions(n)
    total = len(grid_q) ** len(pos)
    exhaustive = budget is None or total <= budget
    if exhaustive:
        items = list(range(total))
    else:
        rng = random.Random(seed)
        items = [rng.randrange(total) for _ in range(budget)]
    parallel = max(1, int(parallel))
    size = -(-len(items) // parallel)
    shards = [(n, grid_int, items[k:k + size]) for k in range(0, len(items), size)] or [(n, grid_int, [])]
    if parallel > 1 and len(shards) > 1:
        with ProcessPoolExecutor(parallel) as ex:
            parts = list(ex.map(_run, shards))
    else:
        parts = [_run(s) for s in shards]
    counts: dict = {}
    first: dict = {}
    plateau = stab = 0
    examples: list = []
    for c, f, p, s, ex_items in parts:
        for k, v in c.items():
            counts[k] = counts.get(k, 0) + v
        for k, v in f.items():
            if k not in first or v < first[k]:
                first[k] = v
        plateau += p
        stab += s
        examples.extend(ex_items)
    witnesses = {
        k: (item, [[grid_q[grid_int.index(x)] for x in row] for row in _matrix(item, n, grid_int, pos)])
        for k, item in first.items()
    }
    examples = sorted(set(examples))[:5]
    return SpectrumResult(
        n,
        grid_q,
        exhaustive,
        len(items),
        dict(sorted(counts.items(), key=lambda kv: (kv[0] is None, kv[0] or 0))),
        dict(sorted(witnesses.items(), key=lambda kv: (kv[0] is None, kv[0] or 0))),
        plateau,
        stab,
        tuple(examples),
    )
