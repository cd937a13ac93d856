"""Brute-force reference implementations for cross-checking the fast paths.

Nothing here calls into core/subspace/powers arithmetic: products, row
reduction and cycle enumeration are written out again in the plainest form.
Only the scalar types and the Subspace container are shared. Cost guards
raise instead of truncating.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .subspace import Subspace


class OracleCostError(RuntimeError):
    pass


def _plain_rref(rows, n, field):
    """Textbook Gauss-Jordan; exact fields compare to 0 directly, floats use
    the largest pivot and the field's eps."""
    m = [list(r) for r in rows]
    out = []
    col = 0
    exact = field.exact
    while col < n and m:
        if exact:
            idx = next((i for i, r in enumerate(m) if r[col] != 0), None)
        else:
            idx = max(range(len(m)), key=lambda i: abs(m[i][col]))
            if abs(m[idx][col]) <= field.eps * max(1.0, max(abs(x) for x in m[idx])):
                idx = None
        if idx is None:
            col += 1
            continue
        piv = m.pop(idx)
        p = piv[col]
        piv = [x / p for x in piv]
        m = [[a - r[col] * b for a, b in zip(r, piv)] for r in m]
        out = [[a - r[col] * b for a, b in zip(r, piv)] for r in out]
        out.append(piv)
        if exact:
            m = [r for r in m if any(x != 0 for x in r)]
        else:
            m = [r for r in m if max(abs(x) for x in r) > field.eps]
        col += 1
    if not exact:
        out = [[0j if abs(x) <= field.eps else x for x in r] for r in out]
    return tuple(tuple(r) for r in out)


def _plain_product(alg, u, v):
    n = alg.dim
    acc = [alg.field.zero] * n
    for i in range(n):
        c = u[i] * v[i]
        for k in range(n):
            acc[k] = acc[k] + c * alg.matrix[i][k]
    return acc


def _space(alg, rows):
    return Subspace(alg.dim, _plain_rref(rows, alg.dim, alg.field), alg.field)


def naive_principal_power(alg, k: int) -> Subspace:
    """E^k from E^1 = E and E^j = sum_{i=1}^{j-1} E^i E^(j-i), all terms, bottom up."""
    n = alg.dim
    if k < 1:
        raise ValueError("exponents start at 1")
    if k > 2**n + 1:
        raise OracleCostError(f"k={k} exceeds the guard 2^{n}+1")
    if n > 6:
        raise OracleCostError("naive chains are limited to dim <= 6")
    f = alg.field
    E = [[f.one if i == j else f.zero for j in range(n)] for i in range(n)]
    powers = [None, _plain_rref(E, n, f)]
    for j in range(2, k + 1):
        rows = []
        for i in range(1, j):
            for u in powers[i]:
                for v in powers[j - i]:
                    rows.append(_plain_product(alg, u, v))
        powers.append(_plain_rref(rows, n, f))
    return Subspace(n, powers[k], f)


def naive_chain(alg, k_max: int) -> list[Subspace]:
    return [naive_principal_power(alg, k) for k in range(1, k_max + 1)]


def naive_nil_check(alg) -> bool:
    """True iff every product a_{i1 i2} a_{i2 i3} ... a_{ik i1} over distinct
    indices i1..ik (all k) is zero."""
    n = alg.dim
    if n > 8:
        raise OracleCostError("cycle enumeration is limited to dim <= 8")
    A = alg.matrix
    f = alg.field
    for k in range(1, n + 1):
        for cyc in itertools.permutations(range(n), k):
            p = f.one
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                p = p * A[a][b]
                if p == 0:
                    break
            if not f.is_zero(p):
                return False
    return True


def naive_nil_element_check(alg, samples: int = 100, seed: int = 0) -> bool:
    """Left-normed powers x, x^2, (x^2)x, ... of the basis vectors and of random
    small-integer vectors, up to exponent 2^n + 1.

    A power still nonzero at the bound proves the algebra is not nil (a nil
    evolution algebra is nilpotent of index at most 2^(n-1) + 1), so False is
    certain; True is evidence only.
    """
    if not alg.field.exact:
        raise ValueError("element check needs an exact backend")
    n = alg.dim
    f = alg.field
    rng = random.Random(seed)
    vecs = [[f.one if i == j else f.zero for j in range(n)] for i in range(n)]
    vecs += [[f.coerce(Fraction(rng.randint(-3, 3))) for _ in range(n)] for _ in range(samples)]
    bound = 2**n + 1
    for x in vecs:
        p = x
        for _ in range(bound - 1):
            if all(c == 0 for c in p):
                break
            p = _plain_product(alg, p, x)
        if any(c != 0 for c in p):
            return False
    return True
