"""Normal forms and isomorphism for algebras of maximal nilpotent index.

Every such algebra can be rebased to a strictly upper triangular matrix
with ones on the superdiagonal, a last column reduced to the unit in row
n-1, and free "residual" entries a_ij (j <= n-1, j >= i+2). The only
remaining freedom is e_i -> t^(2^(i-1)) e_i, which multiplies the residual
a_ij by t^(2^i - 2^(j-1)) (1-based). The normal form fixes t by setting the
first nonzero residual to 1 and, among the finitely many admissible t,
picks the lexicographically smallest residual tuple.

Indices in this module's API are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import DimensionMismatchError, EvolutionAlgebra, Vector, multiply
from .powers import max_index_criterion, triangularize
from .scalars import GAUSSIAN, ComplexFloatField, Field, complex_float, principal_root
from .subspace import inverse, rank


class NotMaximalIndexError(ValueError):
    pass


@dataclass(frozen=True)
class CanonicalForm:
    dim: int
    matrix: tuple
    field: Field
    normalized_entry: tuple[int, int] | None
    residual_entries: tuple[tuple[tuple[int, int], object], ...]
    basis: tuple
    transform: tuple
    orbit: tuple

    @property
    def algebra(self) -> EvolutionAlgebra:
        return EvolutionAlgebra(self.matrix, self.field, label="canonical")

    def residual(self, i: int, j: int):
        return dict(self.residual_entries)[(i, j)]

    @property
    def ambiguous(self) -> bool:
        """True when the root-of-unity orbit holds more than one residual tuple."""
        return len(self.orbit) > 1


def residual_positions(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 2, n - 1)]


def _weight(i: int, j: int) -> int:
    # residual a_ij scales by t^(-weight) under e_k -> t^(2^k) e_k (0-based k)
    return 2**j - 2 ** (i + 1)


def _lex_key_less(x: Sequence, y: Sequence, field: Field, tol: float) -> bool:
    for a, b in zip(x, y):
        a, b = complex(a), complex(b)
        for u, v in ((a.real, b.real), (a.imag, b.imag)):
            if field.exact:
                if u != v:
                    return u < v
            elif abs(u - v) > tol:
                return u < v
    return False


def _close(x: Sequence, y: Sequence, field: Field, tol: float) -> bool:
    if field.exact:
        return tuple(x) == tuple(y)
    return all(abs(complex(a) - complex(b)) <= tol * max(1.0, abs(a), abs(b)) for a, b in zip(x, y))


def _normalize(tri: EvolutionAlgebra):
    """Returns (matrix, basis rows in tri coordinates, normalized entry, orbit) or
    None when a needed root is missing from the field."""
    F = tri.field
    n = tri.dim
    a = tri.matrix
    one, zero = F.one, F.zero
    tol = getattr(F, "eps", 0.0)

    # superdiagonal to ones: g_i = c_i e_i with c_i^2 a_{i,i+1} = c_{i+1}
    c = [one] * n
    for i in reversed(range(n - 1)):
        r = principal_root(F, c[i + 1] / a[i][i + 1], 2)
        if r is None:
            return None
        c[i] = r
    a1 = [[c[i] * c[i] * a[i][k] / c[k] for k in range(n)] for i in range(n)]

    # last column: f_i = g_i + nu_i g_n solves sum_k a1_ik nu_k = a1_in for i <= n-3
    nu = [zero] * n
    for i in reversed(range(n - 2)):
        acc = a1[i][n - 1]
        for k in range(i + 2, n - 1):
            acc = acc - a1[i][k] * nu[k]
        nu[i + 1] = acc
    a2 = [row[:] for row in a1]
    for i in range(n - 2):
        acc = a1[i][n - 1]
        for k in range(n - 1):
            acc = acc - a1[i][k] * nu[k]
        a2[i][n - 1] = zero if F.is_zero(acc, 1.0) else acc

    positions = residual_positions(n)
    scale = max((abs(a2[i][j]) for i, j in positions), default=0.0)
    first = next((p for p in positions if not F.is_zero(a2[p[0]][p[1]], scale)), None)
    if first is None:
        ts = [one]
    else:
        k0, j0 = first
        e0 = _weight(k0, j0)
        ts = F.roots(a2[k0][j0], e0)
        if len(ts) != e0:
            return None

    candidates = []
    for t in ts:
        res = []
        for i, j in positions:
            v = a2[i][j]
            if (i, j) == first:
                v = one
            elif F.is_zero(v, scale):
                v = zero
            else:
                v = v / t ** _weight(i, j)
            res.append(v)
        candidates.append((t, tuple(res)))
    best_t, best = candidates[0]
    for t, res in candidates[1:]:
        if _lex_key_less(res, best, F, tol):
            best_t, best = t, res
    orbit = []
    for _, res in candidates:
        if not any(_close(res, o, F, tol) for o in orbit):
            orbit.append(res)

    B = [[zero] * n for _ in range(n)]
    for i in range(n - 1):
        B[i][i + 1] = one
    for (i, j), v in zip(positions, best):
        B[i][j] = v
    basis = []
    for i in range(n):
        lam = best_t ** (2**i)
        row = [zero] * n
        row[i] = lam * c[i]
        if i < n - 1:
            row[n - 1] = row[n - 1] + lam * nu[i] * c[n - 1]
        basis.append(tuple(row))
    return (
        tuple(tuple(r) for r in B),
        tuple(basis),
        first,
        tuple(zip(positions, best)),
        tuple(orbit),
    )


def canonicalize(alg: EvolutionAlgebra, allow_float: bool = True) -> CanonicalForm:
    """Normal form of a maximal-index algebra.

    Works in the input field when every root it needs lies there, then in the
    Gaussian rationals (rational inputs), and otherwise converts to the
    complex float backend (unless ``allow_float`` is False).
    """
    n = alg.dim
    if n == 1:
        raise NotMaximalIndexError("dimension 1 has no maximal-index normal form")
    try:
        ok = max_index_criterion(alg)
    except ValueError as exc:
        raise NotMaximalIndexError(str(exc)) from exc
    if not ok:
        raise NotMaximalIndexError("algebra does not have maximal nilpotent index")
    tri, perm = triangularize(alg)
    out = _normalize(tri)
    if out is None and alg.field.name == "rational":
        # i is often the only missing root
        g = tri.converted(GAUSSIAN)
        out = _normalize(g)
        if out is not None:
            tri = g
    if out is None:
        if not allow_float:
            raise ValueError("normal form needs roots outside the exact fields")
        target = alg.field if isinstance(alg.field, ComplexFloatField) else complex_float()
        tri = tri.converted(target)
        out = _normalize(tri)
    B, basis_tri, first, residuals, orbit = out
    F = tri.field
    # tri basis vector k is e_{perm[k]} of the input algebra
    basis = []
    for row in basis_tri:
        v = [F.zero] * n
        for k, x in enumerate(row):
            v[perm[k]] = x
        basis.append(tuple(v))
    transform = inverse(basis, F)
    return CanonicalForm(n, B, F, first, residuals, tuple(basis), transform, orbit)


def rescale(alg: EvolutionAlgebra, diag: Sequence) -> EvolutionAlgebra:
    """Structure constants in the basis e'_i = d_i e_i."""
    F = alg.field
    d = [F.coerce(x) for x in diag]
    if any(F.is_zero(x) for x in d):
        raise ValueError("rescaling factors must be nonzero")
    m = alg.matrix
    n = alg.dim
    return EvolutionAlgebra(
        tuple(tuple(d[i] * d[i] * m[i][k] / d[k] for k in range(n)) for i in range(n)), F, alg.label
    )


def change_basis(alg: EvolutionAlgebra, basis: Sequence[Sequence]) -> EvolutionAlgebra:
    """Structure constants of ``alg`` in a new natural basis (rows in old coordinates)."""
    F = alg.field
    n = alg.dim
    rows = [Vector(tuple(F.coerce(x) for x in r), F) for r in basis]
    inv = inverse([r.coords for r in rows], F)
    if inv is None:
        raise ValueError("basis is singular")
    for i in range(n):
        for j in range(i + 1, n):
            if not multiply(alg, rows[i], rows[j]).is_zero():
                raise ValueError("new basis is not natural: f_i f_j != 0")
    new = []
    for r in rows:
        sq = multiply(alg, r, r).coords
        new.append(tuple(sum((sq[k] * inv[k][j] for k in range(n)), F.zero) for j in range(n)))
    return EvolutionAlgebra(tuple(new), F, alg.label)


def verify_isomorphism(a: EvolutionAlgebra, b: EvolutionAlgebra, phi: Sequence[Sequence]) -> bool:
    """phi maps e_i of ``a`` to the vector phi[i] of ``b``; checks bijectivity and
    phi(e_i e_j) = phi(e_i) phi(e_j) on all basis pairs."""
    if a.dim != b.dim or len(phi) != a.dim or any(len(r) != a.dim for r in phi):
        raise DimensionMismatchError("dimension mismatch")
    F = b.field
    n = a.dim
    images = [Vector(tuple(F.coerce(x) for x in r), F) for r in phi]
    if rank([v.coords for v in images], F) < n:
        return False
    am = [tuple(F.coerce(x) for x in row) for row in a.matrix]
    for i in range(n):
        for j in range(i, n):
            rhs = multiply(b, images[i], images[j])
            if i == j:
                lhs = Vector.zeros(n, F)
                for k, c in enumerate(am[i]):
                    if c != 0:
                        lhs = lhs + images[k].scale(c)
            else:
                lhs = Vector.zeros(n, F)
            if F.exact:
                if lhs != rhs:
                    return False
            else:
                scale = max([1.0] + [abs(x) for x in lhs.coords + rhs.coords])
                if any(abs(x - y) > F.eps * scale for x, y in zip(lhs.coords, rhs.coords)):
                    return False
    return True



def isomorphic_max_index(a: EvolutionAlgebra, b: EvolutionAlgebra) -> bool:
    if a.dim != b.dim:
        raise DimensionMismatchError("dimension mismatch")
    ca, cb = canonicalize(a), canonicalize(b)
    if ca.normalized_entry != cb.normalized_entry:
        return False
    if ca.field.exact and cb.field.exact:
        # rational sits inside the Gaussian rationals, so compare there
        res_b = tuple(GAUSSIAN.coerce(v) for _, v in cb.residual_entries)
        return any(res_b == tuple(GAUSSIAN.coerce(v) for v in o) for o in ca.orbit)
    F = ca.field if not ca.field.exact else cb.field
    tol = F.eps * 10
    res_b = tuple(complex(v) for _, v in cb.residual_entries)
    return any(_close(res_b, tuple(complex(v) for v in o), F, tol) for o in ca.orbit)


def enumerate_canonical_families(n: int) -> list[dict]:
    """The listed normal forms for n = 4 and 5 (1-based parameter positions).

    Each entry gives the fixed residual entries and the names of free
    parameter slots.
    """
    if n == 4:
        return [
            {"form": 1, "fixed": {}, "params": {}},
            {"form": 2, "fixed": {(1, 3): 1}, "params": {}},
        ]
    if n == 5:
        return [
            {"form": 1, "fixed": {}, "params": {}},
            {"form": 2, "fixed": {(2, 4): 1}, "params": {}},
            {"form": 3, "fixed": {(1, 4): 1}, "params": {"d": (2, 4)}},
            {"form": 4, "fixed": {(1, 3): 1}, "params": {"b": (1, 4), "d": (2, 4)}},
        ]
    raise ValueError(f"no listed normal forms for n={n} (only 4 and 5)")
